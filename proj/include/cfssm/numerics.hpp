#pragma once

#include <span>
#include <vector>

namespace cfssm {

/// log N(x; mean, variance). Throws InvalidParameterError unless
/// variance > 0 and all inputs are finite.
double gaussian_logpdf(double x, double mean, double variance);

/// Max-shifted log-sum-exp. Returns -inf for an all(-inf) input.
double log_sum_exp(std::span<const double> values);

struct NormalizedLogWeights {
    std::vector<double> log_weights;  // log-sum-exp == 0
    double log_normalizer;            // log-sum-exp of the inputs
};

/// Shift log weights so they exponentiate to a probability vector.
/// Throws InvalidInputError on an empty vector and
/// DegenerateLikelihoodError when every entry is -inf.
NormalizedLogWeights normalize_log_weights(std::span<const double> log_weights);

}  // namespace cfssm
