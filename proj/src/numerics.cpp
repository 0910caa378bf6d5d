#include "cfssm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfssm/errors.hpp"

namespace cfssm {

namespace {
constexpr double log_two_pi = 1.8378770664093454835606594728112;
constexpr double neg_inf = -std::numeric_limits<double>::infinity();
}  // namespace

double gaussian_logpdf(double x, double mean, double variance) {
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw InvalidParameterError("gaussian_logpdf: variance must be positive and finite");
    if (!std::isfinite(x) || !std::isfinite(mean))
        throw InvalidParameterError("gaussian_logpdf: non-finite input");
    const double r = x - mean;
    return -0.5 * (log_two_pi + std::log(variance)) - r * r / (2.0 * variance);
}

double log_sum_exp(std::span<const double> values) {
    const double m = *std::max_element(values.begin(), values.end());
    if (m == neg_inf) return neg_inf;
    double acc = 0.0;
    for (const double v : values) acc += std::exp(v - m);
    return m + std::log(acc);
}

NormalizedLogWeights normalize_log_weights(std::span<const double> log_weights) {
    if (log_weights.empty())
        throw InvalidInputError("normalize_log_weights: empty weight vector");
    const double lse = log_sum_exp(log_weights);
    if (lse == neg_inf)
        throw DegenerateLikelihoodError(
            "normalize_log_weights: all weights are zero (likelihood estimate vanished)");
    NormalizedLogWeights out;
    out.log_normalizer = lse;
    out.log_weights.resize(log_weights.size());
    for (std::size_t i = 0; i < log_weights.size(); ++i)
        out.log_weights[i] = log_weights[i] - lse;
    return out;
}

}  // namespace cfssm
