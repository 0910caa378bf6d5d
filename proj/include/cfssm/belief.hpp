#pragma once

#include <vector>

#include "cfssm/state.hpp"

namespace cfssm {

/// Weighted particle approximation of the posterior belief. Log-domain
/// weights throughout; a valid Belief always carries normalized weights
/// (log-sum-exp zero within tolerance) and finite particle coordinates.
struct Belief {
    std::vector<StateVec> particles;
    std::vector<double> log_weights;

    std::size_t size() const { return particles.size(); }
    int dim() const { return particles.empty() ? 0 : particles.front().dim(); }
};

/// Equal weights 1/N on the given particles.
Belief make_uniform_belief(std::vector<StateVec> particles);

/// Throws InvalidInputError when the normalization/finiteness invariants
/// are violated. `tol` bounds |log-sum-exp| of the weights.
void validate_belief(const Belief& b, double tol = 1e-9);

/// Weights in linear domain (exp of the log weights).
std::vector<double> linear_weights(const Belief& b);

/// Weighted posterior mean per coordinate.
StateVec belief_mean(const Belief& b);

/// 1 / sum(w_i^2); lies in [1, N].
double effective_sample_size(const Belief& b);

}  // namespace cfssm
