#include "cfssm/belief.hpp"

#include <cmath>

#include "cfssm/errors.hpp"
#include "cfssm/numerics.hpp"

namespace cfssm {

Belief make_uniform_belief(std::vector<StateVec> particles) {
    if (particles.empty()) throw InvalidInputError("belief: needs at least one particle");
    Belief b;
    const double lw = -std::log(static_cast<double>(particles.size()));
    b.log_weights.assign(particles.size(), lw);
    b.particles = std::move(particles);
    return b;
}

void validate_belief(const Belief& b, double tol) {
    if (b.particles.empty()) throw InvalidInputError("belief: empty particle set");
    if (b.log_weights.size() != b.particles.size())
        throw InvalidInputError("belief: weight/particle length mismatch");
    const int dim = b.particles.front().dim();
    for (const auto& p : b.particles) {
        if (p.dim() != dim) throw InvalidInputError("belief: mixed particle dimensions");
        if (!p.all_finite()) throw InvalidInputError("belief: non-finite particle coordinate");
    }
    for (const double lw : b.log_weights)
        if (!std::isfinite(lw)) throw InvalidInputError("belief: non-finite log weight");
    const double lse = log_sum_exp(b.log_weights);
    if (!(std::abs(lse) <= tol))
        throw InvalidInputError("belief: weights not normalized (|log-sum-exp| = " +
                                std::to_string(std::abs(lse)) + ")");
}

std::vector<double> linear_weights(const Belief& b) {
    std::vector<double> w(b.log_weights.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(b.log_weights[i]);
    return w;
}

StateVec belief_mean(const Belief& b) {
    if (b.particles.empty()) throw InvalidInputError("belief_mean: empty belief");
    StateVec m = StateVec::zeros(b.dim());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double w = std::exp(b.log_weights[i]);
        for (int d = 0; d < m.dim(); ++d) m[d] += w * b.particles[i][d];
    }
    return m;
}

double effective_sample_size(const Belief& b) {
    double sum_sq = 0.0;
    for (const double lw : b.log_weights) {
        const double w = std::exp(lw);
        sum_sq += w * w;
    }
    return 1.0 / sum_sq;
}

}  // namespace cfssm
