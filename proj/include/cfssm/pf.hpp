#pragma once

#include <vector>

#include "cfssm/belief.hpp"
#include "cfssm/model.hpp"

namespace cfssm {

/// One-step predictive particle set: particles pushed through the
/// transition model, weights inherited unchanged from the source belief.
struct PredictedParticles {
    std::vector<StateVec> particles;
    std::vector<double> log_weights;

    std::size_t size() const { return particles.size(); }
};

struct StepOutput {
    Belief posterior;            // normalized, resampled
    double innovation_loglik;    // log of the marginal likelihood estimate
    double ess_before_resample;  // ESS of the reweighted (pre-resampling) belief
};

/// Propagate every particle through s.transition at time t. Weights carry
/// over. Throws NumericOverflowError (with the particle index) if a sampled
/// state is non-finite.
PredictedParticles predict(const Belief& b, const Structure& s, int t, RngStream& rng);

/// Monte-Carlo estimate of the innovation likelihood:
/// log sum_i w_i * p(y | z_i), computed in the log domain.
/// Throws DegenerateLikelihoodError when every particle has zero likelihood.
double innovation_log_likelihood(const PredictedParticles& pred, const Structure& s,
                                 const Observation& y);

/// Bayes correction: new log weight = old log weight + observation
/// log-density, then normalized. Particles unchanged.
Belief bayes_update(const PredictedParticles& pred, const Structure& s, const Observation& y);

/// Systematic resampling with a single uniform offset u0 in [0, 1/N).
/// Output weights are uniform; copy counts satisfy
/// floor(N w_i) <= k_i <= ceil(N w_i).
Belief resample_systematic(const Belief& b, RngStream& rng);

/// Full bootstrap step under structure s: predict, score, reweight,
/// resample (resampling happens every step). Equals the composition of the
/// four operations above, draw for draw.
StepOutput pf_step(const Belief& b, const Structure& s, int t, const Observation& y,
                   RngStream& rng);

}  // namespace cfssm
