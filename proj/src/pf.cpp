#include "cfssm/pf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cfssm/errors.hpp"
#include "cfssm/numerics.hpp"

namespace cfssm {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();

std::vector<double> observation_loglik(const PredictedParticles& pred, const Structure& s,
                                       const Observation& y) {
    std::vector<double> ll(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        ll[i] = s.observation.log_density(y, pred.particles[i]);
    return ll;
}

Belief reweight(const PredictedParticles& pred, const std::vector<double>& loglik,
                double* log_normalizer) {
    std::vector<double> lw(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) lw[i] = pred.log_weights[i] + loglik[i];
    NormalizedLogWeights norm = normalize_log_weights(lw);
    if (log_normalizer) *log_normalizer = norm.log_normalizer;
    Belief out;
    out.particles = pred.particles;
    out.log_weights = std::move(norm.log_weights);
    return out;
}
}  // namespace

PredictedParticles predict(const Belief& b, const Structure& s, int t, RngStream& rng) {
    PredictedParticles out;
    out.particles.resize(b.size());
    out.log_weights = b.log_weights;
    for (std::size_t i = 0; i < b.size(); ++i) {
        out.particles[i] = s.transition.sample(b.particles[i], t, rng);
        if (!out.particles[i].all_finite())
            throw NumericOverflowError(
                "predict: structure '" + s.label + "' produced a non-finite state", i);
    }
    return out;
}

double innovation_log_likelihood(const PredictedParticles& pred, const Structure& s,
                                 const Observation& y) {
    if (pred.size() == 0) throw InvalidInputError("innovation_log_likelihood: empty prediction");
    std::vector<double> terms(pred.size());
    const std::vector<double> ll = observation_loglik(pred, s, y);
    for (std::size_t i = 0; i < pred.size(); ++i) terms[i] = pred.log_weights[i] + ll[i];
    const double lse = log_sum_exp(terms);
    if (lse == neg_inf)
        throw DegenerateLikelihoodError(
            "innovation_log_likelihood: zero likelihood under structure '" + s.label + "'");
    return lse;
}

Belief bayes_update(const PredictedParticles& pred, const Structure& s, const Observation& y) {
    if (pred.size() == 0) throw InvalidInputError("bayes_update: empty prediction");
    return reweight(pred, observation_loglik(pred, s, y), nullptr);
}

Belief resample_systematic(const Belief& b, RngStream& rng) {
    const std::size_t n = b.size();
    const std::vector<double> w = linear_weights(b);
    const double step = 1.0 / static_cast<double>(n);
    double u = rng.uniform01() * step;

    Belief out;
    out.particles.resize(n);
    out.log_weights.assign(n, -std::log(static_cast<double>(n)));
    std::size_t i = 0;
    double cum = w[0];
    for (std::size_t j = 0; j < n; ++j) {
        while (u > cum && i + 1 < n) cum += w[++i];
        out.particles[j] = b.particles[i];
        u += step;
    }
    return out;
}

StepOutput pf_step(const Belief& b, const Structure& s, int t, const Observation& y,
                   RngStream& rng) {
    const PredictedParticles pred = predict(b, s, t, rng);
    // One pass over the observation densities serves both the innovation
    // estimate and the Bayes reweighting; the result is identical to
    // running innovation_log_likelihood and bayes_update back to back.
    const std::vector<double> ll = observation_loglik(pred, s, y);
    StepOutput out;
    Belief reweighted = reweight(pred, ll, &out.innovation_loglik);
    out.ess_before_resample = effective_sample_size(reweighted);
    out.posterior = resample_systematic(reweighted, rng);
    validate_belief(out.posterior);
    return out;
}

}  // namespace cfssm
