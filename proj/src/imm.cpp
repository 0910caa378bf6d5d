#include "cfssm/imm.hpp"

#include <cmath>
#include <limits>

#include "cfssm/errors.hpp"
#include "cfssm/numerics.hpp"

namespace cfssm {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// Systematic draw of n_out indices from arbitrary linear weights
/// (same single-offset scheme as the in-filter resampler).
std::vector<std::size_t> systematic_indices(const std::vector<double>& weights,
                                            std::size_t n_out, RngStream& rng) {
    const double step = 1.0 / static_cast<double>(n_out);
    double u = rng.uniform01() * step;
    std::vector<std::size_t> idx(n_out);
    std::size_t i = 0;
    double cum = weights[0];
    for (std::size_t j = 0; j < n_out; ++j) {
        while (u > cum && i + 1 < weights.size()) cum += weights[++i];
        idx[j] = i;
        u += step;
    }
    return idx;
}
}  // namespace

void IMMConfig::validate() const {
    // 1.0 makes the chain absorbing, reducing to fixed-structure filtering
    if (!(self_transition > 0.0 && self_transition <= 1.0))
        throw InvalidParameterError("imm: self-transition probability must lie in (0, 1]");
}

IMMState make_imm_state(int n_modes, const Belief& initial) {
    if (n_modes < 1) throw InvalidInputError("imm: needs at least one mode");
    IMMState st;
    st.mode_probs.assign(static_cast<std::size_t>(n_modes), 1.0 / n_modes);
    st.beliefs.assign(static_cast<std::size_t>(n_modes), initial);
    return st;
}

double mode_transition_prob(int from, int to, int n_modes, double self_transition) {
    if (n_modes == 1) return 1.0;
    return from == to ? self_transition : (1.0 - self_transition) / (n_modes - 1);
}

std::vector<double> predicted_mode_probs(std::span<const double> mode_probs,
                                         double self_transition) {
    const int n = static_cast<int>(mode_probs.size());
    std::vector<double> out(mode_probs.size(), 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out[static_cast<std::size_t>(j)] +=
                mode_transition_prob(i, j, n, self_transition) *
                mode_probs[static_cast<std::size_t>(i)];
    return out;
}

std::vector<double> reweighted_mode_probs(std::span<const double> predicted_probs,
                                          std::span<const double> mode_logliks) {
    std::vector<double> lw(predicted_probs.size());
    for (std::size_t j = 0; j < lw.size(); ++j)
        lw[j] = (predicted_probs[j] > 0.0 ? std::log(predicted_probs[j]) : neg_inf) +
                mode_logliks[j];
    NormalizedLogWeights norm = normalize_log_weights(lw);
    std::vector<double> out(lw.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::exp(norm.log_weights[j]);
    return out;
}

IMMStepResult imm_step(IMMState& state, const ModelBank& bank, const IMMConfig& cfg, int t,
                       const Observation& y, std::span<RngStream> belief_streams,
                       std::span<RngStream> mix_streams) {
    cfg.validate();
    const int n = state.modes();
    if (bank.size() != n || static_cast<int>(belief_streams.size()) != n ||
        static_cast<int>(mix_streams.size()) != n)
        throw InvalidInputError("imm_step: bank/state/stream size mismatch");

    const std::vector<double> mu_bar =
        predicted_mode_probs(state.mode_probs, cfg.self_transition);

    // Mixing: each target mode resamples its input cloud from the pooled
    // weighted union of all mode beliefs.
    std::vector<Belief> mixed(static_cast<std::size_t>(n));
    std::vector<StateVec> pool_particles;
    std::vector<double> pool_weights;
    for (int j = 0; j < n; ++j) {
        if (mu_bar[static_cast<std::size_t>(j)] == 0.0) {
            // unreachable mode (absorbing chain): carry its belief forward
            mixed[static_cast<std::size_t>(j)] = state.beliefs[static_cast<std::size_t>(j)];
            continue;
        }
        pool_particles.clear();
        pool_weights.clear();
        for (int i = 0; i < n; ++i) {
            const Belief& bi = state.beliefs[static_cast<std::size_t>(i)];
            const double mix_mass = mode_transition_prob(i, j, n, cfg.self_transition) *
                                    state.mode_probs[static_cast<std::size_t>(i)] /
                                    mu_bar[static_cast<std::size_t>(j)];
            for (std::size_t k = 0; k < bi.size(); ++k) {
                pool_particles.push_back(bi.particles[k]);
                pool_weights.push_back(mix_mass * std::exp(bi.log_weights[k]));
            }
        }
        const std::size_t n_out = state.beliefs[static_cast<std::size_t>(j)].size();
        const std::vector<std::size_t> idx =
            systematic_indices(pool_weights, n_out, mix_streams[static_cast<std::size_t>(j)]);
        std::vector<StateVec> particles(n_out);
        for (std::size_t k = 0; k < n_out; ++k) particles[k] = pool_particles[idx[k]];
        mixed[static_cast<std::size_t>(j)] = make_uniform_belief(std::move(particles));
    }

    IMMStepResult out;
    out.mode_logliks.assign(static_cast<std::size_t>(n), neg_inf);
    for (int j = 0; j < n; ++j) {
        try {
            StepOutput step = pf_step(mixed[static_cast<std::size_t>(j)], bank[j], t, y,
                                      belief_streams[static_cast<std::size_t>(j)]);
            out.mode_logliks[static_cast<std::size_t>(j)] = step.innovation_loglik;
            state.beliefs[static_cast<std::size_t>(j)] = std::move(step.posterior);
        } catch (const DegenerateLikelihoodError&) {
            // Dead mode: zero posterior probability, belief frozen at the
            // mixed input until the chain revives it.
            state.beliefs[static_cast<std::size_t>(j)] =
                std::move(mixed[static_cast<std::size_t>(j)]);
        }
    }

    std::vector<double> lw(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        lw[static_cast<std::size_t>(j)] = std::log(mu_bar[static_cast<std::size_t>(j)]) +
                                          out.mode_logliks[static_cast<std::size_t>(j)];
    out.mixture_loglik = log_sum_exp(lw);
    state.mode_probs = reweighted_mode_probs(mu_bar, out.mode_logliks);
    return out;
}

StateVec imm_estimate(const IMMState& state) {
    StateVec est = StateVec::zeros(state.beliefs.front().dim());
    for (int j = 0; j < state.modes(); ++j) {
        const StateVec m = belief_mean(state.beliefs[static_cast<std::size_t>(j)]);
        for (int d = 0; d < est.dim(); ++d)
            est[d] += state.mode_probs[static_cast<std::size_t>(j)] * m[d];
    }
    return est;
}

}  // namespace cfssm
