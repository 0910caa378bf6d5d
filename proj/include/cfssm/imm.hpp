#pragma once

#include <span>
#include <vector>

#include "cfssm/pf.hpp"

namespace cfssm {

/// Markov mode chain: self-transition probability on the diagonal, the
/// remaining mass split uniformly over the other modes.
struct IMMConfig {
    double self_transition = 0.95;  // in (0, 1)

    void validate() const;
};

/// Mode probabilities plus one particle belief per structure.
struct IMMState {
    std::vector<double> mode_probs;
    std::vector<Belief> beliefs;

    int modes() const { return static_cast<int>(mode_probs.size()); }
};

/// Uniform mode prior, every mode starting from the same particle cloud.
IMMState make_imm_state(int n_modes, const Belief& initial);

/// P[from -> to] of the mode chain.
double mode_transition_prob(int from, int to, int n_modes, double self_transition);

/// Predicted mode probabilities mu_bar(j) = sum_i P[i->j] mu(i).
std::vector<double> predicted_mode_probs(std::span<const double> mode_probs,
                                         double self_transition);

/// Posterior mode probabilities: mu'(j) proportional to mu_bar(j) * l_j,
/// computed in the log domain. Throws DegenerateLikelihoodError when the
/// mixture likelihood vanishes.
std::vector<double> reweighted_mode_probs(std::span<const double> predicted_probs,
                                          std::span<const double> mode_logliks);

struct IMMStepResult {
    std::vector<double> mode_logliks;  // per-mode innovation estimates
    double mixture_loglik = 0.0;       // log sum_j mu_bar(j) * l_j
};

/// Classical particle IMM step: (1) Markov mixing, realized for each target
/// mode by systematically resampling N particles from the pooled weighted
/// union of all mode beliefs; (2) one bootstrap step per mode; (3) mode
/// probability reweighting by the per-mode innovation likelihoods.
/// Each mode owns one belief stream and one mixing stream.
IMMStepResult imm_step(IMMState& state, const ModelBank& bank, const IMMConfig& cfg, int t,
                       const Observation& y, std::span<RngStream> belief_streams,
                       std::span<RngStream> mix_streams);

/// Probability-weighted fusion of the per-mode posterior means.
StateVec imm_estimate(const IMMState& state);

}  // namespace cfssm
