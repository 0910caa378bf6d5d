#pragma once

#include <span>
#include <vector>

#include "cfssm/belief.hpp"
#include "cfssm/model.hpp"
#include "cfssm/rng.hpp"

namespace cfssm {
namespace oracle {

/// Probability vector over a finite state set.
using DiscreteBelief = std::vector<double>;

/// Small hidden-Markov instance with one (transition, emission) pair per
/// structure. Everything is enumerable, so filtering is exact; this is the
/// brute-force reference the particle machinery is checked against.
struct DiscreteHMM {
    int n_states = 0;
    int n_symbols = 0;
    // transition[s][i*n_states + j] = P(z'=j | z=i) under structure s
    std::vector<std::vector<double>> transition;
    // emission[s][i*n_symbols + y] = P(y | z=i) under structure s
    std::vector<std::vector<double>> emission;

    int n_structures() const { return static_cast<int>(transition.size()); }
    double trans(int s, int i, int j) const {
        return transition[static_cast<std::size_t>(s)]
                         [static_cast<std::size_t>(i * n_states + j)];
    }
    double emit(int s, int i, int y) const {
        return emission[static_cast<std::size_t>(s)]
                       [static_cast<std::size_t>(i * n_symbols + y)];
    }
};

/// Throws InvalidInputError unless every row is stochastic within 1e-12.
void validate_hmm(const DiscreteHMM& hmm);
void validate_discrete_belief(const DiscreteBelief& b, double tol = 1e-12);

/// One-step predictive distribution b' = b^T * Transition_s.
DiscreteBelief exact_predict(const DiscreteBelief& b, const DiscreteHMM& hmm, int s);

struct ExactUpdate {
    DiscreteBelief posterior;
    double likelihood = 0.0;  // exact innovation likelihood of y
};

/// Bayes correction against symbol y. Throws DegenerateLikelihoodError
/// when the likelihood is exactly zero.
ExactUpdate exact_update(const DiscreteBelief& b_pred, const DiscreteHMM& hmm, int s, int y);

/// predict + update under structure s.
ExactUpdate exact_filter_step(const DiscreteBelief& b, const DiscreteHMM& hmm, int s, int y);

struct ExactIMMState {
    std::vector<double> mode_probs;
    std::vector<DiscreteBelief> beliefs;
};

/// Classical IMM recursion with exact per-mode filters and exact mixture
/// moments (no sampling anywhere).
void exact_imm_step(ExactIMMState& state, const DiscreteHMM& hmm, double self_transition,
                    int y);

struct HullSeparation {
    double distance = 0.0;     // min Euclidean distance from the mixture to a vertex
    bool cf_is_vertex = false; // the score-minimizing update equals some vertex exactly
};

/// Computes every per-structure exact update F_s(b, y), their mix_weights
/// mixture (the IMM-style hull point), and the pure argmin-score selection
/// (delta = 0, lowest id on ties). Returns how far the mixture sits from
/// the nearest vertex and whether the selected update is itself a vertex.
HullSeparation hull_separation_check(const DiscreteBelief& b, const DiscreteHMM& hmm,
                                     std::span<const double> mix_weights, int y);

/// Reproducible random instance: rows drawn from a flat Dirichlet.
DiscreteHMM random_hmm(int n_states, int n_structures, int n_symbols, RngStream& rng);

/// Sample a trajectory of observations under structure s_true.
/// Initial state is uniform over states unless `initial` is given.
std::vector<int> simulate_hmm(const DiscreteHMM& hmm, int s_true, int horizon, RngStream& rng,
                              std::vector<int>* states_out = nullptr,
                              const DiscreteBelief* initial = nullptr);

/// Bridge to the particle machinery: states embedded as real scalars
/// 0.0, 1.0, ..., symbols carried as 1-vector observations.
ModelBank hmm_model_bank(const DiscreteHMM& hmm);

/// Initial particle cloud for the embedded HMM, drawn from `prior`.
Belief hmm_initial_belief(const DiscreteHMM& hmm, const DiscreteBelief& prior, int n_particles,
                          RngStream& rng);

/// Collapse a particle belief over embedded states to state probabilities.
DiscreteBelief particles_to_discrete(const Belief& b, int n_states);

/// Total variation distance 0.5 * sum |p - q|.
double total_variation(const DiscreteBelief& p, const DiscreteBelief& q);

}  // namespace oracle
}  // namespace cfssm
