#include "cfssm/oracle.hpp"

#include <cmath>
#include <limits>

#include "cfssm/errors.hpp"

namespace cfssm {
namespace oracle {

namespace {
void check_rows(const std::vector<double>& mat, int rows, int cols, const char* what) {
    for (int i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (int j = 0; j < cols; ++j) {
            const double v = mat[static_cast<std::size_t>(i * cols + j)];
            if (v < 0.0) throw InvalidInputError(std::string(what) + ": negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw InvalidInputError(std::string(what) + ": row does not sum to 1");
    }
}

int draw_categorical(std::span<const double> probs, RngStream& rng) {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u <= cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}
}  // namespace

void validate_hmm(const DiscreteHMM& hmm) {
    if (hmm.n_states < 1 || hmm.n_states > 8)
        throw InvalidInputError("hmm: state count must be within 1..8");
    if (hmm.n_symbols < 1) throw InvalidInputError("hmm: needs a non-empty alphabet");
    if (hmm.transition.empty() || hmm.transition.size() != hmm.emission.size())
        throw InvalidInputError("hmm: transition/emission structure count mismatch");
    for (int s = 0; s < hmm.n_structures(); ++s) {
        check_rows(hmm.transition[static_cast<std::size_t>(s)], hmm.n_states, hmm.n_states,
                   "hmm transition");
        check_rows(hmm.emission[static_cast<std::size_t>(s)], hmm.n_states, hmm.n_symbols,
                   "hmm emission");
    }
}

void validate_discrete_belief(const DiscreteBelief& b, double tol) {
    double sum = 0.0;
    for (const double p : b) {
        if (p < 0.0) throw InvalidInputError("discrete belief: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol)
        throw InvalidInputError("discrete belief: probabilities do not sum to 1");
}

DiscreteBelief exact_predict(const DiscreteBelief& b, const DiscreteHMM& hmm, int s) {
    DiscreteBelief out(static_cast<std::size_t>(hmm.n_states), 0.0);
    for (int i = 0; i < hmm.n_states; ++i)
        for (int j = 0; j < hmm.n_states; ++j)
            out[static_cast<std::size_t>(j)] += b[static_cast<std::size_t>(i)] * hmm.trans(s, i, j);
    return out;
}

ExactUpdate exact_update(const DiscreteBelief& b_pred, const DiscreteHMM& hmm, int s, int y) {
    ExactUpdate out;
    out.posterior.resize(b_pred.size());
    for (int i = 0; i < hmm.n_states; ++i) {
        out.posterior[static_cast<std::size_t>(i)] =
            b_pred[static_cast<std::size_t>(i)] * hmm.emit(s, i, y);
        out.likelihood += out.posterior[static_cast<std::size_t>(i)];
    }
    if (out.likelihood <= 0.0)
        throw DegenerateLikelihoodError("exact_update: observation has zero likelihood");
    for (double& p : out.posterior) p /= out.likelihood;
    return out;
}

ExactUpdate exact_filter_step(const DiscreteBelief& b, const DiscreteHMM& hmm, int s, int y) {
    return exact_update(exact_predict(b, hmm, s), hmm, s, y);
}

void exact_imm_step(ExactIMMState& state, const DiscreteHMM& hmm, double self_transition,
                    int y) {
    const int n = hmm.n_structures();
    std::vector<double> mu_bar(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double p = (i == j) ? self_transition
                                      : (n == 1 ? 1.0 : (1.0 - self_transition) / (n - 1));
            mu_bar[static_cast<std::size_t>(j)] +=
                p * state.mode_probs[static_cast<std::size_t>(i)];
        }

    std::vector<DiscreteBelief> mixed(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        DiscreteBelief m(static_cast<std::size_t>(hmm.n_states), 0.0);
        for (int i = 0; i < n; ++i) {
            const double p = (i == j) ? self_transition
                                      : (n == 1 ? 1.0 : (1.0 - self_transition) / (n - 1));
            const double w =
                p * state.mode_probs[static_cast<std::size_t>(i)] / mu_bar[static_cast<std::size_t>(j)];
            for (int z = 0; z < hmm.n_states; ++z)
                m[static_cast<std::size_t>(z)] +=
                    w * state.beliefs[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
        }
        mixed[static_cast<std::size_t>(j)] = std::move(m);
    }

    std::vector<double> lik(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        ExactUpdate upd = exact_filter_step(mixed[static_cast<std::size_t>(j)], hmm, j, y);
        lik[static_cast<std::size_t>(j)] = upd.likelihood;
        state.beliefs[static_cast<std::size_t>(j)] = std::move(upd.posterior);
        total += mu_bar[static_cast<std::size_t>(j)] * lik[static_cast<std::size_t>(j)];
    }
    if (total <= 0.0) throw DegenerateLikelihoodError("exact_imm_step: mixture likelihood zero");
    for (int j = 0; j < n; ++j)
        state.mode_probs[static_cast<std::size_t>(j)] =
            mu_bar[static_cast<std::size_t>(j)] * lik[static_cast<std::size_t>(j)] / total;
}

HullSeparation hull_separation_check(const DiscreteBelief& b, const DiscreteHMM& hmm,
                                     std::span<const double> mix_weights, int y) {
    const int n = hmm.n_structures();
    if (static_cast<int>(mix_weights.size()) != n)
        throw InvalidInputError("hull_separation_check: one mix weight per structure required");

    std::vector<DiscreteBelief> vertices(static_cast<std::size_t>(n));
    std::vector<double> score(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        ExactUpdate upd = exact_filter_step(b, hmm, s, y);
        score[static_cast<std::size_t>(s)] = -std::log(upd.likelihood);
        vertices[static_cast<std::size_t>(s)] = std::move(upd.posterior);
    }

    DiscreteBelief mixture(b.size(), 0.0);
    for (int s = 0; s < n; ++s)
        for (std::size_t z = 0; z < b.size(); ++z)
            mixture[z] += mix_weights[static_cast<std::size_t>(s)] *
                          vertices[static_cast<std::size_t>(s)][z];

    int selected = 0;
    for (int s = 1; s < n; ++s)
        if (score[static_cast<std::size_t>(s)] < score[static_cast<std::size_t>(selected)])
            selected = s;

    HullSeparation out;
    out.distance = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
        double d2 = 0.0;
        for (std::size_t z = 0; z < b.size(); ++z) {
            const double d = mixture[z] - vertices[static_cast<std::size_t>(s)][z];
            d2 += d * d;
        }
        out.distance = std::min(out.distance, std::sqrt(d2));
    }
    out.cf_is_vertex = false;
    for (int s = 0; s < n; ++s)
        if (vertices[static_cast<std::size_t>(s)] == vertices[static_cast<std::size_t>(selected)])
            out.cf_is_vertex = true;
    return out;
}

DiscreteHMM random_hmm(int n_states, int n_structures, int n_symbols, RngStream& rng) {
    auto dirichlet_row = [&rng](int cols, std::vector<double>& row, int offset) {
        double sum = 0.0;
        for (int j = 0; j < cols; ++j) {
            // Exp(1) draws normalized per row = flat Dirichlet
            const double g = -std::log(rng.uniform01());
            row[static_cast<std::size_t>(offset + j)] = g;
            sum += g;
        }
        for (int j = 0; j < cols; ++j) row[static_cast<std::size_t>(offset + j)] /= sum;
    };

    DiscreteHMM hmm;
    hmm.n_states = n_states;
    hmm.n_symbols = n_symbols;
    hmm.transition.assign(static_cast<std::size_t>(n_structures),
                          std::vector<double>(static_cast<std::size_t>(n_states * n_states)));
    hmm.emission.assign(static_cast<std::size_t>(n_structures),
                        std::vector<double>(static_cast<std::size_t>(n_states * n_symbols)));
    for (int s = 0; s < n_structures; ++s)
        for (int i = 0; i < n_states; ++i) {
            dirichlet_row(n_states, hmm.transition[static_cast<std::size_t>(s)], i * n_states);
            dirichlet_row(n_symbols, hmm.emission[static_cast<std::size_t>(s)], i * n_symbols);
        }
    validate_hmm(hmm);
    return hmm;
}

std::vector<int> simulate_hmm(const DiscreteHMM& hmm, int s_true, int horizon, RngStream& rng,
                              std::vector<int>* states_out, const DiscreteBelief* initial) {
    DiscreteBelief uniform(static_cast<std::size_t>(hmm.n_states),
                           1.0 / static_cast<double>(hmm.n_states));
    const DiscreteBelief& prior = initial ? *initial : uniform;
    int z = draw_categorical(prior, rng);
    std::vector<int> ys;
    ys.reserve(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
        std::vector<double> row(static_cast<std::size_t>(hmm.n_states));
        for (int j = 0; j < hmm.n_states; ++j)
            row[static_cast<std::size_t>(j)] = hmm.trans(s_true, z, j);
        z = draw_categorical(row, rng);
        if (states_out) states_out->push_back(z);
        std::vector<double> erow(static_cast<std::size_t>(hmm.n_symbols));
        for (int y = 0; y < hmm.n_symbols; ++y)
            erow[static_cast<std::size_t>(y)] = hmm.emit(s_true, z, y);
        ys.push_back(draw_categorical(erow, rng));
    }
    return ys;
}

ModelBank hmm_model_bank(const DiscreteHMM& hmm) {
    ModelBank bank;
    for (int s = 0; s < hmm.n_structures(); ++s) {
        Structure st;
        st.id = s;
        st.label = "hmm_s" + std::to_string(s);
        st.transition.sample = [hmm, s](const StateVec& z, int /*t*/, RngStream& rng) {
            const int state = static_cast<int>(std::lround(z[0]));
            std::vector<double> row(static_cast<std::size_t>(hmm.n_states));
            for (int j = 0; j < hmm.n_states; ++j)
                row[static_cast<std::size_t>(j)] = hmm.trans(s, state, j);
            return StateVec(static_cast<double>(draw_categorical(row, rng)));
        };
        st.observation.log_density = [hmm, s](const Observation& y, const StateVec& z) {
            const int state = static_cast<int>(std::lround(z[0]));
            const double p = hmm.emit(s, state, static_cast<int>(std::lround(y[0])));
            return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
        };
        st.observation.sample = [hmm, s](const StateVec& z, RngStream& rng) {
            const int state = static_cast<int>(std::lround(z[0]));
            std::vector<double> row(static_cast<std::size_t>(hmm.n_symbols));
            for (int y = 0; y < hmm.n_symbols; ++y)
                row[static_cast<std::size_t>(y)] = hmm.emit(s, state, y);
            return Observation{static_cast<double>(draw_categorical(row, rng))};
        };
        bank.structures.push_back(std::move(st));
    }
    return bank;
}

Belief hmm_initial_belief(const DiscreteHMM& hmm, const DiscreteBelief& prior, int n_particles,
                          RngStream& rng) {
    std::vector<StateVec> particles;
    particles.reserve(static_cast<std::size_t>(n_particles));
    for (int i = 0; i < n_particles; ++i)
        particles.emplace_back(static_cast<double>(draw_categorical(prior, rng)));
    (void)hmm;
    return make_uniform_belief(std::move(particles));
}

DiscreteBelief particles_to_discrete(const Belief& b, int n_states) {
    DiscreteBelief out(static_cast<std::size_t>(n_states), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const int state = static_cast<int>(std::lround(b.particles[i][0]));
        out[static_cast<std::size_t>(state)] += std::exp(b.log_weights[i]);
    }
    return out;
}

double total_variation(const DiscreteBelief& p, const DiscreteBelief& q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return 0.5 * acc;
}

}  // namespace oracle
}  // namespace cfssm
