#include <doctest.h>

#include <cmath>

#include "cfssm/errors.hpp"
#include "cfssm/imm.hpp"
#include "cfssm/numerics.hpp"
#include "cfssm/oracle.hpp"

using namespace cfssm;

namespace {
ModelBank drifting_bank(int n_modes) {
    ModelBank bank;
    for (int s = 0; s < n_modes; ++s) {
        Structure st;
        st.id = s;
        st.label = "drift" + std::to_string(s);
        const double drift = -1.0 + 2.0 * s;
        st.transition.sample = [drift](const StateVec& z, int, RngStream& rng) {
            return StateVec(z[0] + drift + rng.normal());
        };
        st.observation.log_density = [](const Observation& y, const StateVec& z) {
            return gaussian_logpdf(y[0], z[0], 1.0);
        };
        st.observation.sample = [](const StateVec& z, RngStream& rng) {
            return Observation{rng.normal(z[0], 1.0)};
        };
        bank.structures.push_back(std::move(st));
    }
    return bank;
}

Belief cloud64(const RngStreams& streams) {
    RngStream init = streams.stream(StreamPurpose::init, 0);
    std::vector<StateVec> cloud;
    for (int i = 0; i < 64; ++i) cloud.push_back(StateVec(init.normal()));
    return make_uniform_belief(cloud);
}
}  // namespace

TEST_CASE("imm config validation") {
    const IMMConfig zero{0.0}, above{1.2}, typical{0.95}, absorbing{1.0};
    CHECK_THROWS_AS(zero.validate(), InvalidParameterError);
    CHECK_THROWS_AS(above.validate(), InvalidParameterError);
    CHECK_NOTHROW(typical.validate());
    CHECK_NOTHROW(absorbing.validate());  // absorbing chain is allowed
}

TEST_CASE("mode transition probabilities form stochastic rows") {
    for (const double p : {0.5, 0.9, 0.99})
        for (const int n : {1, 2, 4}) {
            for (int i = 0; i < n; ++i) {
                double row = 0.0;
                for (int j = 0; j < n; ++j) row += mode_transition_prob(i, j, n, p);
                CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
}

TEST_CASE("predicted and reweighted mode probabilities") {
    const std::vector<double> mu{0.7, 0.3};
    const auto mu_bar = predicted_mode_probs(mu, 0.9);
    CHECK(mu_bar[0] == doctest::Approx(0.9 * 0.7 + 0.1 * 0.3).epsilon(1e-14));
    CHECK(mu_bar[1] == doctest::Approx(0.1 * 0.7 + 0.9 * 0.3).epsilon(1e-14));

    const std::vector<double> loglik{std::log(0.2), std::log(0.6)};
    const auto post = reweighted_mode_probs(mu_bar, loglik);
    const double z = mu_bar[0] * 0.2 + mu_bar[1] * 0.6;
    CHECK(post[0] == doctest::Approx(mu_bar[0] * 0.2 / z).epsilon(1e-12));
    CHECK(post[0] + post[1] == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> dead{-std::numeric_limits<double>::infinity(),
                                   -std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(reweighted_mode_probs(mu_bar, dead), DegenerateLikelihoodError);
}

TEST_CASE("imm_estimate fuses mode means by probability") {
    IMMState st;
    st.mode_probs = {1.0, 0.0};
    st.beliefs = {make_uniform_belief({StateVec(2.0)}), make_uniform_belief({StateVec(4.0)})};
    CHECK(imm_estimate(st)[0] == doctest::Approx(2.0));
    st.mode_probs = {0.5, 0.5};
    CHECK(imm_estimate(st)[0] == doctest::Approx(3.0));
    st.mode_probs = {0.9, 0.1};
    st.beliefs = {make_uniform_belief({StateVec(0.0)}), make_uniform_belief({StateVec(10.0)})};
    CHECK(imm_estimate(st)[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-mode imm reduces to the fixed-structure filter bitwise") {
    const RngStreams streams(7);
    const ModelBank bank = drifting_bank(1);
    const Belief b0 = cloud64(streams);

    IMMState st = make_imm_state(1, b0);
    std::vector<RngStream> belief{streams.stream(StreamPurpose::belief, 0, 0)};
    std::vector<RngStream> mix{streams.stream(StreamPurpose::mix, 0, 0)};

    Belief fixed = b0;
    RngStream fixed_stream = streams.stream(StreamPurpose::belief, 0, 0);

    const IMMConfig cfg{0.95};
    for (int t = 0; t < 20; ++t) {
        const Observation y{0.5 * t};
        const IMMStepResult res = imm_step(st, bank, cfg, t, y, belief, mix);
        const StepOutput ref = pf_step(fixed, bank[0], t, y, fixed_stream);
        fixed = ref.posterior;
        CHECK(st.mode_probs[0] == 1.0);
        CHECK(res.mode_logliks[0] == ref.innovation_loglik);
        for (std::size_t i = 0; i < fixed.size(); ++i)
            CHECK(st.beliefs[0].particles[i] == fixed.particles[i]);
    }
}

TEST_CASE("absorbing chain with a degenerate prior stays on one mode") {
    const RngStreams streams(8);
    const ModelBank bank = drifting_bank(2);
    const Belief b0 = cloud64(streams);

    IMMState st = make_imm_state(2, b0);
    st.mode_probs = {1.0, 0.0};  // indicator on mode 0
    std::vector<RngStream> belief{streams.stream(StreamPurpose::belief, 0, 0),
                                  streams.stream(StreamPurpose::belief, 0, 1)};
    std::vector<RngStream> mix{streams.stream(StreamPurpose::mix, 0, 0),
                               streams.stream(StreamPurpose::mix, 0, 1)};

    Belief fixed = b0;
    RngStream fixed_stream = streams.stream(StreamPurpose::belief, 0, 0);

    const IMMConfig cfg{1.0};
    for (int t = 0; t < 15; ++t) {
        const Observation y{-0.2 * t};
        imm_step(st, bank, cfg, t, y, belief, mix);
        const StepOutput ref = pf_step(fixed, bank[0], t, y, fixed_stream);
        fixed = ref.posterior;
        CHECK(st.mode_probs[0] == doctest::Approx(1.0).epsilon(1e-15));
        for (std::size_t i = 0; i < fixed.size(); ++i)
            CHECK(st.beliefs[0].particles[i] == fixed.particles[i]);
    }
}

TEST_CASE("mode probabilities follow the exact recursion when fed exact likelihoods") {
    // The mu arithmetic (Markov prediction + likelihood reweighting) against
    // an independently coded exact recursion on a discrete instance.
    const RngStreams streams(21);
    RngStream mk = streams.stream(StreamPurpose::data, 0);
    const auto hmm = oracle::random_hmm(3, 2, 4, mk);
    const auto ys = oracle::simulate_hmm(hmm, 0, 25, mk);
    const double p_self = 0.9;

    oracle::ExactIMMState exact;
    exact.mode_probs = {0.5, 0.5};
    exact.beliefs.assign(2, oracle::DiscreteBelief(3, 1.0 / 3.0));

    std::vector<double> mu{0.5, 0.5};
    std::vector<oracle::DiscreteBelief> beliefs(2, oracle::DiscreteBelief(3, 1.0 / 3.0));

    for (int t = 0; t < 25; ++t) {
        const int y = ys[static_cast<std::size_t>(t)];
        // production-side mu update on exact per-mode quantities
        const auto mu_bar = predicted_mode_probs(mu, p_self);
        std::vector<oracle::DiscreteBelief> mixed(2, oracle::DiscreteBelief(3, 0.0));
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i) {
                const double w = mode_transition_prob(i, j, 2, p_self) *
                                 mu[static_cast<std::size_t>(i)] /
                                 mu_bar[static_cast<std::size_t>(j)];
                for (int z = 0; z < 3; ++z)
                    mixed[static_cast<std::size_t>(j)][static_cast<std::size_t>(z)] +=
                        w * beliefs[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
            }
        std::vector<double> loglik(2);
        for (int j = 0; j < 2; ++j) {
            const auto upd = oracle::exact_filter_step(mixed[static_cast<std::size_t>(j)], hmm,
                                                       j, y);
            loglik[static_cast<std::size_t>(j)] = std::log(upd.likelihood);
            beliefs[static_cast<std::size_t>(j)] = upd.posterior;
        }
        mu = reweighted_mode_probs(mu_bar, loglik);

        oracle::exact_imm_step(exact, hmm, p_self, y);
        CHECK(mu[0] == doctest::Approx(exact.mode_probs[0]).epsilon(1e-6));
        CHECK(mu[1] == doctest::Approx(exact.mode_probs[1]).epsilon(1e-6));
    }
}

TEST_CASE("fused estimate stays in the hull of mode means") {
    const RngStreams streams(33);
    const ModelBank bank = drifting_bank(2);
    IMMState st = make_imm_state(2, cloud64(streams));
    std::vector<RngStream> belief{streams.stream(StreamPurpose::belief, 0, 0),
                                  streams.stream(StreamPurpose::belief, 0, 1)};
    std::vector<RngStream> mix{streams.stream(StreamPurpose::mix, 0, 0),
                               streams.stream(StreamPurpose::mix, 0, 1)};
    RngStream data = streams.stream(StreamPurpose::data, 0);
    const IMMConfig cfg{0.9};
    for (int t = 0; t < 60; ++t) {
        const Observation y{data.normal(0.1 * t, 1.0)};
        imm_step(st, bank, cfg, t, y, belief, mix);
        double mu_sum = 0.0;
        for (const double m : st.mode_probs) mu_sum += m;
        CHECK(mu_sum == doctest::Approx(1.0).epsilon(1e-9));
        const double m0 = belief_mean(st.beliefs[0])[0];
        const double m1 = belief_mean(st.beliefs[1])[0];
        const double fused = imm_estimate(st)[0];
        CHECK(fused >= std::min(m0, m1) - 1e-12);
        CHECK(fused <= std::max(m0, m1) + 1e-12);
    }
}
