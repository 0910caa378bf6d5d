#include <doctest.h>

#include <cmath>

#include "cfssm/errors.hpp"
#include "cfssm/oracle.hpp"

using namespace cfssm;
using namespace cfssm::oracle;

namespace {
DiscreteHMM two_state_pair() {
    // structure 0: identity transition; structure 1: full mixing
    DiscreteHMM hmm;
    hmm.n_states = 2;
    hmm.n_symbols = 2;
    hmm.transition = {{1.0, 0.0, 0.0, 1.0}, {0.5, 0.5, 0.5, 0.5}};
    hmm.emission = {{0.9, 0.1, 0.2, 0.8}, {0.6, 0.4, 0.3, 0.7}};
    validate_hmm(hmm);
    return hmm;
}
}  // namespace

TEST_CASE("exact_predict") {
    const DiscreteHMM hmm = two_state_pair();
    SUBCASE("identity transition leaves the belief unchanged") {
        const DiscreteBelief b{0.3, 0.7};
        const DiscreteBelief out = exact_predict(b, hmm, 0);
        CHECK(out[0] == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(out[1] == doctest::Approx(0.7).epsilon(1e-15));
    }
    SUBCASE("point mass reads off the transition row") {
        DiscreteHMM h = two_state_pair();
        h.transition[0] = {0.3, 0.7, 0.4, 0.6};
        const DiscreteBelief out = exact_predict(DiscreteBelief{1.0, 0.0}, h, 0);
        CHECK(out[0] == doctest::Approx(0.3));
        CHECK(out[1] == doctest::Approx(0.7));
    }
    SUBCASE("uniform is stationary under a doubly stochastic transition") {
        const DiscreteBelief out = exact_predict(DiscreteBelief{0.5, 0.5}, hmm, 1);
        CHECK(out[0] == doctest::Approx(0.5));
        CHECK(out[1] == doctest::Approx(0.5));
    }
}

TEST_CASE("exact_update") {
    const DiscreteHMM hmm = two_state_pair();
    SUBCASE("uninformative emission returns the prediction and its mass") {
        DiscreteHMM h = hmm;
        h.emission[0] = {0.4, 0.6, 0.4, 0.6};
        const auto out = exact_update(DiscreteBelief{0.3, 0.7}, h, 0, 0);
        CHECK(out.posterior[0] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(out.likelihood == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("two-line Bayes arithmetic") {
        DiscreteHMM h = hmm;
        h.emission[0] = {0.9, 0.1, 0.1, 0.9};
        const auto out = exact_update(DiscreteBelief{0.5, 0.5}, h, 0, 0);
        CHECK(out.likelihood == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(out.posterior[0] == doctest::Approx(0.9).epsilon(1e-12));
        CHECK(out.posterior[1] == doctest::Approx(0.1).epsilon(1e-12));
    }
    SUBCASE("deterministic emission identifies the state") {
        DiscreteHMM h = hmm;
        h.emission[0] = {1.0, 0.0, 0.0, 1.0};
        const auto out = exact_update(DiscreteBelief{0.5, 0.5}, h, 0, 1);
        CHECK(out.posterior[0] == doctest::Approx(0.0));
        CHECK(out.posterior[1] == doctest::Approx(1.0));
    }
    SUBCASE("zero-likelihood observation is rejected") {
        DiscreteHMM h = hmm;
        h.emission[0] = {1.0, 0.0, 1.0, 0.0};
        CHECK_THROWS_AS(exact_update(DiscreteBelief{0.5, 0.5}, h, 0, 1),
                        DegenerateLikelihoodError);
    }
}

TEST_CASE("exact filter chain preserves the simplex") {
    const RngStreams streams(12);
    RngStream rng = streams.stream(StreamPurpose::data, 0);
    const DiscreteHMM hmm = random_hmm(4, 2, 3, rng);
    const auto ys = simulate_hmm(hmm, 1, 50, rng);
    DiscreteBelief b(4, 0.25);
    for (int t = 0; t < 50; ++t) {
        b = exact_filter_step(b, hmm, 1, ys[static_cast<std::size_t>(t)]).posterior;
        CHECK_NOTHROW(validate_discrete_belief(b, 1e-12));
    }
}

TEST_CASE("hull_separation_check") {
    SUBCASE("identical structures collapse the hull") {
        DiscreteHMM hmm = two_state_pair();
        hmm.transition[1] = hmm.transition[0];
        hmm.emission[1] = hmm.emission[0];
        const auto hs =
            hull_separation_check(DiscreteBelief{0.5, 0.5}, hmm, std::vector<double>{0.5, 0.5}, 0);
        CHECK(hs.distance == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(hs.cf_is_vertex);
    }
    SUBCASE("hand-built instance separates by the expected distance") {
        const DiscreteHMM hmm = two_state_pair();
        const DiscreteBelief b{0.5, 0.5};
        const int y = 0;
        // explicit arithmetic, independent of the library path:
        // F0: predict (0.5,0.5), emit col (0.9,0.2) -> l=0.55, post (9/11, 2/11)
        // F1: predict (0.5,0.5), emit col (0.6,0.3) -> l=0.45, post (2/3, 1/3)
        const double f0_0 = 0.45 / 0.55, f0_1 = 0.10 / 0.55;
        const double f1_0 = 0.30 / 0.45, f1_1 = 0.15 / 0.45;
        const double mix_0 = 0.5 * (f0_0 + f1_0), mix_1 = 0.5 * (f0_1 + f1_1);
        const double expected =
            std::sqrt((mix_0 - f0_0) * (mix_0 - f0_0) + (mix_1 - f0_1) * (mix_1 - f0_1));

        const auto hs = hull_separation_check(b, hmm, std::vector<double>{0.5, 0.5}, y);
        CHECK(hs.distance == doctest::Approx(expected).epsilon(1e-12));
        CHECK(hs.distance > 0.0);
        CHECK(hs.cf_is_vertex);
        CHECK(f1_0 + f1_1 == doctest::Approx(1.0));  // sanity on the hand arithmetic
    }
    SUBCASE("indicator weights land on a vertex") {
        const DiscreteHMM hmm = two_state_pair();
        const auto hs = hull_separation_check(DiscreteBelief{0.5, 0.5}, hmm,
                                              std::vector<double>{1.0, 0.0}, 0);
        CHECK(hs.distance == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(hs.cf_is_vertex);
    }
}

TEST_CASE("random_hmm draws valid stochastic instances") {
    const RngStreams streams(3);
    for (int k = 0; k < 10; ++k) {
        RngStream rng = streams.stream(StreamPurpose::data, static_cast<std::uint64_t>(k));
        CHECK_NOTHROW(random_hmm(2 + k % 7, 1 + k % 3, 2 + k % 4, rng));
    }
    RngStream a = streams.stream(StreamPurpose::data, 1);
    RngStream b = streams.stream(StreamPurpose::data, 1);
    const DiscreteHMM h1 = random_hmm(3, 2, 3, a);
    const DiscreteHMM h2 = random_hmm(3, 2, 3, b);
    CHECK(h1.transition == h2.transition);  // reproducible instance generation
    CHECK(h1.emission == h2.emission);
}

TEST_CASE("hmm validation rejects malformed instances") {
    DiscreteHMM bad = two_state_pair();
    bad.transition[0][0] = 0.8;  // row no longer sums to 1
    CHECK_THROWS_AS(validate_hmm(bad), InvalidInputError);
    DiscreteHMM big = two_state_pair();
    big.n_states = 9;
    CHECK_THROWS_AS(validate_hmm(big), InvalidInputError);
}

TEST_CASE("particles_to_discrete aggregates weight per embedded state") {
    Belief b;
    b.particles = {StateVec(0.0), StateVec(1.0), StateVec(1.0)};
    b.log_weights = {std::log(0.5), std::log(0.25), std::log(0.25)};
    const DiscreteBelief d = particles_to_discrete(b, 2);
    CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(total_variation(d, DiscreteBelief{0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(total_variation(DiscreteBelief{1.0, 0.0}, DiscreteBelief{0.0, 1.0}) ==
          doctest::Approx(1.0));
}
