#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "mqd/chain.hpp"
#include "mqd/rng.hpp"
#include "oracles.hpp"

using namespace mqd;

namespace {

chain::SensorModel two_symbol_model(double q, int d1 = 0, int d2 = 0) {
    return chain::SensorModel(
        1, chain::ObservationAlphabet({"a", "b"}),
        chain::TransitionKernel({{0.5, 0.5}, {0.5, 0.5}}),
        chain::TransitionKernel({{0.1, 0.9}, {0.1, 0.9}}), q, 0, d1, d2);
}

} // namespace

// =============================================================================
// Construction invariants
// =============================================================================

TEST_CASE("alphabet rejects duplicates and tiny sizes") {
    CHECK_THROWS_AS(chain::ObservationAlphabet({"a"}), std::invalid_argument);
    CHECK_THROWS_AS(chain::ObservationAlphabet({"a", "a"}),
                    std::invalid_argument);
    CHECK(chain::ObservationAlphabet({"a", "b", "c"}).size() == 3);
}

TEST_CASE("kernel rejects non-stochastic rows") {
    CHECK_THROWS_AS(chain::TransitionKernel({{0.5, 0.6}, {0.5, 0.5}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(chain::TransitionKernel({{1.2, -0.2}, {0.5, 0.5}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(chain::TransitionKernel({{0.5, 0.5}}),
                    std::invalid_argument);
}

TEST_CASE("sensor model validates q and windows") {
    auto alphabet = chain::ObservationAlphabet({"a", "b"});
    auto uniform = chain::TransitionKernel({{0.5, 0.5}, {0.5, 0.5}});
    CHECK_THROWS_AS(chain::SensorModel(1, alphabet, uniform, uniform, 0.0, 0, 0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(chain::SensorModel(1, alphabet, uniform, uniform, 1.0, 0, 0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(chain::SensorModel(1, alphabet, uniform, uniform, 0.5, 5, 0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(chain::SensorModel(1, alphabet, uniform, uniform, 0.5, 0, -1, 0),
                    std::invalid_argument);
}

// =============================================================================
// Prior
// =============================================================================

TEST_CASE("prior pmf matches the geometric form") {
    auto model = two_symbol_model(0.5);
    CHECK(chain::prior_pmf(model, 1) == 0.5);
    CHECK(chain::prior_pmf(model, 3) == 0.125);
    CHECK_THROWS_AS(chain::prior_pmf(model, 0), std::invalid_argument);
}

TEST_CASE("prior pmf telescopes to the cdf") {
    auto model = two_symbol_model(0.2);
    CHECK(chain::prior_pmf(model, 2) == doctest::Approx(0.16).epsilon(1e-15));
    for (long j : {1L, 2L, 5L, 17L}) {
        double sum = 0.0;
        for (long i = 1; i <= j; ++i) sum += chain::prior_pmf(model, i);
        CHECK(std::abs(sum - chain::prior_cdf(model, j)) <= 1e-12);
    }
}

// =============================================================================
// Path probabilities
// =============================================================================

TEST_CASE("path probability of the bare initial state is 1") {
    auto model = two_symbol_model(0.3);
    std::vector<std::size_t> path{0};
    CHECK(chain::path_probability(model, 1, path) == 1.0);
    CHECK(chain::path_probability(model, 7, {}) == 1.0);
}

TEST_CASE("pre == post makes the path law independent of theta") {
    chain::SensorModel model(
        1, chain::ObservationAlphabet({"a", "b"}),
        chain::TransitionKernel({{0.3, 0.7}, {0.6, 0.4}}),
        chain::TransitionKernel({{0.3, 0.7}, {0.6, 0.4}}), 0.4, 0, 0, 0);
    std::vector<std::size_t> path{0, 1, 1, 0};
    const double reference = chain::path_probability(model, 1, path);
    for (long theta : {2L, 3L, 4L, 10L}) {
        CHECK(chain::path_probability(model, theta, path) == reference);
    }
}

TEST_CASE("path probability rejects a wrong start state") {
    auto model = two_symbol_model(0.3);
    std::vector<std::size_t> path{1, 0};
    CHECK_THROWS_AS(chain::path_probability(model, 1, path),
                    std::invalid_argument);
}

TEST_CASE("prior times path probability sums to 1 over all paths") {
    auto model = two_symbol_model(0.3);
    double total = 0.0;
    for (const auto& path : oracles::all_paths(model, 2)) {
        total += oracles::path_marginal(model, path);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("full path laws sum to 1 on bigger alphabets too") {
    chain::SensorModel model(
        2, chain::ObservationAlphabet({"x", "y", "z"}),
        chain::TransitionKernel({{0.2, 0.5, 0.3}, {0.1, 0.8, 0.1}, {0.4, 0.3, 0.3}}),
        chain::TransitionKernel({{0.7, 0.2, 0.1}, {0.5, 0.25, 0.25}, {0.1, 0.1, 0.8}}),
        0.15, 2, 1, 1);
    for (int horizon : {1, 3, 6}) {
        double total = 0.0;
        for (const auto& path : oracles::all_paths(model, horizon)) {
            total += oracles::path_marginal(model, path);
        }
        CHECK(std::abs(total - 1.0) <= 1e-10);
    }
}

// =============================================================================
// Predictive mixture
// =============================================================================

TEST_CASE("marginal step law interpolates the kernels") {
    chain::SensorModel model(
        1, chain::ObservationAlphabet({"a", "b"}),
        chain::TransitionKernel({{0.5, 0.5}, {0.5, 0.5}}),
        chain::TransitionKernel({{0.1, 0.9}, {0.1, 0.9}}), 0.5, 0, 0, 0);
    auto pre = chain::marginal_step_law(model, 0, 0.0);
    CHECK(pre[0] == 0.5);
    auto post = chain::marginal_step_law(model, 0, 1.0);
    CHECK(post[1] == 0.9);
    auto half = chain::marginal_step_law(model, 0, 0.5);
    CHECK(half[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(half[1] == doctest::Approx(0.7).epsilon(1e-15));
}

// =============================================================================
// Sampling
// =============================================================================

TEST_CASE("identical seeds give identical trajectories") {
    auto model = two_symbol_model(0.3);
    auto a = chain::sample_trajectory(model, 50, 1234);
    auto b = chain::sample_trajectory(model, 50, 1234);
    CHECK(a.theta == b.theta);
    CHECK(a.observations == b.observations);
    auto c = chain::sample_trajectory(model, 50, 1235);
    CHECK((a.theta != c.theta || a.observations != c.observations));
}

TEST_CASE("q near 1 makes theta = 1 almost surely") {
    auto model = two_symbol_model(1.0 - 1e-12);
    long ones = 0;
    const long draws = 100000;
    for (long j = 0; j < draws; ++j) {
        auto t = chain::sample_trajectory(model, 1, rng::derive_stream(7, j));
        if (t.theta == 1) ++ones;
    }
    const double fraction = static_cast<double>(ones) / draws;
    CHECK(fraction >= 1.0 - 1e-3);
}

TEST_CASE("sampled path frequencies match enumerated marginals") {
    // pre == post, so the path law is the plain single-kernel chain law.
    chain::SensorModel model(
        1, chain::ObservationAlphabet({"a", "b"}),
        chain::TransitionKernel({{0.7, 0.3}, {0.2, 0.8}}),
        chain::TransitionKernel({{0.7, 0.3}, {0.2, 0.8}}), 0.3, 0, 0, 0);
    const int horizon = 3;
    const long draws = 100000;
    std::map<std::vector<std::size_t>, long> counts;
    for (long j = 0; j < draws; ++j) {
        counts[chain::sample_trajectory(model, horizon,
                                        rng::derive_stream(99, j))
                   .observations] += 1;
    }
    for (const auto& path : oracles::all_paths(model, horizon)) {
        const double expected = oracles::path_marginal(model, path);
        const double observed =
            static_cast<double>(counts[path]) / static_cast<double>(draws);
        const double se =
            std::sqrt(std::max(expected * (1.0 - expected), 1e-12) / draws);
        CHECK(std::abs(observed - expected) <= 3.0 * se + 1e-9);
    }
}

TEST_CASE("theta distribution matches the geometric prior") {
    auto model = two_symbol_model(0.25);
    const long draws = 100000;
    std::map<long, long> counts;
    for (long j = 0; j < draws; ++j) {
        counts[chain::sample_trajectory(model, 1, rng::derive_stream(3, j))
                   .theta] += 1;
    }
    for (long j = 1; j <= 8; ++j) {
        const double expected = chain::prior_pmf(model, j);
        const double observed =
            static_cast<double>(counts[j]) / static_cast<double>(draws);
        const double se = std::sqrt(expected * (1.0 - expected) / draws);
        CHECK(std::abs(observed - expected) <= 3.5 * se);
    }
}
