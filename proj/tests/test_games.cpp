#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mqd/games.hpp"
#include "mqd/rng.hpp"
#include "oracles.hpp"

using namespace mqd;
using games::Coalition;

namespace {

std::vector<bool> votes_from_mask(int p, unsigned mask) {
    std::vector<bool> votes(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) votes[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
    return votes;
}

games::SimpleGame majority3() { return games::make_weighted({1, 1, 1}, 2); }

} // namespace

// =============================================================================
// Axiom validation
// =============================================================================

TEST_CASE("majority of three is a valid game") {
    auto report = games::validate(3, {0b011, 0b101, 0b110, 0b111});
    CHECK(report.ok);
    CHECK(report.violations.empty());
}

TEST_CASE("missing grand coalition violates axiom 1") {
    auto report = games::validate(3, {0b011});
    CHECK_FALSE(report.ok);
    bool found = false;
    for (const auto& v : report.violations) found |= (v.axiom == 1);
    CHECK(found);
    CHECK_THROWS_AS(games::SimpleGame(3, {0b011}), std::invalid_argument);
}

TEST_CASE("winning empty coalition violates axiom 2") {
    auto report = games::validate(2, {0b00, 0b11});
    CHECK_FALSE(report.ok);
    CHECK(report.violations.front().axiom == 2);
}

TEST_CASE("monotonicity violations report the offending pair") {
    // {1} wins but {1,2} loses.
    auto report = games::validate(3, {0b001, 0b111});
    CHECK_FALSE(report.ok);
    bool found = false;
    for (const auto& v : report.violations) {
        if (v.axiom == 3 && v.subset == 0b001 && v.superset == 0b011) {
            found = true;
        }
    }
    CHECK(found);
}

// =============================================================================
// Aggregation
// =============================================================================

TEST_CASE("majority aggregation fires on any two yes votes") {
    auto game = majority3();
    CHECK(games::aggregate(game, {true, true, false}));
    CHECK_FALSE(games::aggregate(game, {true, false, false}));
    CHECK_FALSE(games::aggregate(game, {false, false, false}));
}

TEST_CASE("unanimity needs everyone") {
    auto game = games::make_weighted({1, 1, 1}, 3);
    CHECK_FALSE(games::aggregate(game, {true, true, false}));
    CHECK(games::aggregate(game, {true, true, true}));
}

TEST_CASE("aggregate matches the sum-of-products form everywhere") {
    for (int p = 1; p <= 4; ++p) {
        for (const auto& winning : oracles::all_valid_games(p)) {
            games::SimpleGame game(p, winning);
            for (unsigned mask = 0; mask < (1u << p); ++mask) {
                auto votes = votes_from_mask(p, mask);
                const int sop = oracles::aggregate_sum_of_products(game, votes);
                CHECK((sop == 0 || sop == 1));
                CHECK(games::aggregate(game, votes) == (sop == 1));
            }
        }
    }
}

TEST_CASE("raising a vote never turns the alarm off") {
    for (int p = 1; p <= 4; ++p) {
        for (const auto& winning : oracles::all_valid_games(p)) {
            games::SimpleGame game(p, winning);
            for (unsigned mask = 0; mask < (1u << p); ++mask) {
                if (!games::aggregate_mask(game, mask)) continue;
                for (int i = 0; i < p; ++i) {
                    CHECK(games::aggregate_mask(game, mask | (1u << i)));
                }
            }
        }
    }
}

// =============================================================================
// Decomposition identity
// =============================================================================

TEST_CASE("dictator decomposition pins both branches") {
    games::SimpleGame dictator(3, {0b001, 0b011, 0b101, 0b111});
    auto [with, without] = games::decompose_check(dictator, 0, {false, true, false});
    CHECK(with);
    CHECK_FALSE(without);
}

TEST_CASE("dummy players do not matter") {
    // Player 2 is a dummy: winning iff player 0 participates.
    games::SimpleGame game(2, {0b01, 0b11});
    for (unsigned mask = 0; mask < 4; ++mask) {
        auto [with, without] = games::decompose_check(game, 1,
                                                      votes_from_mask(2, mask));
        CHECK(with == without);
    }
}

TEST_CASE("boolean decomposition is exact for every small game") {
    for (int p = 1; p <= 4; ++p) {
        for (const auto& winning : oracles::all_valid_games(p)) {
            games::SimpleGame game(p, winning);
            for (unsigned mask = 0; mask < (1u << p); ++mask) {
                auto votes = votes_from_mask(p, mask);
                const bool direct = games::aggregate(game, votes);
                for (int i = 0; i < p; ++i) {
                    auto [with, without] = games::decompose_check(game, i, votes);
                    const bool xi = votes[static_cast<std::size_t>(i)];
                    CHECK(direct == (xi ? with : without));
                }
            }
        }
    }
}

// =============================================================================
// Weighted construction
// =============================================================================

TEST_CASE("equal weights quota two is the majority game") {
    auto game = majority3();
    CHECK(game.winning_coalitions() ==
          std::vector<Coalition>{0b011, 0b101, 0b110, 0b111});
}

TEST_CASE("weighted game carves the right families") {
    auto game = games::make_weighted({3, 2, 1}, 4);
    CHECK(game.is_winning(0b011));      // {1,2}: weight 5
    CHECK(game.is_winning(0b101));      // {1,3}: weight 4
    CHECK_FALSE(game.is_winning(0b110)); // {2,3}: weight 3
}

TEST_CASE("single player weighted game is the identity rule") {
    auto game = games::make_weighted({1}, 1);
    CHECK(game.player_count() == 1);
    CHECK(games::aggregate(game, {true}));
    CHECK_FALSE(games::aggregate(game, {false}));
}

TEST_CASE("unattainable quotas are rejected") {
    CHECK_THROWS_AS(games::make_weighted({1, 1}, 3), std::invalid_argument);
    CHECK_THROWS_AS(games::make_weighted({1, 1}, 0), std::invalid_argument);
}

// =============================================================================
// Set-valued aggregation
// =============================================================================

TEST_CASE("full events aggregate to the full set") {
    auto game = majority3();
    std::vector<std::vector<bool>> events(3, std::vector<bool>(4, true));
    auto result = games::event_aggregate(game, events);
    CHECK(result == std::vector<bool>(4, true));
}

TEST_CASE("identity game passes the event through") {
    auto game = games::make_weighted({1}, 1);
    std::vector<std::vector<bool>> events{{true, false, true, false}};
    CHECK(games::event_aggregate(game, events) == events[0]);
}

TEST_CASE("pointwise majority table") {
    auto game = majority3();
    std::vector<std::vector<bool>> events{
        {true, true, false, false},
        {true, false, true, false},
        {false, true, true, false},
    };
    CHECK(games::event_aggregate(game, events) ==
          std::vector<bool>{true, true, true, false});
}

TEST_CASE("event vectors must agree on length") {
    auto game = majority3();
    std::vector<std::vector<bool>> events{{true}, {true, false}, {true}};
    CHECK_THROWS_AS(games::event_aggregate(game, events),
                    std::invalid_argument);
}

TEST_CASE("set-valued decomposition identity holds pointwise") {
    rng::Stream stream(4242);
    for (int p = 1; p <= 4; ++p) {
        for (const auto& winning : oracles::all_valid_games(p)) {
            games::SimpleGame game(p, winning);
            const std::size_t outcomes = 6;
            std::vector<std::vector<bool>> events(
                static_cast<std::size_t>(p), std::vector<bool>(outcomes));
            for (auto& e : events) {
                for (std::size_t w = 0; w < outcomes; ++w) {
                    e[w] = stream.next_u64() & 1u;
                }
            }
            const auto joint = games::event_aggregate(game, events);
            for (int i = 0; i < p; ++i) {
                auto forced_full = events;
                forced_full[static_cast<std::size_t>(i)].assign(outcomes, true);
                auto forced_empty = events;
                forced_empty[static_cast<std::size_t>(i)].assign(outcomes, false);
                const auto with = games::event_aggregate(game, forced_full);
                const auto without = games::event_aggregate(game, forced_empty);
                for (std::size_t w = 0; w < outcomes; ++w) {
                    const bool member = events[static_cast<std::size_t>(i)][w];
                    const bool expected =
                        (member && with[w]) || (!member && without[w]);
                    CHECK(joint[w] == expected);
                }
            }
        }
    }
}
