// Equilibria of the non-cooperative multilateral stopping game.
//
// Each player declares stop/continue per state; a simple game aggregates the
// declarations into the common alarm. The finite-horizon solver runs the
// backward recursion over per-player stopping sets; the infinite-horizon
// solver iterates the stationary fixed-point equations. Both keep the
// stop/continue evaluation and its positive/negative-part algebraic form in
// lockstep and fail loudly if the two ever disagree.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mqd/detect.hpp"
#include "mqd/games.hpp"

namespace mqd::equilibrium {

/// Per-player, per-stage stopping sets over the instance's states.
///
/// Finite horizon: rows 0..N (row n is read at stage n; row 0 is the
/// degenerate pre-play set and never fires). Stationary: a single row.
struct StrategyProfile {
    bool stationary = false;
    std::vector<std::vector<std::vector<std::uint8_t>>> stages;

    bool stop(int stage, int player, std::size_t state) const {
        const auto& row = stationary ? stages.front()
                                     : stages[static_cast<std::size_t>(stage)];
        return row[static_cast<std::size_t>(player)][state] != 0;
    }
    int player_count() const {
        return stages.empty() ? 0 : static_cast<int>(stages.front().size());
    }
};

struct Diagnostics {
    double fixed_point_residual = 0.0;
    int iterations = 0;
    bool converged = true;
    double recursion_identity_gap = 0.0; // max |direct - algebraic| seen
    std::optional<double> deviation_margin;
};

struct EquilibriumSolution {
    /// Finite horizon: values[i][m] = v_{i,m} (m stages remaining); on exact
    /// trees v_{i,m} lives on the depth-(N-m) layer, on stationary instances
    /// on every state. Infinite horizon: values[i][0] = w_i.
    std::vector<std::vector<std::vector<double>>> values;
    StrategyProfile profile;
    std::vector<double> root_values; // per player at the initial state
    Diagnostics diagnostics;
};

/// The one-shot best-response stopping set {x : f(x) - g(x) >= 0};
/// ties resolve to STOP.
std::vector<std::uint8_t> best_response_set(std::span<const double> f,
                                            std::span<const double> g);

/// Backward-induction equilibrium for a finite-horizon instance.
EquilibriumSolution solve_finite(const detect::GameInstance& instance,
                                 const games::SimpleGame& game);

/// Damped fixed-point iteration for the stationary equations, started from
/// w = 0. Non-convergence is returned as a flagged solution, never hidden.
EquilibriumSolution solve_infinite(const detect::GameInstance& instance,
                                   const games::SimpleGame& game, double tol,
                                   int max_iter, double damping = 1.0);

/// Exact E_x f_i(X_t) under a profile, per player and start state. Paths on
/// which the alarm never fires contribute 0. On stationary instances,
/// *absorption_complete (when given) is cleared if some state cannot reach
/// the alarm set at all, i.e. the absorption system is singular there.
std::vector<std::vector<double>> expected_payoffs(
    const detect::GameInstance& instance, const games::SimpleGame& game,
    const StrategyProfile& profile, bool* absorption_complete = nullptr);

struct CertifyOptions {
    bool sampled = false;  // allow the sampled search above the cap
    int cap_bits = 16;     // exhaustive search cap on decision bits
    int random_samples = 256;
    std::uint64_t seed = 0x5EEDD1CEULL;
};

struct DeviationReport {
    std::vector<double> max_gain; // best unilateral improvement per player
    bool exhaustive = false;
    std::uint64_t alternatives_checked = 0;
};

/// Max unilateral deviation gain per player: exhaustively over all per-stage
/// stopping-set strategies when the decision-bit count fits the cap,
/// otherwise (with sampled=true) by random plus greedy single-bit search.
DeviationReport certify_equilibrium(const detect::GameInstance& instance,
                                    const games::SimpleGame& game,
                                    const StrategyProfile& profile,
                                    const CertifyOptions& options = {});

/// Consistency of a stationary solution with its horizon-N truncation:
/// max_{i,x} |E_x[f_i at stop before N, w_i at N otherwise] - w_i(x)|.
double truncation_check(const detect::GameInstance& instance,
                        const games::SimpleGame& game,
                        const EquilibriumSolution& solution, int N);

/// All-stop / never-stop profile shaped for an instance.
StrategyProfile make_uniform_profile(const detect::GameInstance& instance,
                                     bool stop);

/// Everyone declares stop exactly at the given stage (finite horizon only).
StrategyProfile make_fixed_time_profile(const detect::GameInstance& instance,
                                        int stage);

} // namespace mqd::equilibrium
