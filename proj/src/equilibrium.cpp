#include "mqd/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

#include "mqd/rng.hpp"

namespace mqd::equilibrium {

namespace {

constexpr double kIdentityHardLimit = 1e-9;

struct StageRange {
    std::size_t begin;
    std::size_t end;
};

// States at which declarations are read at stage n: the depth-n layer on an
// exact tree, every state on a stationary chain.
StageRange stage_range(const detect::GameInstance& inst, int n) {
    if (inst.kind == detect::GameInstance::Kind::ExactTree) {
        return {inst.layer_begin[static_cast<std::size_t>(n)],
                inst.layer_begin[static_cast<std::size_t>(n) + 1]};
    }
    return {0, inst.state_count()};
}

void check_shapes(const detect::GameInstance& inst,
                  const games::SimpleGame& game) {
    if (game.player_count() != inst.player_count) {
        throw std::invalid_argument("game and instance player counts differ");
    }
    if (inst.payoffs.size() != static_cast<std::size_t>(inst.player_count)) {
        throw std::invalid_argument("instance payoff table malformed");
    }
    for (const auto& f : inst.payoffs) {
        for (double v : f) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw std::invalid_argument(
                    "instance payoffs must lie in [0,1]");
            }
        }
    }
}

// Stop/continue value at one state, computed both directly and through the
// positive/negative-part identity. The two must agree; a disagreement means
// the stage recursion is broken, so it is a hard error.
double stage_value(const games::SimpleGame& game, games::Coalition votes,
                   int player, double f, double cont, double& identity_gap) {
    const games::Coalition bit = 1u << player;
    const bool fire = game.is_winning(votes);
    const double direct = fire ? f : cont;

    const bool fire_if_stop = game.is_winning(votes | bit);
    const bool fire_if_cont = game.is_winning(votes & ~bit);
    const double diff = f - cont;
    const double positive = diff > 0.0 ? diff : 0.0;
    const double negative = diff < 0.0 ? -diff : 0.0;
    const double algebraic = positive * (fire_if_stop ? 1.0 : 0.0) -
                             negative * (fire_if_cont ? 1.0 : 0.0) + cont;

    const double gap = std::abs(direct - algebraic);
    if (gap > identity_gap) identity_gap = gap;
    if (gap > kIdentityHardLimit) {
        throw std::logic_error(
            "stage recursion identity violated (gap " + std::to_string(gap) +
            ")");
    }
    return direct;
}

games::Coalition votes_at(const detect::GameInstance& inst,
                          const std::vector<std::vector<double>>& threshold,
                          std::size_t x) {
    games::Coalition mask = 0;
    for (int i = 0; i < inst.player_count; ++i) {
        if (inst.payoffs[static_cast<std::size_t>(i)][x] >=
            threshold[static_cast<std::size_t>(i)][x]) {
            mask |= (1u << i);
        }
    }
    return mask;
}

} // namespace

std::vector<std::uint8_t> best_response_set(std::span<const double> f,
                                            std::span<const double> g) {
    if (f.size() != g.size()) {
        throw std::invalid_argument("payoff vectors differ in length");
    }
    std::vector<std::uint8_t> set(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) {
        set[x] = (f[x] - g[x] >= 0.0) ? 1 : 0;
    }
    return set;
}

EquilibriumSolution solve_finite(const detect::GameInstance& inst,
                                 const games::SimpleGame& game) {
    check_shapes(inst, game);
    if (!inst.horizon) {
        throw std::invalid_argument("solve_finite needs a finite horizon");
    }
    const int N = *inst.horizon;
    const int p = inst.player_count;
    const std::size_t count = inst.state_count();

    EquilibriumSolution sol;
    sol.profile.stationary = false;
    sol.profile.stages.assign(
        static_cast<std::size_t>(N) + 1,
        std::vector<std::vector<std::uint8_t>>(
            static_cast<std::size_t>(p), std::vector<std::uint8_t>(count, 0)));
    sol.values.assign(static_cast<std::size_t>(p),
                      std::vector<std::vector<double>>(
                          static_cast<std::size_t>(N) + 1));
    sol.root_values.assign(static_cast<std::size_t>(p), 0.0);

    // U_i = equilibrium value given play reaches a state at its own stage;
    // cont_i = v_{i,N-n}, the continuation value tested against f_i.
    std::vector<std::vector<double>> stage_u(
        static_cast<std::size_t>(p), std::vector<double>(count, 0.0));
    std::vector<std::vector<double>> cont(
        static_cast<std::size_t>(p), std::vector<double>(count, 0.0));
    double identity_gap = 0.0;

    for (int n = N; n >= 1; --n) {
        const StageRange range = stage_range(inst, n);
        for (int i = 0; i < p; ++i) {
            auto& ci = cont[static_cast<std::size_t>(i)];
            const auto& ui = stage_u[static_cast<std::size_t>(i)];
            const auto& fi = inst.payoffs[static_cast<std::size_t>(i)];
            for (std::size_t x = range.begin; x < range.end; ++x) {
                if (n == N) {
                    ci[x] = fi[x]; // v_{i,0} = f_i
                } else {
                    double acc = 0.0;
                    for (const auto& t : inst.transitions[x]) {
                        acc += t.prob * ui[t.next];
                    }
                    ci[x] = acc;
                }
            }
        }
        // Record v_{i,N-n}.
        const int m = N - n;
        for (int i = 0; i < p; ++i) {
            sol.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)]
                .assign(cont[static_cast<std::size_t>(i)].begin() +
                            static_cast<std::ptrdiff_t>(range.begin),
                        cont[static_cast<std::size_t>(i)].begin() +
                            static_cast<std::ptrdiff_t>(range.end));
        }
        // Stage stopping sets and stage values. The set of player i depends
        // only on (f_i, v_{i,N-n}); co-players enter through the alarm only.
        for (std::size_t x = range.begin; x < range.end; ++x) {
            games::Coalition mask = 0;
            for (int i = 0; i < p; ++i) {
                const bool stop = inst.payoffs[static_cast<std::size_t>(i)][x] >=
                                  cont[static_cast<std::size_t>(i)][x];
                sol.profile.stages[static_cast<std::size_t>(n)]
                                  [static_cast<std::size_t>(i)][x] =
                    stop ? 1 : 0;
                if (stop) mask |= (1u << i);
            }
            for (int i = 0; i < p; ++i) {
                stage_u[static_cast<std::size_t>(i)][x] = stage_value(
                    game, mask, i, inst.payoffs[static_cast<std::size_t>(i)][x],
                    cont[static_cast<std::size_t>(i)][x], identity_gap);
            }
        }
    }

    // v_{i,N} and the degenerate stage-0 sets.
    const StageRange root_range = stage_range(inst, 0);
    for (int i = 0; i < p; ++i) {
        auto& top = sol.values[static_cast<std::size_t>(i)]
                              [static_cast<std::size_t>(N)];
        if (N == 0) {
            const auto& fi = inst.payoffs[static_cast<std::size_t>(i)];
            top.assign(fi.begin() + static_cast<std::ptrdiff_t>(root_range.begin),
                       fi.begin() + static_cast<std::ptrdiff_t>(root_range.end));
        } else {
            top.resize(root_range.end - root_range.begin);
            for (std::size_t x = root_range.begin; x < root_range.end; ++x) {
                double acc = 0.0;
                for (const auto& t : inst.transitions[x]) {
                    acc += t.prob * stage_u[static_cast<std::size_t>(i)][t.next];
                }
                top[x - root_range.begin] = acc;
            }
        }
        sol.root_values[static_cast<std::size_t>(i)] =
            top[inst.initial_state - root_range.begin];
        for (std::size_t x = root_range.begin; x < root_range.end; ++x) {
            sol.profile.stages[0][static_cast<std::size_t>(i)][x] =
                (inst.payoffs[static_cast<std::size_t>(i)][x] >=
                 top[x - root_range.begin])
                    ? 1
                    : 0;
        }
    }

    sol.diagnostics.iterations = N;
    sol.diagnostics.converged = true;
    sol.diagnostics.recursion_identity_gap = identity_gap;
    return sol;
}

EquilibriumSolution solve_infinite(const detect::GameInstance& inst,
                                   const games::SimpleGame& game, double tol,
                                   int max_iter, double damping) {
    check_shapes(inst, game);
    if (!inst.stationary()) {
        throw std::invalid_argument("solve_infinite needs a stationary instance");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) {
        throw std::invalid_argument("damping must lie in (0,1]");
    }
    const int p = inst.player_count;
    const std::size_t count = inst.state_count();

    std::vector<std::vector<double>> w(
        static_cast<std::size_t>(p), std::vector<double>(count, 0.0));
    std::vector<std::vector<double>> stage_u = w;
    std::vector<std::vector<double>> applied = w;
    double identity_gap = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;

    auto apply = [&]() {
        // One application of the stationary stage operator at the current w.
        for (std::size_t x = 0; x < count; ++x) {
            const games::Coalition mask = votes_at(inst, w, x);
            for (int i = 0; i < p; ++i) {
                stage_u[static_cast<std::size_t>(i)][x] = stage_value(
                    game, mask, i, inst.payoffs[static_cast<std::size_t>(i)][x],
                    w[static_cast<std::size_t>(i)][x], identity_gap);
            }
        }
        double max_change = 0.0;
        for (int i = 0; i < p; ++i) {
            for (std::size_t x = 0; x < count; ++x) {
                double acc = 0.0;
                for (const auto& t : inst.transitions[x]) {
                    acc += t.prob * stage_u[static_cast<std::size_t>(i)][t.next];
                }
                applied[static_cast<std::size_t>(i)][x] = acc;
                max_change = std::max(
                    max_change,
                    std::abs(acc - w[static_cast<std::size_t>(i)][x]));
            }
        }
        return max_change;
    };

    for (int iter = 1; iter <= max_iter; ++iter) {
        iterations = iter;
        residual = apply();
        if (residual < tol) {
            converged = true; // w itself is within tol of its image
            break;
        }
        for (int i = 0; i < p; ++i) {
            for (std::size_t x = 0; x < count; ++x) {
                w[static_cast<std::size_t>(i)][x] =
                    (1.0 - damping) * w[static_cast<std::size_t>(i)][x] +
                    damping * applied[static_cast<std::size_t>(i)][x];
            }
        }
    }
    if (!converged) {
        residual = apply(); // residual at the iterate actually returned
    }

    EquilibriumSolution sol;
    sol.profile.stationary = true;
    sol.profile.stages.assign(
        1, std::vector<std::vector<std::uint8_t>>(
               static_cast<std::size_t>(p),
               std::vector<std::uint8_t>(count, 0)));
    sol.values.assign(static_cast<std::size_t>(p),
                      std::vector<std::vector<double>>(1));
    sol.root_values.assign(static_cast<std::size_t>(p), 0.0);
    for (int i = 0; i < p; ++i) {
        sol.values[static_cast<std::size_t>(i)][0] =
            w[static_cast<std::size_t>(i)];
        sol.root_values[static_cast<std::size_t>(i)] =
            w[static_cast<std::size_t>(i)][inst.initial_state];
        for (std::size_t x = 0; x < count; ++x) {
            sol.profile.stages[0][static_cast<std::size_t>(i)][x] =
                (inst.payoffs[static_cast<std::size_t>(i)][x] >=
                 w[static_cast<std::size_t>(i)][x])
                    ? 1
                    : 0;
        }
    }
    sol.diagnostics.fixed_point_residual = residual;
    sol.diagnostics.iterations = iterations;
    sol.diagnostics.converged = converged;
    sol.diagnostics.recursion_identity_gap = identity_gap;
    return sol;
}

namespace {

games::Coalition profile_votes(const detect::GameInstance& inst,
                               const StrategyProfile& profile, int stage,
                               std::size_t x) {
    games::Coalition mask = 0;
    for (int i = 0; i < inst.player_count; ++i) {
        if (profile.stop(stage, i, x)) mask |= (1u << i);
    }
    return mask;
}

std::vector<std::vector<double>> eval_finite(const detect::GameInstance& inst,
                                             const games::SimpleGame& game,
                                             const StrategyProfile& profile) {
    const int N = *inst.horizon;
    const int p = inst.player_count;
    const std::size_t count = inst.state_count();
    const bool layered = inst.kind == detect::GameInstance::Kind::ExactTree;

    std::vector<std::vector<double>> value(
        static_cast<std::size_t>(p), std::vector<double>(count, 0.0));
    std::vector<std::vector<double>> next = value;

    if (N == 0) {
        // Degenerate horizon: everyone stops at time 0.
        for (int i = 0; i < p; ++i) {
            value[static_cast<std::size_t>(i)] =
                inst.payoffs[static_cast<std::size_t>(i)];
        }
        return value;
    }

    for (int n = N; n >= 1; --n) {
        const StageRange range = stage_range(inst, n);
        for (std::size_t x = range.begin; x < range.end; ++x) {
            const bool fire = game.is_winning(profile_votes(inst, profile, n, x));
            for (int i = 0; i < p; ++i) {
                double v;
                if (fire) {
                    v = inst.payoffs[static_cast<std::size_t>(i)][x];
                } else if (n == N) {
                    v = 0.0; // alarm never fires on this path
                } else {
                    // Layered instances hold the deeper layer in `value`
                    // itself; stationary ones keep stage n+1 in `next`.
                    const auto& source = layered
                                             ? value[static_cast<std::size_t>(i)]
                                             : next[static_cast<std::size_t>(i)];
                    double acc = 0.0;
                    for (const auto& t : inst.transitions[x]) {
                        acc += t.prob * source[t.next];
                    }
                    v = acc;
                }
                value[static_cast<std::size_t>(i)][x] = v;
            }
        }
        if (!layered) std::swap(value, next);
    }
    if (!layered) std::swap(value, next); // undo the last swap: value = B^{(1)}

    // Pre-stage-1 expectation from every possible start state.
    std::vector<std::vector<double>> result(
        static_cast<std::size_t>(p), std::vector<double>(count, 0.0));
    const StageRange starts = stage_range(inst, 0);
    for (int i = 0; i < p; ++i) {
        for (std::size_t x = starts.begin; x < starts.end; ++x) {
            double acc = 0.0;
            for (const auto& t : inst.transitions[x]) {
                acc += t.prob * value[static_cast<std::size_t>(i)][t.next];
            }
            result[static_cast<std::size_t>(i)][x] = acc;
        }
        if (layered) {
            // Interior nodes keep their conditional values for diagnostics.
            for (std::size_t x = starts.end; x < count; ++x) {
                result[static_cast<std::size_t>(i)][x] =
                    value[static_cast<std::size_t>(i)][x];
            }
        }
    }
    return result;
}

std::vector<std::vector<double>> eval_stationary_infinite(
    const detect::GameInstance& inst, const games::SimpleGame& game,
    const StrategyProfile& profile, bool* absorption_complete) {
    const int p = inst.player_count;
    const std::size_t count = inst.state_count();

    std::vector<std::uint8_t> fire(count, 0);
    for (std::size_t x = 0; x < count; ++x) {
        fire[x] = game.is_winning(profile_votes(inst, profile, 0, x)) ? 1 : 0;
    }

    // States from which the alarm set is reachable; elsewhere the alarm never
    // fires and the payoff contribution is 0 by convention.
    std::vector<std::vector<std::size_t>> reverse(count);
    for (std::size_t x = 0; x < count; ++x) {
        if (fire[x]) continue;
        for (const auto& t : inst.transitions[x]) reverse[t.next].push_back(x);
    }
    std::vector<std::uint8_t> reaches(count, 0);
    std::deque<std::size_t> queue;
    for (std::size_t x = 0; x < count; ++x) {
        if (fire[x]) {
            reaches[x] = 1;
            queue.push_back(x);
        }
    }
    while (!queue.empty()) {
        const std::size_t y = queue.front();
        queue.pop_front();
        for (std::size_t x : reverse[y]) {
            if (!reaches[x]) {
                reaches[x] = 1;
                queue.push_back(x);
            }
        }
    }
    bool complete = true;
    for (std::size_t x = 0; x < count; ++x) {
        if (!reaches[x]) complete = false;
    }
    if (absorption_complete) *absorption_complete = complete;

    // Gauss-Seidel on the absorption system; the restriction to states that
    // reach the alarm set is sub-stochastic, so the sweeps contract.
    std::vector<std::vector<double>> value(
        static_cast<std::size_t>(p), std::vector<double>(count, 0.0));
    for (int i = 0; i < p; ++i) {
        auto& vi = value[static_cast<std::size_t>(i)];
        for (std::size_t x = 0; x < count; ++x) {
            if (fire[x]) vi[x] = inst.payoffs[static_cast<std::size_t>(i)][x];
        }
        for (int sweep = 0; sweep < 200000; ++sweep) {
            double delta = 0.0;
            for (std::size_t x = 0; x < count; ++x) {
                if (fire[x] || !reaches[x]) continue;
                double acc = 0.0;
                for (const auto& t : inst.transitions[x]) {
                    acc += t.prob * vi[t.next];
                }
                delta = std::max(delta, std::abs(acc - vi[x]));
                vi[x] = acc;
            }
            if (delta < 1e-14) break;
        }
    }
    return value;
}

} // namespace

std::vector<std::vector<double>> expected_payoffs(
    const detect::GameInstance& inst, const games::SimpleGame& game,
    const StrategyProfile& profile, bool* absorption_complete) {
    check_shapes(inst, game);
    if (profile.player_count() != inst.player_count) {
        throw std::invalid_argument("profile and instance player counts differ");
    }
    if (absorption_complete) *absorption_complete = true;
    if (inst.horizon) {
        if (!profile.stationary &&
            profile.stages.size() != static_cast<std::size_t>(*inst.horizon) + 1) {
            throw std::invalid_argument("profile stage count does not match horizon");
        }
        return eval_finite(inst, game, profile);
    }
    if (!profile.stationary) {
        throw std::invalid_argument(
            "infinite-horizon evaluation needs a stationary profile");
    }
    return eval_stationary_infinite(inst, game, profile, absorption_complete);
}

DeviationReport certify_equilibrium(const detect::GameInstance& inst,
                                    const games::SimpleGame& game,
                                    const StrategyProfile& profile,
                                    const CertifyOptions& options) {
    check_shapes(inst, game);
    const int p = inst.player_count;
    const bool layered = inst.kind == detect::GameInstance::Kind::ExactTree;

    // Decision slots: (stage, state) pairs at which a declaration is read.
    struct Slot {
        int stage;
        std::size_t state;
    };
    std::vector<Slot> slots;
    if (inst.horizon) {
        for (int n = 1; n <= *inst.horizon; ++n) {
            const StageRange range = stage_range(inst, n);
            for (std::size_t x = range.begin; x < range.end; ++x) {
                slots.push_back({n, x});
            }
        }
    } else {
        for (std::size_t x = 0; x < inst.state_count(); ++x) {
            slots.push_back({0, x});
        }
    }
    const std::size_t bits = slots.size();

    const auto base = expected_payoffs(inst, game, profile);
    // Stationary instances must hold up from every start state, trees from
    // the root.
    const StageRange starts = stage_range(inst, 0);
    auto gain_of = [&](const std::vector<std::vector<double>>& dev, int i) {
        double gain = -std::numeric_limits<double>::infinity();
        const std::size_t from = layered ? inst.initial_state : starts.begin;
        const std::size_t to = layered ? inst.initial_state + 1 : starts.end;
        for (std::size_t x = from; x < to; ++x) {
            gain = std::max(gain, dev[static_cast<std::size_t>(i)][x] -
                                      base[static_cast<std::size_t>(i)][x]);
        }
        return gain;
    };

    DeviationReport report;
    report.max_gain.assign(static_cast<std::size_t>(p),
                           -std::numeric_limits<double>::infinity());

    // Expand a staged copy of the profile so single rows can be rewritten.
    StrategyProfile work = profile;
    if (work.stationary && inst.horizon) {
        work.stationary = false;
        work.stages.assign(static_cast<std::size_t>(*inst.horizon) + 1,
                           profile.stages.front());
    }

    auto cell_at = [&](int i, std::size_t b) -> std::uint8_t& {
        const auto& slot = slots[b];
        return work.stages[work.stationary
                               ? 0
                               : static_cast<std::size_t>(slot.stage)]
                          [static_cast<std::size_t>(i)][slot.state];
    };
    auto save_player = [&](int i) {
        std::vector<std::uint8_t> saved(bits);
        for (std::size_t b = 0; b < bits; ++b) saved[b] = cell_at(i, b);
        return saved;
    };
    auto restore_player = [&](int i, const std::vector<std::uint8_t>& saved) {
        for (std::size_t b = 0; b < bits; ++b) cell_at(i, b) = saved[b];
    };

    if (bits <= static_cast<std::size_t>(options.cap_bits) && bits < 63) {
        report.exhaustive = true;
        for (int i = 0; i < p; ++i) {
            const auto original = save_player(i);
            const std::uint64_t limit = std::uint64_t{1} << bits;
            for (std::uint64_t mask = 0; mask < limit; ++mask) {
                for (std::size_t b = 0; b < bits; ++b) {
                    cell_at(i, b) = (mask >> b) & 1u ? 1 : 0;
                }
                const auto dev = expected_payoffs(inst, game, work);
                report.max_gain[static_cast<std::size_t>(i)] =
                    std::max(report.max_gain[static_cast<std::size_t>(i)],
                             gain_of(dev, i));
            }
            restore_player(i, original);
            report.alternatives_checked += limit;
        }
        return report;
    }

    if (!options.sampled) {
        throw detect::SizeCapError(
            "deviation search needs " + std::to_string(bits) +
            " decision bits (cap " + std::to_string(options.cap_bits) +
            "); enable sampled mode");
    }

    // Sampled mode: greedy single-slot flips from the given strategy plus
    // uniformly random strategies.
    for (int i = 0; i < p; ++i) {
        const auto original = save_player(i);
        double& best = report.max_gain[static_cast<std::size_t>(i)];
        best = 0.0; // the profile itself

        auto eval_gain = [&]() {
            const auto dev = expected_payoffs(inst, game, work);
            return gain_of(dev, i);
        };

        for (int pass = 0; pass < 2; ++pass) {
            bool improved = false;
            for (std::size_t b = 0; b < bits; ++b) {
                cell_at(i, b) ^= 1;
                const double gain = eval_gain();
                report.alternatives_checked += 1;
                if (gain > best) {
                    best = gain;
                    improved = true;
                } else {
                    cell_at(i, b) ^= 1; // revert
                }
            }
            if (!improved) break;
        }
        restore_player(i, original);

        rng::Stream stream(rng::derive_stream(
            options.seed, static_cast<std::uint64_t>(i)));
        for (int s = 0; s < options.random_samples; ++s) {
            for (std::size_t b = 0; b < bits; ++b) {
                cell_at(i, b) = (stream.next_u64() & 1u) ? 1 : 0;
            }
            const double gain = eval_gain();
            report.alternatives_checked += 1;
            if (gain > best) best = gain;
        }
        restore_player(i, original);
    }
    return report;
}

double truncation_check(const detect::GameInstance& inst,
                        const games::SimpleGame& game,
                        const EquilibriumSolution& solution, int N) {
    check_shapes(inst, game);
    if (!inst.stationary() || !solution.profile.stationary) {
        throw std::invalid_argument("truncation_check needs a stationary solution");
    }
    if (N < 0) throw std::invalid_argument("N must be >= 0");
    const int p = inst.player_count;
    const std::size_t count = inst.state_count();

    std::vector<std::uint8_t> fire(count, 0);
    for (std::size_t x = 0; x < count; ++x) {
        fire[x] =
            game.is_winning(profile_votes(inst, solution.profile, 0, x)) ? 1 : 0;
    }

    // E^{(m)}(x) = E_x[ f at the alarm if it fires within m steps,
    //                   w at step m otherwise ]; E^{(0)} = w.
    std::vector<std::vector<double>> current(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        current[static_cast<std::size_t>(i)] =
            solution.values[static_cast<std::size_t>(i)][0];
    }
    std::vector<std::vector<double>> next = current;
    for (int m = 1; m <= N; ++m) {
        for (int i = 0; i < p; ++i) {
            for (std::size_t x = 0; x < count; ++x) {
                double acc = 0.0;
                for (const auto& t : inst.transitions[x]) {
                    acc += t.prob *
                           (fire[t.next]
                                ? inst.payoffs[static_cast<std::size_t>(i)]
                                              [t.next]
                                : current[static_cast<std::size_t>(i)][t.next]);
                }
                next[static_cast<std::size_t>(i)][x] = acc;
            }
        }
        std::swap(current, next);
    }

    double residual = 0.0;
    for (int i = 0; i < p; ++i) {
        for (std::size_t x = 0; x < count; ++x) {
            residual = std::max(
                residual,
                std::abs(current[static_cast<std::size_t>(i)][x] -
                         solution.values[static_cast<std::size_t>(i)][0][x]));
        }
    }
    return residual;
}

StrategyProfile make_uniform_profile(const detect::GameInstance& inst,
                                     bool stop) {
    StrategyProfile profile;
    const std::size_t rows =
        inst.horizon ? static_cast<std::size_t>(*inst.horizon) + 1 : 1;
    profile.stationary = !inst.horizon.has_value();
    profile.stages.assign(
        rows, std::vector<std::vector<std::uint8_t>>(
                  static_cast<std::size_t>(inst.player_count),
                  std::vector<std::uint8_t>(inst.state_count(),
                                            stop ? 1 : 0)));
    return profile;
}

StrategyProfile make_fixed_time_profile(const detect::GameInstance& inst,
                                        int stage) {
    if (!inst.horizon) {
        throw std::invalid_argument("fixed-time profile needs a finite horizon");
    }
    if (stage < 1 || stage > *inst.horizon) {
        throw std::invalid_argument("fixed-time stage outside 1..N");
    }
    StrategyProfile profile = make_uniform_profile(inst, false);
    for (auto& row : profile.stages[static_cast<std::size_t>(stage)]) {
        std::fill(row.begin(), row.end(), 1);
    }
    return profile;
}

} // namespace mqd::equilibrium
