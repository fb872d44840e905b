#include "mqd/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "mqd/belief.hpp"
#include "mqd/rng.hpp"

namespace mqd::sim {

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Success: return "success";
        case Outcome::FalseAlarm: return "false_alarm";
        case Outcome::Late: return "late";
        case Outcome::NoAlarm: return "no_alarm";
    }
    return "unknown";
}

namespace {

Outcome classify(const chain::SensorModel& model, long theta, long alarm) {
    if (alarm < 0) return Outcome::NoAlarm;
    if (theta > alarm + model.window_future) return Outcome::FalseAlarm;
    if (theta < alarm - model.window_past) return Outcome::Late;
    return Outcome::Success;
}

} // namespace

RunReport run(std::span<const chain::SensorModel> models,
              const games::SimpleGame& game,
              const detect::GameInstance& instance,
              const equilibrium::StrategyProfile& profile, long samples,
              std::uint64_t seed, int max_steps) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (static_cast<int>(models.size()) != instance.player_count ||
        game.player_count() != instance.player_count) {
        throw std::invalid_argument("models, game and instance disagree on p");
    }
    const std::size_t p = models.size();
    const bool finite = instance.horizon.has_value();
    const int steps = finite ? *instance.horizon : max_steps;
    const bool tree = instance.kind == detect::GameInstance::Kind::ExactTree;

    RunReport report;
    report.seed = seed;
    report.samples = samples;
    report.players.assign(p, {});
    report.trajectories.reserve(static_cast<std::size_t>(samples));

    std::vector<chain::Trajectory> paths(p);
    std::vector<belief::WindowedPosterior> beliefs(p);
    std::vector<std::size_t> symbols(p);

    for (long j = 0; j < samples; ++j) {
        const std::uint64_t traj_seed =
            rng::derive_stream(seed, static_cast<std::uint64_t>(j));
        for (std::size_t r = 0; r < p; ++r) {
            paths[r] = chain::sample_trajectory(
                models[r], steps > 0 ? steps : 1,
                rng::derive_stream(traj_seed, static_cast<std::uint64_t>(r)));
            beliefs[r] = belief::initial_belief(models[r]);
            symbols[r] = models[r].initial_state;
        }

        long alarm = -1;
        if (finite && steps == 0) {
            alarm = 0; // degenerate horizon: forced declaration at time 0
        }
        std::size_t node = instance.initial_state;
        for (int n = 1; n <= steps && alarm < 0; ++n) {
            // Advance exact beliefs with this step's observations.
            for (std::size_t r = 0; r < p; ++r) {
                const std::size_t next_symbol =
                    paths[r].observations[static_cast<std::size_t>(n)];
                beliefs[r] =
                    belief::update(models[r], beliefs[r], symbols[r],
                                   next_symbol);
                symbols[r] = next_symbol;
            }
            std::size_t state;
            if (tree) {
                const std::uint32_t code =
                    detect::joint_symbol_code(models, symbols);
                std::size_t child = node;
                bool found = false;
                for (const auto& t : instance.transitions[node]) {
                    if (t.symbol_code == code) {
                        child = t.next;
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    throw std::runtime_error(
                        "sampled observation leaves the exact tree");
                }
                node = child;
                state = node;
            } else {
                state = detect::grid_state_index(instance, symbols, beliefs);
            }

            games::Coalition votes = 0;
            const int stage = finite ? n : 0;
            for (std::size_t r = 0; r < p; ++r) {
                if (profile.stop(stage, static_cast<int>(r), state)) {
                    votes |= (1u << r);
                }
            }
            if (game.is_winning(votes)) alarm = n;
        }

        TrajectoryRecord rec;
        rec.alarm_time = alarm;
        rec.thetas.resize(p);
        rec.outcomes.resize(p);
        for (std::size_t r = 0; r < p; ++r) {
            rec.thetas[r] = paths[r].theta;
            rec.outcomes[r] = classify(models[r], paths[r].theta, alarm);
            auto& stats = report.players[r];
            switch (rec.outcomes[r]) {
                case Outcome::Success: ++stats.success; break;
                case Outcome::FalseAlarm: ++stats.false_alarm; break;
                case Outcome::Late: ++stats.late; break;
                case Outcome::NoAlarm: ++stats.no_alarm; break;
            }
        }
        ++report.alarm_histogram[alarm];
        report.trajectories.push_back(std::move(rec));
    }

    const double m = static_cast<double>(samples);
    const auto se = [m](double rate) {
        return std::sqrt(rate * (1.0 - rate) / m);
    };
    for (auto& stats : report.players) {
        stats.success_rate = static_cast<double>(stats.success) / m;
        stats.false_alarm_rate = static_cast<double>(stats.false_alarm) / m;
        stats.late_rate = static_cast<double>(stats.late) / m;
        stats.no_alarm_rate = static_cast<double>(stats.no_alarm) / m;
        stats.se_success = se(stats.success_rate);
        stats.se_false_alarm = se(stats.false_alarm_rate);
        stats.se_late = se(stats.late_rate);
        stats.se_no_alarm = se(stats.no_alarm_rate);
    }
    return report;
}

std::vector<RunReport> compare_policies(
    std::span<const chain::SensorModel> models, const games::SimpleGame& game,
    const detect::GameInstance& instance,
    std::span<const equilibrium::StrategyProfile> profiles, long samples,
    std::uint64_t seed, int max_steps) {
    std::vector<RunReport> rows;
    rows.reserve(profiles.size());
    for (const auto& profile : profiles) {
        rows.push_back(
            run(models, game, instance, profile, samples, seed, max_steps));
    }
    return rows;
}

} // namespace mqd::sim
