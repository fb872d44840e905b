// Monte Carlo execution of strategy profiles on sampled trajectories.
//
// Beliefs are always advanced exactly along the sampled observations; grid
// profiles are read through a nearest-cell lookup at decision time, so the
// report measures how the policy performs on the real filtration rather than
// inside the discretized chain.
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "mqd/chain.hpp"
#include "mqd/detect.hpp"
#include "mqd/equilibrium.hpp"
#include "mqd/games.hpp"

namespace mqd::sim {

enum class Outcome : std::uint8_t {
    Success = 0,    // theta in [t - d1, t + d2]
    FalseAlarm = 1, // alarm too early: theta > t + d2
    Late = 2,       // alarm too late: theta < t - d1
    NoAlarm = 3,    // the common alarm never fired
};

const char* outcome_name(Outcome o);

struct TrajectoryRecord {
    std::vector<long> thetas;  // realized change time per sensor
    long alarm_time = -1;      // stage of the common alarm, -1 if none
    std::vector<Outcome> outcomes;
};

struct PlayerStats {
    long success = 0;
    long false_alarm = 0;
    long late = 0;
    long no_alarm = 0;
    double success_rate = 0.0;
    double false_alarm_rate = 0.0;
    double late_rate = 0.0;
    double no_alarm_rate = 0.0;
    // Binomial standard errors of the rates above.
    double se_success = 0.0;
    double se_false_alarm = 0.0;
    double se_late = 0.0;
    double se_no_alarm = 0.0;
};

struct RunReport {
    std::uint64_t seed = 0;
    long samples = 0;
    std::vector<PlayerStats> players;
    std::map<long, long> alarm_histogram; // stage -> count; -1 = no alarm
    std::vector<TrajectoryRecord> trajectories;
};

/// Executes a profile on `samples` independent multi-sensor trajectories.
/// Per-trajectory seeds derive from (seed, trajectory index), so results are
/// reproducible and order-independent. For unbounded instances the walk is
/// cut off after max_steps (scored as no-alarm).
RunReport run(std::span<const chain::SensorModel> models,
              const games::SimpleGame& game,
              const detect::GameInstance& instance,
              const equilibrium::StrategyProfile& profile, long samples,
              std::uint64_t seed, int max_steps = 10000);

/// Same-seed paired comparison across profiles (common random numbers).
std::vector<RunReport> compare_policies(
    std::span<const chain::SensorModel> models, const games::SimpleGame& game,
    const detect::GameInstance& instance,
    std::span<const equilibrium::StrategyProfile> profiles, long samples,
    std::uint64_t seed, int max_steps = 10000);

} // namespace mqd::sim
