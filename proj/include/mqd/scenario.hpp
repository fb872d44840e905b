// Scenario ingestion and artifact serialization for the command-line tool.
//
// A scenario is a single JSON document: sensor models, the simple game over
// the sensors, the horizon, solver and simulation settings. Every emitted
// artifact embeds the scenario fingerprint and the tool version so files can
// be traced back to the exact configuration that produced them.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mqd/chain.hpp"
#include "mqd/detect.hpp"
#include "mqd/equilibrium.hpp"
#include "mqd/games.hpp"
#include "mqd/sim.hpp"

namespace mqd::scenario {

/// Input cannot be read or is not well-formed JSON / wrong shape (exit 2).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input is well-formed but violates a model or game invariant (exit 1).
struct SemanticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    std::string backend = "exact"; // "exact" | "grid"
    int bins = 201;                // grid bins per belief component
    double tol = 1e-9;
    int max_iter = 10000;
    double damping = 1.0;
    double tree_cap_bits = 20.0;
    std::size_t state_cap = 500000;
};

struct SimulationConfig {
    long samples = 10000;
    std::uint64_t seed = 1;
    int max_steps = 10000;
};

class Scenario {
public:
    static Scenario from_json(const nlohmann::json& doc);
    static Scenario from_file(const std::string& path);

    std::vector<chain::SensorModel> sensors;
    std::vector<int> sensor_ids; // parallel to sensors
    games::SimpleGame game;
    std::optional<int> horizon; // nullopt = infinite
    SolverConfig solver;
    SimulationConfig simulation;
    std::string out_dir = "out";
    std::string fingerprint; // hex of the canonical config document

private:
    explicit Scenario(games::SimpleGame g) : game(std::move(g)) {}
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string fingerprint_of(const nlohmann::json& doc);

/// Builds the solver instance the scenario asks for. backend_override, when
/// nonempty, replaces the configured backend.
detect::GameInstance build_instance(const Scenario& scenario,
                                    const std::string& backend_override = "");

nlohmann::json solution_to_json(const Scenario& scenario,
                                const std::string& backend,
                                const detect::GameInstance& instance,
                                const equilibrium::EquilibriumSolution& solution);

/// Reconstructs the strategy profile stored in a solution document and
/// checks it matches the instance dimensions.
equilibrium::StrategyProfile profile_from_solution(
    const nlohmann::json& solution, const detect::GameInstance& instance);

nlohmann::json run_report_to_json(const Scenario& scenario,
                                  const sim::RunReport& report);

/// RFC-4180 CSV of per-trajectory results; every row carries the scenario
/// fingerprint and tool version.
std::string trajectories_to_csv(const Scenario& scenario,
                                const sim::RunReport& report);

/// One CSV row per (policy, sensor) pair for policy comparisons.
std::string compare_to_csv(const Scenario& scenario,
                           const std::vector<std::string>& policy_names,
                           const std::vector<sim::RunReport>& rows);

} // namespace mqd::scenario
