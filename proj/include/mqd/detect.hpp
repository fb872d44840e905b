// Builds solvable finite game instances from sensor models.
//
// Two backends share one instance format:
//  - exact tree: the unrolled joint observation history for short horizons,
//    with exact beliefs at every node (ground truth);
//  - grid chain: a stationary chain over (symbol, discretized belief) cells,
//    exact one-step updates projected to the nearest cell.
// Sensors evolve independently, so joint transitions factor across sensors.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mqd/belief.hpp"
#include "mqd/chain.hpp"

namespace mqd::detect {

/// Thrown when a requested instance would exceed its configured size cap.
struct SizeCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Transition {
    std::size_t next = 0;
    double prob = 0.0;
    std::uint32_t symbol_code = 0; // joint observation code for this edge
};

/// Per-sensor view of one enumerated state.
struct SensorState {
    std::size_t symbol = 0;
    belief::WindowedPosterior posterior;
    std::optional<std::size_t> grid_cell; // grid backend only
};

struct JointState {
    std::vector<SensorState> sensors;
    long time = 0; // tree depth; 0 for stationary states
};

/// Belief discretization for one sensor: every component of the windowed
/// posterior (window entries plus past tail) gets bins_per_component bins
/// with centers j/(K-1), so certainty cells (0 and 1) are on the grid.
struct GridSensorMeta {
    int bins = 0;         // K
    int components = 0;   // window_past + 2
    std::size_t cells = 0;        // K^components
    std::size_t symbol_count = 0; // alphabet size
    std::size_t states() const { return cells * symbol_count; }
};

struct GridMeta {
    std::vector<GridSensorMeta> sensors;
    std::vector<std::size_t> strides; // joint index strides per sensor
};

struct GameInstance {
    enum class Kind { ExactTree, GridChain };

    Kind kind = Kind::ExactTree;
    int player_count = 0;
    std::optional<int> horizon; // stages 1..N; nullopt = unbounded
    std::size_t initial_state = 0;

    std::vector<std::vector<Transition>> transitions; // per state
    std::vector<std::vector<double>> payoffs;         // [player][state]

    // Exact tree: states are stored depth-contiguously;
    // layer_begin[d]..layer_begin[d+1] are the depth-d nodes.
    std::vector<std::size_t> layer_begin;
    std::vector<int> depth; // per state, tree only

    // Grid metadata, grid only.
    GridMeta grid;

    // Compact per-state descriptors.
    std::vector<std::size_t> symbols;       // state * p + sensor
    std::vector<double> beliefs;            // flattened posteriors
    std::vector<std::size_t> belief_offset; // per sensor, into one state's slice
    std::size_t belief_width = 0;           // doubles per state

    std::size_t state_count() const { return transitions.size(); }
    bool stationary() const { return kind == Kind::GridChain; }

    /// Reconstructs the full descriptor of one state.
    JointState state(std::size_t index) const;

    /// Posterior of one sensor at one state.
    belief::WindowedPosterior posterior_of(std::size_t state,
                                           std::size_t sensor) const;
};

/// Mixed-radix code of a joint observation (sensor 0 most significant).
std::uint32_t joint_symbol_code(std::span<const chain::SensorModel> models,
                                std::span<const std::size_t> symbols);

/// Unrolled joint history tree of depth `horizon` with exact beliefs and
/// per-sensor detection payoffs at every node. Requires
/// sum_r log2|E_r| * horizon <= cap_bits; throws SizeCapError otherwise
/// with the would-be node count in the message.
GameInstance build_exact_tree(std::span<const chain::SensorModel> models,
                              int horizon, double cap_bits = 20.0);

/// Stationary chain over the product of per-sensor (symbol x belief cell)
/// spaces. Transition: exact update from the cell-center belief, then
/// nearest-cell projection. Throws SizeCapError above state_cap states.
GameInstance build_grid_chain(std::span<const chain::SensorModel> models,
                              int bins_per_component,
                              std::optional<int> horizon = std::nullopt,
                              std::size_t state_cap = 500000);

/// Nearest-cell code for a posterior; rounding is repaired toward the
/// probability simplex so projected cells always describe valid beliefs.
std::size_t project_to_cell(const GridSensorMeta& meta,
                            const belief::WindowedPosterior& posterior);

/// Cell-center belief for a cell code (time tag left at 0).
belief::WindowedPosterior cell_center(const GridSensorMeta& meta,
                                      std::size_t cell, int window_past);

/// Joint grid state index from per-sensor symbols and exact posteriors.
std::size_t grid_state_index(const GameInstance& instance,
                             std::span<const std::size_t> symbols,
                             std::span<const belief::WindowedPosterior> posteriors);

/// Optimal single-sensor detection by backward induction on the exact tree:
/// sup over stopping times of P(alarm within the precision window).
struct SingleSensorSolution {
    double value = 0.0;              // optimum at the root
    std::vector<std::uint8_t> stop;  // per-node stop/continue rule
    GameInstance instance;
};

SingleSensorSolution single_sensor_optimum(const chain::SensorModel& model,
                                           int horizon, double cap_bits = 20.0);

} // namespace mqd::detect
