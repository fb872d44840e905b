#include "mqd/detect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mqd::detect {

namespace {

std::vector<std::size_t> belief_offsets(
    std::span<const chain::SensorModel> models, std::size_t& width) {
    std::vector<std::size_t> offsets(models.size());
    width = 0;
    for (std::size_t r = 0; r < models.size(); ++r) {
        offsets[r] = width;
        width += static_cast<std::size_t>(models[r].window_past) + 2;
    }
    return offsets;
}

void append_posterior(std::vector<double>& flat,
                      const belief::WindowedPosterior& b) {
    flat.insert(flat.end(), b.at.begin(), b.at.end());
    flat.push_back(b.past_tail);
}

/// Enumerates joint observation tuples in symbol-code order.
class JointSymbolIter {
public:
    explicit JointSymbolIter(std::span<const chain::SensorModel> models)
        : models_(models), symbols_(models.size(), 0) {}

    bool done() const { return done_; }
    std::span<const std::size_t> symbols() const { return symbols_; }

    void advance() {
        for (std::size_t r = models_.size(); r-- > 0;) {
            if (++symbols_[r] < models_[r].alphabet.size()) return;
            symbols_[r] = 0;
        }
        done_ = true;
    }

private:
    std::span<const chain::SensorModel> models_;
    std::vector<std::size_t> symbols_;
    bool done_ = false;
};

} // namespace

JointState GameInstance::state(std::size_t index) const {
    JointState js;
    js.time = depth.empty() ? 0 : depth[index];
    js.sensors.resize(static_cast<std::size_t>(player_count));
    for (std::size_t r = 0; r < js.sensors.size(); ++r) {
        js.sensors[r].symbol = symbols[index * player_count + r];
        js.sensors[r].posterior = posterior_of(index, r);
        if (kind == Kind::GridChain) {
            js.sensors[r].grid_cell =
                project_to_cell(grid.sensors[r], js.sensors[r].posterior);
        }
    }
    return js;
}

belief::WindowedPosterior GameInstance::posterior_of(std::size_t state,
                                                     std::size_t sensor) const {
    const std::size_t begin = state * belief_width + belief_offset[sensor];
    const std::size_t comps = (sensor + 1 < belief_offset.size()
                                   ? belief_offset[sensor + 1]
                                   : belief_width) -
                              belief_offset[sensor];
    belief::WindowedPosterior b;
    b.at.assign(beliefs.begin() + begin, beliefs.begin() + begin + comps - 1);
    b.past_tail = beliefs[begin + comps - 1];
    b.time = depth.empty() ? 0 : depth[state];
    return b;
}

std::uint32_t joint_symbol_code(std::span<const chain::SensorModel> models,
                                std::span<const std::size_t> symbols) {
    std::uint32_t code = 0;
    for (std::size_t r = 0; r < models.size(); ++r) {
        code = code * static_cast<std::uint32_t>(models[r].alphabet.size()) +
               static_cast<std::uint32_t>(symbols[r]);
    }
    return code;
}

GameInstance build_exact_tree(std::span<const chain::SensorModel> models,
                              int horizon, double cap_bits) {
    if (models.empty()) throw std::invalid_argument("no sensors");
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");

    double bits_per_step = 0.0;
    double branching = 1.0;
    for (const auto& m : models) {
        bits_per_step += std::log2(static_cast<double>(m.alphabet.size()));
        branching *= static_cast<double>(m.alphabet.size());
    }
    const double bits = bits_per_step * horizon;
    double node_count = 1.0;
    double layer = 1.0;
    for (int d = 1; d <= horizon; ++d) {
        layer *= branching;
        node_count += layer;
    }
    if (bits > cap_bits + 1e-9) {
        throw SizeCapError("exact tree would need about " +
                           std::to_string(node_count) + " nodes (" +
                           std::to_string(bits) + " bits > cap " +
                           std::to_string(cap_bits) + ")");
    }

    GameInstance inst;
    inst.kind = GameInstance::Kind::ExactTree;
    inst.player_count = static_cast<int>(models.size());
    inst.horizon = horizon;
    inst.initial_state = 0;
    inst.belief_offset = belief_offsets(models, inst.belief_width);

    // Root: initial symbols and zero beliefs.
    inst.depth.push_back(0);
    for (const auto& m : models) inst.symbols.push_back(m.initial_state);
    for (const auto& m : models)
        append_posterior(inst.beliefs, belief::initial_belief(m));
    inst.transitions.emplace_back();
    inst.layer_begin = {0, 1};

    std::vector<belief::WindowedPosterior> scratch(models.size());
    for (int d = 0; d < horizon; ++d) {
        const std::size_t begin = inst.layer_begin[static_cast<std::size_t>(d)];
        const std::size_t end = inst.layer_begin[static_cast<std::size_t>(d) + 1];
        for (std::size_t u = begin; u < end; ++u) {
            // One-step predictive law per sensor from this node.
            std::vector<std::vector<double>> laws(models.size());
            for (std::size_t r = 0; r < models.size(); ++r) {
                laws[r] = chain::marginal_step_law(
                    models[r], inst.symbols[u * models.size() + r],
                    belief::predictive_change_mass(models[r],
                                                   inst.posterior_of(u, r)));
            }
            for (JointSymbolIter it(models); !it.done(); it.advance()) {
                double prob = 1.0;
                for (std::size_t r = 0; r < models.size(); ++r) {
                    prob *= laws[r][it.symbols()[r]];
                }
                if (prob <= 0.0) continue;
                for (std::size_t r = 0; r < models.size(); ++r) {
                    scratch[r] = belief::update(
                        models[r], inst.posterior_of(u, r),
                        inst.symbols[u * models.size() + r], it.symbols()[r]);
                }
                const std::size_t child = inst.transitions.size();
                inst.depth.push_back(d + 1);
                inst.symbols.insert(inst.symbols.end(), it.symbols().begin(),
                                    it.symbols().end());
                for (const auto& b : scratch) append_posterior(inst.beliefs, b);
                inst.transitions.emplace_back();
                inst.transitions[u].push_back(
                    {child, prob, joint_symbol_code(models, it.symbols())});
            }
        }
        inst.layer_begin.push_back(inst.transitions.size());
    }

    inst.payoffs.assign(models.size(),
                        std::vector<double>(inst.state_count(), 0.0));
    for (std::size_t s = 0; s < inst.state_count(); ++s) {
        for (std::size_t r = 0; r < models.size(); ++r) {
            inst.payoffs[r][s] = belief::payoff_of(models[r],
                                                   inst.posterior_of(s, r));
        }
    }
    return inst;
}

std::size_t project_to_cell(const GridSensorMeta& meta,
                            const belief::WindowedPosterior& posterior) {
    const int K = meta.bins;
    const int comps = meta.components;
    std::vector<double> values(static_cast<std::size_t>(comps));
    for (int c = 0; c + 1 < comps; ++c) {
        values[static_cast<std::size_t>(c)] = posterior.at.at(
            static_cast<std::size_t>(c));
    }
    values[static_cast<std::size_t>(comps - 1)] = posterior.past_tail;

    std::vector<int> bins(static_cast<std::size_t>(comps));
    double center_sum = 0.0;
    for (int c = 0; c < comps; ++c) {
        double v = std::clamp(values[static_cast<std::size_t>(c)], 0.0, 1.0);
        int j = static_cast<int>(std::lround(v * (K - 1)));
        j = std::clamp(j, 0, K - 1);
        bins[static_cast<std::size_t>(c)] = j;
        center_sum += static_cast<double>(j) / (K - 1);
    }
    // Rounding can push the cell center off the simplex; walk the most
    // over-rounded components back down until the center is a valid belief.
    while (center_sum > 1.0 + 1e-12) {
        int worst = -1;
        double worst_gap = -1.0;
        for (int c = 0; c < comps; ++c) {
            if (bins[static_cast<std::size_t>(c)] == 0) continue;
            const double gap =
                static_cast<double>(bins[static_cast<std::size_t>(c)]) / (K - 1) -
                values[static_cast<std::size_t>(c)];
            if (gap > worst_gap) {
                worst_gap = gap;
                worst = c;
            }
        }
        if (worst < 0) break;
        --bins[static_cast<std::size_t>(worst)];
        center_sum -= 1.0 / (K - 1);
    }

    std::size_t code = 0;
    for (int c = 0; c < comps; ++c) {
        code = code * static_cast<std::size_t>(K) +
               static_cast<std::size_t>(bins[static_cast<std::size_t>(c)]);
    }
    return code;
}

belief::WindowedPosterior cell_center(const GridSensorMeta& meta,
                                      std::size_t cell, int window_past) {
    const int K = meta.bins;
    const int comps = meta.components;
    std::vector<double> values(static_cast<std::size_t>(comps));
    for (int c = comps - 1; c >= 0; --c) {
        values[static_cast<std::size_t>(c)] =
            static_cast<double>(cell % static_cast<std::size_t>(K)) / (K - 1);
        cell /= static_cast<std::size_t>(K);
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    belief::WindowedPosterior b;
    if (sum > 1.0) {
        // Unreachable off-simplex cell; normalize so it still describes a
        // valid belief, with the tail taken as the exact complement.
        b.at.assign(values.begin(), values.end() - 1);
        double head = 0.0;
        for (double& v : b.at) {
            v /= sum;
            head += v;
        }
        b.past_tail = std::max(0.0, 1.0 - head);
    } else {
        b.at.assign(values.begin(), values.end() - 1);
        b.past_tail = values.back();
    }
    b.time = 0;
    (void)window_past;
    return b;
}

GameInstance build_grid_chain(std::span<const chain::SensorModel> models,
                              int bins_per_component,
                              std::optional<int> horizon,
                              std::size_t state_cap) {
    if (models.empty()) throw std::invalid_argument("no sensors");
    if (bins_per_component < 2) {
        throw std::invalid_argument("bins_per_component must be >= 2");
    }

    GameInstance inst;
    inst.kind = GameInstance::Kind::GridChain;
    inst.player_count = static_cast<int>(models.size());
    inst.horizon = horizon;
    inst.belief_offset = belief_offsets(models, inst.belief_width);

    double joint_count = 1.0;
    for (const auto& m : models) {
        GridSensorMeta meta;
        meta.bins = bins_per_component;
        meta.components = m.window_past + 2;
        meta.cells = 1;
        for (int c = 0; c < meta.components; ++c) {
            meta.cells *= static_cast<std::size_t>(bins_per_component);
        }
        meta.symbol_count = m.alphabet.size();
        joint_count *= static_cast<double>(meta.states());
        inst.grid.sensors.push_back(meta);
    }
    if (joint_count > static_cast<double>(state_cap)) {
        throw SizeCapError("grid chain would need " +
                           std::to_string(joint_count) + " states (cap " +
                           std::to_string(state_cap) + ")");
    }
    const std::size_t total = static_cast<std::size_t>(joint_count + 0.5);

    inst.grid.strides.assign(models.size(), 1);
    for (std::size_t r = models.size(); r-- > 1;) {
        inst.grid.strides[r - 1] =
            inst.grid.strides[r] * inst.grid.sensors[r].states();
    }

    inst.transitions.resize(total);
    inst.symbols.resize(total * models.size());
    inst.beliefs.resize(total * inst.belief_width);
    inst.payoffs.assign(models.size(), std::vector<double>(total, 0.0));

    std::vector<belief::WindowedPosterior> centers(models.size());
    std::vector<belief::WindowedPosterior> updated(models.size());
    for (std::size_t s = 0; s < total; ++s) {
        // Decode per-sensor (symbol, cell).
        std::size_t rem = s;
        for (std::size_t r = 0; r < models.size(); ++r) {
            const auto& meta = inst.grid.sensors[r];
            const std::size_t local = rem / inst.grid.strides[r];
            rem %= inst.grid.strides[r];
            const std::size_t symbol = local / meta.cells;
            const std::size_t cell = local % meta.cells;
            inst.symbols[s * models.size() + r] = symbol;
            centers[r] = cell_center(meta, cell, models[r].window_past);
            std::copy(centers[r].at.begin(), centers[r].at.end(),
                      inst.beliefs.begin() + s * inst.belief_width +
                          inst.belief_offset[r]);
            inst.beliefs[s * inst.belief_width + inst.belief_offset[r] +
                         centers[r].at.size()] = centers[r].past_tail;
            inst.payoffs[r][s] = belief::payoff_of(models[r], centers[r]);
        }

        std::vector<std::vector<double>> laws(models.size());
        for (std::size_t r = 0; r < models.size(); ++r) {
            laws[r] = chain::marginal_step_law(
                models[r], inst.symbols[s * models.size() + r],
                belief::predictive_change_mass(models[r], centers[r]));
        }
        for (JointSymbolIter it(models); !it.done(); it.advance()) {
            double prob = 1.0;
            for (std::size_t r = 0; r < models.size(); ++r) {
                prob *= laws[r][it.symbols()[r]];
            }
            if (prob <= 0.0) continue;
            std::size_t next = 0;
            for (std::size_t r = 0; r < models.size(); ++r) {
                const auto& meta = inst.grid.sensors[r];
                updated[r] = belief::update(models[r], centers[r],
                                            inst.symbols[s * models.size() + r],
                                            it.symbols()[r]);
                const std::size_t cell = project_to_cell(meta, updated[r]);
                next += (it.symbols()[r] * meta.cells + cell) *
                        inst.grid.strides[r];
            }
            inst.transitions[s].push_back(
                {next, prob, joint_symbol_code(models, it.symbols())});
        }
    }

    // Initial joint state: initial symbols with zero beliefs.
    inst.initial_state = 0;
    for (std::size_t r = 0; r < models.size(); ++r) {
        const auto& meta = inst.grid.sensors[r];
        const std::size_t cell =
            project_to_cell(meta, belief::initial_belief(models[r]));
        inst.initial_state +=
            (models[r].initial_state * meta.cells + cell) *
            inst.grid.strides[r];
    }
    return inst;
}

std::size_t grid_state_index(
    const GameInstance& instance, std::span<const std::size_t> symbols,
    std::span<const belief::WindowedPosterior> posteriors) {
    if (instance.kind != GameInstance::Kind::GridChain) {
        throw std::invalid_argument("grid_state_index needs a grid instance");
    }
    std::size_t index = 0;
    for (std::size_t r = 0; r < instance.grid.sensors.size(); ++r) {
        const auto& meta = instance.grid.sensors[r];
        const std::size_t cell = project_to_cell(meta, posteriors[r]);
        index += (symbols[r] * meta.cells + cell) * instance.grid.strides[r];
    }
    return index;
}

SingleSensorSolution single_sensor_optimum(const chain::SensorModel& model,
                                           int horizon, double cap_bits) {
    SingleSensorSolution solution;
    solution.instance = build_exact_tree({&model, 1}, horizon, cap_bits);
    const GameInstance& inst = solution.instance;
    const int N = horizon;

    std::vector<double> value(inst.state_count(), 0.0);
    solution.stop.assign(inst.state_count(), 0);

    for (int d = N; d >= 1; --d) {
        const std::size_t begin = inst.layer_begin[static_cast<std::size_t>(d)];
        const std::size_t end = inst.layer_begin[static_cast<std::size_t>(d) + 1];
        for (std::size_t u = begin; u < end; ++u) {
            const double f = inst.payoffs[0][u];
            if (d == N) {
                solution.stop[u] = 1;
                value[u] = f;
                continue;
            }
            double cont = 0.0;
            for (const auto& t : inst.transitions[u]) {
                cont += t.prob * value[t.next];
            }
            const bool stop = f >= cont;
            solution.stop[u] = stop ? 1 : 0;
            value[u] = stop ? f : cont;
        }
    }

    if (N == 0) {
        solution.value = inst.payoffs[0][inst.initial_state];
        solution.stop[inst.initial_state] = 1;
    } else {
        double root = 0.0;
        for (const auto& t : inst.transitions[inst.initial_state]) {
            root += t.prob * value[t.next];
        }
        solution.value = root;
    }
    return solution;
}

} // namespace mqd::detect
