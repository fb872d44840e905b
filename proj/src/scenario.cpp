#include "mqd/scenario.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mqd/belief.hpp"
#include "mqd/version.hpp"

namespace mqd::scenario {

using nlohmann::json;

namespace {

// Shape/type problems are parse errors; value problems are semantic.
const json& require_key(const json& doc, const std::string& key) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw ParseError("missing required key \"" + key + "\"");
    }
    return *it;
}

template <typename T>
T as(const json& value, const std::string& what) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ParseError("wrong type for " + what);
    }
}

chain::SensorModel parse_sensor(const json& doc, std::size_t position) {
    const std::string where = "sensors[" + std::to_string(position) + "]";
    if (!doc.is_object()) throw ParseError(where + " must be an object");

    std::vector<std::string> labels;
    if (doc.contains("alphabet")) {
        labels = as<std::vector<std::string>>(doc.at("alphabet"),
                                              where + ".alphabet");
    } else if (doc.contains("alphabet_size")) {
        const int s = as<int>(doc.at("alphabet_size"), where + ".alphabet_size");
        if (s < 2) throw SemanticError(where + ": alphabet_size must be >= 2");
        for (int i = 0; i < s; ++i) labels.push_back("s" + std::to_string(i));
    } else {
        throw ParseError(where + " needs \"alphabet\" or \"alphabet_size\"");
    }

    auto matrix = [&](const char* key) {
        return as<std::vector<std::vector<double>>>(require_key(doc, key),
                                                    where + "." + key);
    };

    std::size_t initial = 0;
    const json& init = require_key(doc, "initial_state");
    if (init.is_string()) {
        bool found = false;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == init.get<std::string>()) {
                initial = i;
                found = true;
            }
        }
        if (!found) {
            throw SemanticError(where + ": initial_state label not in alphabet");
        }
    } else {
        const long idx = as<long>(init, where + ".initial_state");
        if (idx < 0) throw SemanticError(where + ": initial_state negative");
        initial = static_cast<std::size_t>(idx);
    }

    try {
        return chain::SensorModel(
            as<int>(require_key(doc, "id"), where + ".id"),
            chain::ObservationAlphabet(labels),
            chain::TransitionKernel(matrix("pre")),
            chain::TransitionKernel(matrix("post")),
            as<double>(require_key(doc, "q"), where + ".q"), initial,
            doc.value("window_past", 0), doc.value("window_future", 0));
    } catch (const std::invalid_argument& e) {
        throw SemanticError(where + ": " + e.what());
    }
}

games::SimpleGame parse_game(const json& doc, const std::vector<int>& ids) {
    const int p = static_cast<int>(ids.size());
    std::vector<games::Coalition> winning;

    auto player_of = [&](int id) {
        for (int i = 0; i < p; ++i) {
            if (ids[static_cast<std::size_t>(i)] == id) return i;
        }
        throw SemanticError("game references unknown sensor id " +
                            std::to_string(id));
    };

    if (doc.contains("coalitions")) {
        const auto lists = as<std::vector<std::vector<int>>>(
            doc.at("coalitions"), "game.coalitions");
        for (const auto& members : lists) {
            games::Coalition c = 0;
            for (int id : members) c |= (1u << player_of(id));
            winning.push_back(c);
        }
    } else if (doc.contains("weights")) {
        const auto weights =
            as<std::vector<long>>(doc.at("weights"), "game.weights");
        const long quota = as<long>(require_key(doc, "quota"), "game.quota");
        if (weights.size() != static_cast<std::size_t>(p)) {
            throw SemanticError("game.weights must list one weight per sensor");
        }
        try {
            return games::make_weighted(weights, quota);
        } catch (const std::invalid_argument& e) {
            throw SemanticError(std::string("game: ") + e.what());
        }
    } else {
        throw ParseError("game needs \"coalitions\" or \"weights\"+\"quota\"");
    }

    const games::ValidationReport report = games::validate(p, winning);
    if (!report.ok) {
        std::string message = "invalid simple game:";
        for (const auto& v : report.violations) {
            message += "\n  " + v.message;
        }
        throw SemanticError(message);
    }
    return games::SimpleGame(p, std::move(winning));
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void csv_field(std::string& out, const std::string& field) {
    const bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

} // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fingerprint_of(const json& doc) {
    const std::string canonical = doc.dump();
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016" PRIx64,
                  fnv1a64(canonical));
    return buffer;
}

Scenario Scenario::from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("scenario must be a JSON object");

    const json& sensors_doc = require_key(doc, "sensors");
    if (!sensors_doc.is_array() || sensors_doc.empty()) {
        throw ParseError("\"sensors\" must be a non-empty array");
    }
    std::vector<chain::SensorModel> sensors;
    std::vector<int> ids;
    for (std::size_t i = 0; i < sensors_doc.size(); ++i) {
        sensors.push_back(parse_sensor(sensors_doc[i], i));
        ids.push_back(sensors.back().id);
    }
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            if (ids[a] == ids[b]) {
                throw SemanticError("sensor ids must be unique (id " +
                                    std::to_string(ids[a]) + " repeats)");
            }
        }
    }

    Scenario scenario(parse_game(require_key(doc, "game"), ids));
    scenario.sensors = std::move(sensors);
    scenario.sensor_ids = std::move(ids);

    const json& horizon = require_key(doc, "horizon");
    if (horizon.is_string()) {
        if (horizon.get<std::string>() != "infinite") {
            throw ParseError("horizon must be an integer or \"infinite\"");
        }
    } else {
        const int n = as<int>(horizon, "horizon");
        if (n < 0) throw SemanticError("horizon must be >= 0");
        scenario.horizon = n;
    }

    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        scenario.solver.backend = s.value("backend", scenario.solver.backend);
        scenario.solver.bins = s.value("bins", scenario.solver.bins);
        scenario.solver.tol = s.value("tol", scenario.solver.tol);
        scenario.solver.max_iter = s.value("max_iter", scenario.solver.max_iter);
        scenario.solver.damping = s.value("damping", scenario.solver.damping);
        scenario.solver.tree_cap_bits =
            s.value("tree_cap_bits", scenario.solver.tree_cap_bits);
        scenario.solver.state_cap = s.value("state_cap", scenario.solver.state_cap);
    }
    if (scenario.solver.backend != "exact" && scenario.solver.backend != "grid") {
        throw SemanticError("solver.backend must be \"exact\" or \"grid\"");
    }
    if (!scenario.horizon && scenario.solver.backend == "exact") {
        throw SemanticError("the exact-tree backend needs a finite horizon");
    }

    if (doc.contains("simulation")) {
        const json& s = doc.at("simulation");
        scenario.simulation.samples =
            s.value("samples", scenario.simulation.samples);
        scenario.simulation.seed = s.value("seed", scenario.simulation.seed);
        scenario.simulation.max_steps =
            s.value("max_steps", scenario.simulation.max_steps);
    }
    if (scenario.simulation.samples < 1) {
        throw SemanticError("simulation.samples must be >= 1");
    }

    if (doc.contains("output")) {
        scenario.out_dir = doc.at("output").value("dir", scenario.out_dir);
    }

    scenario.fingerprint = fingerprint_of(doc);
    return scenario;
}

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(doc);
}

detect::GameInstance build_instance(const Scenario& scenario,
                                    const std::string& backend_override) {
    const std::string backend =
        backend_override.empty() ? scenario.solver.backend : backend_override;
    if (backend == "exact") {
        if (!scenario.horizon) {
            throw SemanticError("the exact-tree backend needs a finite horizon");
        }
        return detect::build_exact_tree(scenario.sensors, *scenario.horizon,
                                        scenario.solver.tree_cap_bits);
    }
    if (backend == "grid") {
        return detect::build_grid_chain(scenario.sensors, scenario.solver.bins,
                                        scenario.horizon,
                                        scenario.solver.state_cap);
    }
    throw SemanticError("unknown backend \"" + backend + "\"");
}

json solution_to_json(const Scenario& scenario, const std::string& backend,
                      const detect::GameInstance& instance,
                      const equilibrium::EquilibriumSolution& solution) {
    json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["fingerprint"] = scenario.fingerprint;
    doc["backend"] = backend;
    if (scenario.horizon) {
        doc["horizon"] = *scenario.horizon;
    } else {
        doc["horizon"] = "infinite";
    }
    doc["players"] = instance.player_count;
    doc["state_count"] = instance.state_count();
    doc["initial_state"] = instance.initial_state;

    json states = json::array();
    for (std::size_t s = 0; s < instance.state_count(); ++s) {
        json entry;
        if (instance.kind == detect::GameInstance::Kind::ExactTree) {
            entry["time"] = instance.depth[s];
        }
        json symbols = json::array();
        json beliefs = json::array();
        for (std::size_t r = 0; r < scenario.sensors.size(); ++r) {
            symbols.push_back(scenario.sensors[r].alphabet.label(
                instance.symbols[s * scenario.sensors.size() + r]));
            const auto posterior = instance.posterior_of(s, r);
            json b = json::array();
            for (double v : posterior.at) b.push_back(v);
            b.push_back(posterior.past_tail);
            beliefs.push_back(std::move(b));
        }
        entry["symbols"] = std::move(symbols);
        entry["beliefs"] = std::move(beliefs);
        states.push_back(std::move(entry));
    }
    doc["states"] = std::move(states);

    doc["root_values"] = solution.root_values;
    json values = json::array();
    for (const auto& per_player : solution.values) {
        json stages = json::array();
        for (const auto& stage : per_player) stages.push_back(stage);
        values.push_back(std::move(stages));
    }
    doc["values"] = std::move(values);

    json sets = json::array();
    for (const auto& stage : solution.profile.stages) {
        json row = json::array();
        for (const auto& per_player : stage) {
            std::string bits(per_player.size(), '0');
            for (std::size_t x = 0; x < per_player.size(); ++x) {
                if (per_player[x]) bits[x] = '1';
            }
            row.push_back(std::move(bits));
        }
        sets.push_back(std::move(row));
    }
    doc["stopping_sets"] = std::move(sets);
    doc["stationary_profile"] = solution.profile.stationary;

    doc["diagnostics"] = {
        {"converged", solution.diagnostics.converged},
        {"iterations", solution.diagnostics.iterations},
        {"residual", solution.diagnostics.fixed_point_residual},
        {"identity_gap", solution.diagnostics.recursion_identity_gap},
    };
    return doc;
}

equilibrium::StrategyProfile profile_from_solution(
    const json& solution, const detect::GameInstance& instance) {
    equilibrium::StrategyProfile profile;
    profile.stationary = solution.value("stationary_profile", false);
    const json& sets = require_key(solution, "stopping_sets");
    if (!sets.is_array() || sets.empty()) {
        throw ParseError("solution stopping_sets malformed");
    }
    for (const auto& stage : sets) {
        std::vector<std::vector<std::uint8_t>> row;
        for (const auto& bits_doc : stage) {
            const std::string bits = bits_doc.get<std::string>();
            if (bits.size() != instance.state_count()) {
                throw SemanticError(
                    "solution stopping sets do not match the instance");
            }
            std::vector<std::uint8_t> set(bits.size(), 0);
            for (std::size_t x = 0; x < bits.size(); ++x) {
                set[x] = bits[x] == '1' ? 1 : 0;
            }
            row.push_back(std::move(set));
        }
        if (row.size() != static_cast<std::size_t>(instance.player_count)) {
            throw SemanticError("solution player count does not match");
        }
        profile.stages.push_back(std::move(row));
    }
    if (!profile.stationary && instance.horizon &&
        profile.stages.size() != static_cast<std::size_t>(*instance.horizon) + 1) {
        throw SemanticError("solution stage count does not match the horizon");
    }
    return profile;
}

json run_report_to_json(const Scenario& scenario, const sim::RunReport& report) {
    json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["fingerprint"] = scenario.fingerprint;
    doc["samples"] = report.samples;
    doc["seed"] = report.seed;
    json players = json::array();
    for (std::size_t r = 0; r < report.players.size(); ++r) {
        const auto& s = report.players[r];
        players.push_back({
            {"sensor_id", scenario.sensor_ids[r]},
            {"success_rate", s.success_rate},
            {"false_alarm_rate", s.false_alarm_rate},
            {"late_rate", s.late_rate},
            {"no_alarm_rate", s.no_alarm_rate},
            {"standard_errors",
             {{"success", s.se_success},
              {"false_alarm", s.se_false_alarm},
              {"late", s.se_late},
              {"no_alarm", s.se_no_alarm}}},
            {"counts",
             {{"success", s.success},
              {"false_alarm", s.false_alarm},
              {"late", s.late},
              {"no_alarm", s.no_alarm}}},
        });
    }
    doc["players"] = std::move(players);
    json histogram = json::object();
    for (const auto& [stage, count] : report.alarm_histogram) {
        histogram[std::to_string(stage)] = count;
    }
    doc["alarm_histogram"] = std::move(histogram);
    return doc;
}

std::string trajectories_to_csv(const Scenario& scenario,
                                const sim::RunReport& report) {
    std::string out = "trajectory_id";
    const std::size_t p = scenario.sensors.size();
    for (std::size_t r = 0; r < p; ++r) {
        out += ",theta_" + std::to_string(scenario.sensor_ids[r]);
    }
    out += ",alarm_time";
    for (std::size_t r = 0; r < p; ++r) {
        out += ",outcome_" + std::to_string(scenario.sensor_ids[r]);
    }
    out += ",fingerprint,tool_version\r\n";
    for (std::size_t j = 0; j < report.trajectories.size(); ++j) {
        const auto& rec = report.trajectories[j];
        out += std::to_string(j);
        for (long theta : rec.thetas) out += "," + std::to_string(theta);
        out += "," + std::to_string(rec.alarm_time);
        for (auto o : rec.outcomes) {
            out += ",";
            csv_field(out, sim::outcome_name(o));
        }
        out += ",";
        csv_field(out, scenario.fingerprint);
        out += ",";
        csv_field(out, kToolVersion);
        out += "\r\n";
    }
    return out;
}

std::string compare_to_csv(const Scenario& scenario,
                           const std::vector<std::string>& policy_names,
                           const std::vector<sim::RunReport>& rows) {
    std::string out =
        "policy,sensor_id,success_rate,false_alarm_rate,late_rate,"
        "no_alarm_rate,se_success,samples,seed,fingerprint,tool_version\r\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t r = 0; r < rows[k].players.size(); ++r) {
            const auto& s = rows[k].players[r];
            csv_field(out, policy_names[k]);
            out += "," + std::to_string(scenario.sensor_ids[r]);
            out += "," + format_double(s.success_rate);
            out += "," + format_double(s.false_alarm_rate);
            out += "," + format_double(s.late_rate);
            out += "," + format_double(s.no_alarm_rate);
            out += "," + format_double(s.se_success);
            out += "," + std::to_string(rows[k].samples);
            out += "," + std::to_string(rows[k].seed);
            out += ",";
            csv_field(out, scenario.fingerprint);
            out += ",";
            csv_field(out, kToolVersion);
            out += "\r\n";
        }
    }
    return out;
}

} // namespace mqd::scenario
