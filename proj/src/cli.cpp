#include "mqd/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "mqd/scenario.hpp"
#include "mqd/version.hpp"

namespace mqd::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitSemantic = 1;
constexpr int kExitParse = 2;
constexpr double kGainTolerance = 1e-9;

struct Loaded {
    scenario::Scenario scenario;
    std::string out_dir;
};

Loaded load(const CommonOptions& options) {
    scenario::Scenario sc = scenario::Scenario::from_file(options.config_path);
    if (options.samples) sc.simulation.samples = *options.samples;
    if (options.seed) sc.simulation.seed = *options.seed;
    std::string out = options.out_dir.empty() ? sc.out_dir : options.out_dir;
    return {std::move(sc), std::move(out)};
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& contents) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
}

json load_solution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scenario::ParseError("cannot open solution file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw scenario::ParseError(std::string("solution is not valid JSON: ") +
                                   e.what());
    }
    return doc;
}

void check_fingerprint(const scenario::Scenario& sc, const json& solution) {
    const std::string recorded = solution.value("fingerprint", "");
    if (recorded != sc.fingerprint) {
        throw scenario::SemanticError(
            "solution fingerprint " + recorded +
            " does not match the scenario (" + sc.fingerprint + ")");
    }
}

// Shared error handling: parse problems exit 2, semantic problems exit 1.
template <typename Fn>
int guarded(const CommonOptions& options, Fn&& fn) {
    try {
        return fn();
    } catch (const scenario::ParseError& e) {
        std::cerr << "error (parse): " << e.what() << "\n";
        return kExitParse;
    } catch (const scenario::SemanticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    } catch (const detect::SizeCapError& e) {
        std::cerr << "error (size cap): " << e.what() << "\n";
        return kExitSemantic;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
    (void)options;
}

equilibrium::EquilibriumSolution solve_scenario(
    const scenario::Scenario& sc, const detect::GameInstance& instance) {
    if (sc.horizon) {
        return equilibrium::solve_finite(instance, sc.game);
    }
    return equilibrium::solve_infinite(instance, sc.game, sc.solver.tol,
                                       sc.solver.max_iter, sc.solver.damping);
}

} // namespace

int cmd_validate(const CommonOptions& options) {
    return guarded(options, [&]() {
        const scenario::Scenario sc =
            scenario::Scenario::from_file(options.config_path);
        if (!options.quiet) {
            std::cout << "ok: " << sc.sensors.size() << " sensor(s), "
                      << sc.game.winning_coalitions().size()
                      << " winning coalition(s), horizon "
                      << (sc.horizon ? std::to_string(*sc.horizon) : "infinite")
                      << ", fingerprint " << sc.fingerprint << "\n";
        }
        return kExitOk;
    });
}

int cmd_solve(const CommonOptions& options) {
    return guarded(options, [&]() {
        Loaded loaded = load(options);
        const scenario::Scenario& sc = loaded.scenario;
        const std::string backend =
            options.backend.empty() ? sc.solver.backend : options.backend;
        const detect::GameInstance instance =
            scenario::build_instance(sc, backend);
        const equilibrium::EquilibriumSolution solution =
            solve_scenario(sc, instance);

        const json doc =
            scenario::solution_to_json(sc, backend, instance, solution);
        write_file(loaded.out_dir, "solution.json", doc.dump(2) + "\n");

        if (!options.quiet) {
            std::cout << "solved " << instance.state_count() << " states ("
                      << backend << "); root values:";
            for (double v : solution.root_values) std::cout << " " << v;
            std::cout << "\n";
            if (!solution.diagnostics.converged) {
                std::cout << "warning: fixed-point iteration did not converge"
                          << " (residual "
                          << solution.diagnostics.fixed_point_residual << ")\n";
            }
            std::cout << "wrote " << loaded.out_dir << "/solution.json\n";
        }
        return kExitOk;
    });
}

int cmd_simulate(const CommonOptions& options,
                 const std::string& solution_path) {
    return guarded(options, [&]() {
        Loaded loaded = load(options);
        const scenario::Scenario& sc = loaded.scenario;
        const json solution_doc = load_solution_file(solution_path);
        check_fingerprint(sc, solution_doc);

        const std::string backend = solution_doc.value("backend", "exact");
        const detect::GameInstance instance =
            scenario::build_instance(sc, backend);
        const equilibrium::StrategyProfile profile =
            scenario::profile_from_solution(solution_doc, instance);

        const sim::RunReport report =
            sim::run(sc.sensors, sc.game, instance, profile,
                     sc.simulation.samples, sc.simulation.seed,
                     sc.simulation.max_steps);

        write_file(loaded.out_dir, "report.json",
                   scenario::run_report_to_json(sc, report).dump(2) + "\n");
        write_file(loaded.out_dir, "trajectories.csv",
                   scenario::trajectories_to_csv(sc, report));

        if (!options.quiet) {
            std::cout << "simulated " << report.samples
                      << " trajectories; success rates:";
            for (const auto& p : report.players) {
                std::cout << " " << p.success_rate;
            }
            std::cout << "\nwrote " << loaded.out_dir << "/report.json and "
                      << loaded.out_dir << "/trajectories.csv\n";
        }
        return kExitOk;
    });
}

int cmd_certify(const CommonOptions& options, const std::string& solution_path,
                const CertifyOptionsCli& certify) {
    return guarded(options, [&]() {
        Loaded loaded = load(options);
        const scenario::Scenario& sc = loaded.scenario;
        const json solution_doc = load_solution_file(solution_path);
        check_fingerprint(sc, solution_doc);

        const std::string backend = solution_doc.value("backend", "exact");
        const detect::GameInstance instance =
            scenario::build_instance(sc, backend);
        const equilibrium::StrategyProfile profile =
            scenario::profile_from_solution(solution_doc, instance);

        equilibrium::CertifyOptions opts;
        opts.sampled = certify.sampled;
        opts.cap_bits = certify.cap_bits;
        opts.random_samples = certify.random_samples;
        opts.seed = sc.simulation.seed;
        const equilibrium::DeviationReport report =
            equilibrium::certify_equilibrium(instance, sc.game, profile, opts);

        bool pass = true;
        for (double gain : report.max_gain) {
            if (gain > kGainTolerance) pass = false;
        }

        json doc;
        doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
        doc["fingerprint"] = sc.fingerprint;
        doc["mode"] = report.exhaustive ? "exhaustive" : "sampled";
        doc["alternatives_checked"] = report.alternatives_checked;
        doc["max_gain"] = report.max_gain;
        doc["gain_tolerance"] = kGainTolerance;
        doc["pass"] = pass;
        write_file(loaded.out_dir, "certificate.json", doc.dump(2) + "\n");

        if (!options.quiet) {
            std::cout << (pass ? "certified" : "DEVIATION FOUND") << " ("
                      << doc["mode"].get<std::string>() << ", "
                      << report.alternatives_checked
                      << " alternatives); max gains:";
            for (double g : report.max_gain) std::cout << " " << g;
            std::cout << "\nwrote " << loaded.out_dir << "/certificate.json\n";
        }
        return pass ? kExitOk : kExitSemantic;
    });
}

int cmd_compare(const CommonOptions& options,
                const std::vector<std::string>& solution_paths,
                bool with_fixed_time) {
    return guarded(options, [&]() {
        Loaded loaded = load(options);
        const scenario::Scenario& sc = loaded.scenario;

        std::vector<std::string> names;
        std::vector<equilibrium::StrategyProfile> profiles;
        std::string backend =
            options.backend.empty() ? sc.solver.backend : options.backend;

        for (const auto& path : solution_paths) {
            const json doc = load_solution_file(path);
            check_fingerprint(sc, doc);
            backend = doc.value("backend", backend);
        }

        const detect::GameInstance instance =
            scenario::build_instance(sc, backend);

        for (const auto& path : solution_paths) {
            const json doc = load_solution_file(path);
            if (doc.value("backend", "") != backend) {
                throw scenario::SemanticError(
                    "compared solutions must share one backend");
            }
            profiles.push_back(scenario::profile_from_solution(doc, instance));
            names.push_back(std::filesystem::path(path).filename().string());
        }

        if (with_fixed_time) {
            if (!sc.horizon) {
                throw scenario::SemanticError(
                    "fixed-time baseline needs a finite horizon");
            }
            // Best fixed time under the prior alone: the earliest stage whose
            // window already covers all change times up to it.
            for (std::size_t r = 0; r < sc.sensors.size(); ++r) {
                const int best =
                    std::min(*sc.horizon, sc.sensors[r].window_past + 1);
                if (*sc.horizon >= 1) {
                    profiles.push_back(equilibrium::make_fixed_time_profile(
                        instance, std::max(1, best)));
                    names.push_back(
                        "fixed_time_" + std::to_string(std::max(1, best)));
                    break; // one shared baseline stage, taken from sensor 0
                }
            }
        }

        const std::vector<sim::RunReport> rows = sim::compare_policies(
            sc.sensors, sc.game, instance, profiles, sc.simulation.samples,
            sc.simulation.seed, sc.simulation.max_steps);

        json doc;
        doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
        doc["fingerprint"] = sc.fingerprint;
        json policies = json::array();
        for (std::size_t k = 0; k < rows.size(); ++k) {
            json row = scenario::run_report_to_json(sc, rows[k]);
            row["policy"] = names[k];
            row.erase("tool");
            row.erase("fingerprint");
            policies.push_back(std::move(row));
        }
        doc["policies"] = std::move(policies);
        write_file(loaded.out_dir, "compare.json", doc.dump(2) + "\n");
        write_file(loaded.out_dir, "compare.csv",
                   scenario::compare_to_csv(sc, names, rows));

        if (!options.quiet) {
            std::cout << "compared " << rows.size() << " polic"
                      << (rows.size() == 1 ? "y" : "ies") << "; wrote "
                      << loaded.out_dir << "/compare.json and "
                      << loaded.out_dir << "/compare.csv\n";
        }
        return kExitOk;
    });
}

} // namespace mqd::cli
