// mqd: multivariate disorder detection via stopping games.
//
// validate | solve | simulate | certify | compare over a scenario config.
#include <CLI11.hpp>

#include "mqd/cli.hpp"
#include "mqd/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Multivariate disorder detection via voting stopping games"};
    app.set_version_flag("--version", std::string(mqd::kToolVersion));
    app.require_subcommand(1);

    mqd::cli::CommonOptions common;
    std::string solution_path;
    std::vector<std::string> solution_paths;
    mqd::cli::CertifyOptionsCli certify;
    bool with_fixed_time = false;

    auto add_common = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("--config", common.config_path, "scenario config (JSON)")
            ->required();
        cmd->add_flag("--quiet", common.quiet, "suppress progress output");
        if (needs_out) {
            cmd->add_option("--out", common.out_dir,
                            "output directory (default from config)");
        }
    };

    CLI::App* validate = app.add_subcommand(
        "validate", "check the scenario schema and the game axioms");
    add_common(validate, false);

    CLI::App* solve = app.add_subcommand(
        "solve", "compute the equilibrium and write solution.json");
    add_common(solve, true);
    solve->add_option("--backend", common.backend,
                      "override the solver backend (exact|grid)");

    CLI::App* simulate = app.add_subcommand(
        "simulate", "run Monte Carlo on a solved profile");
    add_common(simulate, true);
    simulate->add_option("--solution", solution_path, "solution.json path")
        ->required();
    simulate->add_option("--samples", [&common](const CLI::results_t& res) {
        common.samples = std::stol(res[0]);
        return true;
    }, "override the sample count");
    simulate->add_option("--seed", [&common](const CLI::results_t& res) {
        common.seed = std::stoull(res[0]);
        return true;
    }, "override the simulation seed");

    CLI::App* certify_cmd = app.add_subcommand(
        "certify", "search for profitable unilateral deviations");
    add_common(certify_cmd, true);
    certify_cmd->add_option("--solution", solution_path, "solution.json path")
        ->required();
    certify_cmd->add_flag("--sampled", certify.sampled,
                          "allow the sampled search above the cap");
    certify_cmd->add_option("--cap-bits", certify.cap_bits,
                            "exhaustive search cap on decision bits");
    certify_cmd->add_option("--deviation-samples", certify.random_samples,
                            "random strategies per player in sampled mode");

    CLI::App* compare = app.add_subcommand(
        "compare", "same-seed comparison of solved policies");
    add_common(compare, true);
    compare->add_option("--solution", solution_paths,
                        "solution.json paths (repeatable)");
    compare->add_flag("--with-fixed-time", with_fixed_time,
                      "include the best fixed-time baseline");
    compare->add_option("--backend", common.backend,
                        "override the backend (exact|grid)");
    compare->add_option("--samples", [&common](const CLI::results_t& res) {
        common.samples = std::stol(res[0]);
        return true;
    }, "override the sample count");
    compare->add_option("--seed", [&common](const CLI::results_t& res) {
        common.seed = std::stoull(res[0]);
        return true;
    }, "override the simulation seed");

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) return mqd::cli::cmd_validate(common);
    if (solve->parsed()) return mqd::cli::cmd_solve(common);
    if (simulate->parsed()) return mqd::cli::cmd_simulate(common, solution_path);
    if (certify_cmd->parsed()) {
        return mqd::cli::cmd_certify(common, solution_path, certify);
    }
    if (compare->parsed()) {
        return mqd::cli::cmd_compare(common, solution_paths, with_fixed_time);
    }
    return 0;
}
