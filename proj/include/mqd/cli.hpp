// Subcommand implementations behind the mqd binary.
//
// Exit-code contract: 0 success, 1 semantic failure, 2 input/parse failure.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mqd::cli {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;  // overrides the scenario output dir when nonempty
    std::string backend;  // overrides the scenario backend when nonempty
    std::optional<long> samples;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

struct CertifyOptionsCli {
    bool sampled = false;
    int cap_bits = 16;
    int random_samples = 256;
};

int cmd_validate(const CommonOptions& options);
int cmd_solve(const CommonOptions& options);
int cmd_simulate(const CommonOptions& options, const std::string& solution_path);
int cmd_certify(const CommonOptions& options, const std::string& solution_path,
                const CertifyOptionsCli& certify);
int cmd_compare(const CommonOptions& options,
                const std::vector<std::string>& solution_paths,
                bool with_fixed_time);

} // namespace mqd::cli
