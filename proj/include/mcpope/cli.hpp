#pragma once

#include "mcpope/reproduce.hpp"
#include "mcpope/risk.hpp"
#include "mcpope/scenarios.hpp"
#include "mcpope/simplex.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mcpope {

enum class Command { Sample, Simulate, Optimize, Diagnose, Reproduce };

std::string_view to_string(Command command);

/// Thrown by parse_config for unknown flags, malformed values and missing inputs.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Defaults: seed 0, workers 1, base_samples 10000, bias_depth 5, scenario_count 10000,
/// method ev. Values read from a --config document apply first and flags override them.
struct RunConfig {
    Command command = Command::Optimize;
    std::uint64_t seed = 0;
    int workers = 1;
    Index base_samples = 10000;
    int bias_depth = 5;
    bool include_equal_weight_baseline = true;
    bool include_even_pool = false;

    // sample
    SamplingMethod method = SamplingMethod::EdgeVertex;
    Index n_assets = 0;

    // simulate, optimize, diagnose
    Index scenario_count = 10000;
    std::optional<std::filesystem::path> scenarios_path;
    std::optional<DistributionSpec> distribution;
    std::optional<std::filesystem::path> covariance_path;
    std::optional<Weights> expected_returns;
    std::optional<RiskSpec> risk;
    ConstraintSet constraints;

    // reproduce
    std::optional<ReproduceCase> reproduce_case;
    std::optional<double> quantile;
    bool scenario_count_given = false;
    bool base_samples_given = false;
    bool bias_depth_given = false;
    bool workers_given = false;

    // output
    std::optional<std::filesystem::path> output_path;
    std::optional<std::filesystem::path> json_path;
    bool header = false;
};

/// `args` excludes the program name. Throws UsageError with a one-line message.
RunConfig parse_config(const std::vector<std::string>& args);

/// Executes the command. Returns 0 on success, 1 when a reproduce row misses its tolerance.
/// Throws on I/O or validation errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + run, mapping every error to a one-line message on `err` and exit code 2.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mcpope
