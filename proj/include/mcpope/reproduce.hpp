#pragma once

#include "mcpope/types.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcpope {

enum class ReproduceCase { Table1, Constrained3, Pathological6, RuCvar, OmegaAdmn };

ReproduceCase parse_reproduce_case(std::string_view name);
std::string_view to_string(ReproduceCase reproduce_case);

struct ComparisonRow {
    std::string quantity;
    double paper_value = 0.0;
    double computed_value = 0.0;
    double tolerance = 0.0;

    double abs_diff() const { return std::abs(computed_value - paper_value); }
    bool pass() const { return abs_diff() <= tolerance; }
};

/// Unset fields fall back to the case's settings in the reference table.
struct ReproduceOptions {
    std::uint64_t seed = 0;
    std::optional<int> workers;
    std::optional<Index> base_samples;
    std::optional<int> bias_depth;
    /// ru-cvar: run only this tail level.
    std::optional<double> quantile;
    std::optional<Index> scenario_count;
};

struct ReproduceOutcome {
    std::vector<ComparisonRow> rows;
    /// One optimizer JSON result per optimization performed, tagged with its inputs.
    nlohmann::json results = nlohmann::json::array();

    bool all_pass() const;
};

ReproduceOutcome reproduce(ReproduceCase reproduce_case, const ReproduceOptions& options);

/// Columns quantity, paper_value, computed_value, abs_diff, tolerance, pass.
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

} // namespace mcpope
