#pragma once

#include "mcpope/reference.hpp"
#include "mcpope/risk.hpp"
#include "mcpope/scenarios.hpp"
#include "mcpope/simplex.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mcpope {

/// w . C . w - lambda R . w, evaluated directly on the weights.
struct AnalyticQuadratic {
    CovarianceSpec covariance;
    double lambda = 0.0;
    std::optional<Weights> expected_returns;
};

/// A risk functional of the portfolio returns over a shared scenario matrix.
struct Distributional {
    std::shared_ptr<const ScenarioMatrix> scenarios;
    RiskSpec risk;
};

using ObjectiveSource = std::variant<AnalyticQuadratic, Distributional>;

struct OptimizationProblem {
    ObjectiveSource objective;
    ConstraintSet constraints;
    /// The seed field is ignored; each search is seeded explicitly.
    SamplerConfig sampler;
    bool include_equal_weight_baseline = true;
    /// Adds base_count even (exponential) samples from a separate stream to the pool.
    bool include_even_pool = false;

    Index n_assets() const;
    /// Throws std::invalid_argument when the parts disagree on the asset count.
    void validate() const;
};

struct OptimizationResult {
    Weights best_weights;
    double best_risk = 0.0;
    std::uint64_t candidates_evaluated = 0;
    std::uint64_t candidates_accepted = 0;
    std::uint64_t master_seed = 0;
    int worker_count = 1;
    double elapsed_ms = 0.0;
};

/// Risk of one portfolio under the problem's objective. Throws what the risk function throws.
double objective_value(const OptimizationProblem& problem, const Eigen::Ref<const Weights>& weights);

/// Size of the candidate pool one search submits to the constraint filter.
std::uint64_t candidate_pool_size(const OptimizationProblem& problem);

/// One search: k base rows, edge-vertex levels p = 0..P, optional even pool and
/// equal-weight baseline, rejection filter, then the minimum risk. Ties go to the
/// lexicographically smallest weights; a candidate whose risk cannot be evaluated
/// counts as +infinity. Throws InfeasibleError.
OptimizationResult optimize_single(const OptimizationProblem& problem, std::uint64_t seed);

/// Best of `workers` independent searches seeded mix_seed(master_seed, w), w = 1..workers,
/// run on up to `max_threads` threads (0: hardware concurrency). The result does not
/// depend on the thread count or schedule. Throws InfeasibleError only when every
/// worker found no feasible candidate.
OptimizationResult run_workers(const OptimizationProblem& problem, int workers,
                               std::uint64_t master_seed, unsigned max_threads = 0);

/// {"weights", "risk", "risk_spec", "candidates_evaluated", "candidates_accepted",
///  "master_seed", "worker_count", "elapsed_ms"}; non-finite risk is written as null.
nlohmann::json to_json(const OptimizationResult& result, const std::string& risk_spec);
std::string risk_spec_text(const OptimizationProblem& problem);

// ---------------------------------------------------------------------------
// Consistency diagnostics between analytic and sampled computations
// ---------------------------------------------------------------------------

enum class Computation {
    AnalyticInput,
    AnalyticRealized,
    MonteCarloInput,
    MonteCarloRealized,
    MonteCarloDistributional,
};

std::string_view to_string(Computation computation);

struct ComputationOutcome {
    Computation computation;
    Weights weights;
    double objective = 0.0;
};

struct WeightDifference {
    Computation first;
    Computation second;
    double max_abs = 0.0;
};

struct StabilityReport {
    std::vector<ComputationOutcome> computations;
    std::vector<WeightDifference> differences;
    double covariance_delta = 0.0;
    /// The realized covariance of the scenarios is identically zero.
    bool degenerate_scenarios = false;

    const ComputationOutcome* find(Computation computation) const;
    double difference(Computation first, Computation second) const;
};

struct StabilityOptions {
    int workers = 1;
    std::uint64_t master_seed = 0;
    bool include_equal_weight_baseline = true;
    /// Known analytic optimum for the input covariance; otherwise the lattice oracle is used.
    std::optional<Weights> analytic_input;
    /// Lattice budget for the analytic members; they are skipped above 8 assets.
    double grid_max_points = 2e6;
    int grid_polish_steps = 40;
};

StabilityReport stability_diagnostics(const CovarianceSpec& input, double lambda,
                                      const std::optional<Weights>& expected_returns,
                                      std::shared_ptr<const ScenarioMatrix> scenarios,
                                      const SamplerConfig& sampler,
                                      const ConstraintSet& constraints,
                                      const StabilityOptions& options = {});

nlohmann::json to_json(const StabilityReport& report);

} // namespace mcpope
