#include "mcpope/optimizer.hpp"

#include "mcpope/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace mcpope {

namespace {

constexpr std::uint64_t kEvenPoolStream = 0x45564e504f4f4cULL;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Total order used for selection and merging: risk, then lexicographic weights.
template <typename A, typename B>
bool precedes(double risk, const A& w, double best_risk, const B& best)
{
    if (risk != best_risk)
        return risk < best_risk;
    return std::lexicographical_compare(w.begin(), w.end(), best.begin(), best.end());
}

double elapsed_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

/// Evaluates candidates one by one, reusing the return buffer.
class CandidateEvaluator {
public:
    explicit CandidateEvaluator(const ObjectiveSource& source) : source_(source)
    {
        if (const auto* d = std::get_if<Distributional>(&source_))
            buffer_.resize(d->scenarios->scenario_count());
    }

    double operator()(const Eigen::Ref<const Weights>& w)
    {
        return std::visit(
            Overloaded{
                [&](const AnalyticQuadratic& q) {
                    double value = w.dot(q.covariance.matrix() * w);
                    if (q.expected_returns)
                        value -= q.lambda * q.expected_returns->dot(w);
                    return value;
                },
                [&](const Distributional& d) {
                    buffer_.noalias() = d.scenarios->returns() * w;
                    return evaluate(d.risk, buffer_, w);
                },
            },
            source_);
    }

private:
    const ObjectiveSource& source_;
    Eigen::VectorXd buffer_;
};

} // namespace

Index OptimizationProblem::n_assets() const
{
    return std::visit(Overloaded{
                          [](const AnalyticQuadratic& q) { return q.covariance.size(); },
                          [](const Distributional& d) {
                              return d.scenarios ? d.scenarios->asset_count() : Index(0);
                          },
                      },
                      objective);
}

void OptimizationProblem::validate() const
{
    const Index n = n_assets();
    std::visit(Overloaded{
                   [&](const AnalyticQuadratic& q) {
                       if (q.expected_returns && q.expected_returns->size() != n)
                           throw std::invalid_argument("expected returns need one entry per asset");
                   },
                   [&](const Distributional& d) {
                       if (!d.scenarios)
                           throw std::invalid_argument("distributional objective needs scenarios");
                       mcpope::validate(d.risk);
                       if (const auto* mv = std::get_if<MeanVariance>(&d.risk);
                           mv && mv->expected_returns && mv->expected_returns->size() != n)
                           throw std::invalid_argument("expected returns need one entry per asset");
                   },
               },
               objective);
    if (sampler.n_assets != n)
        throw std::invalid_argument("sampler asset count differs from the objective's");
    SamplerConfig config = sampler;
    config.validate();
    constraints.validate(n);
}

double objective_value(const OptimizationProblem& problem, const Eigen::Ref<const Weights>& weights)
{
    if (weights.size() != problem.n_assets())
        throw std::invalid_argument("weights dimension differs from the problem's");
    CandidateEvaluator evaluator(problem.objective);
    return evaluator(weights);
}

std::uint64_t candidate_pool_size(const OptimizationProblem& problem)
{
    const auto k = static_cast<std::uint64_t>(problem.sampler.base_count);
    std::uint64_t size = k * static_cast<std::uint64_t>(problem.sampler.bias_depth + 1);
    if (problem.include_even_pool)
        size += k;
    if (problem.include_equal_weight_baseline)
        size += 1;
    return size;
}

OptimizationResult optimize_single(const OptimizationProblem& problem, std::uint64_t seed)
{
    const auto start = std::chrono::steady_clock::now();
    problem.validate();
    const Index n = problem.n_assets();

    SamplerConfig config = problem.sampler;
    config.seed = seed;
    WeightBatch pool = sample_edge_vertex(config);
    if (problem.include_even_pool) {
        SamplerConfig even = config;
        even.seed = mix_seed(seed, kEvenPoolStream);
        const WeightBatch extra = sample_exponential(even);
        const Index offset = pool.rows();
        pool.conservativeResize(offset + extra.rows(), Eigen::NoChange);
        pool.bottomRows(extra.rows()) = extra;
    }
    if (problem.include_equal_weight_baseline) {
        pool.conservativeResize(pool.rows() + 1, Eigen::NoChange);
        pool.row(pool.rows() - 1).setConstant(1.0 / static_cast<double>(n));
    }

    const FilterResult filtered = filter_constraints(pool, problem.constraints);
    const WeightBatch& accepted = filtered.accepted;

    CandidateEvaluator evaluator(problem.objective);
    Index best_row = -1;
    double best_risk = kInfinity;
    for (Index m = 0; m < accepted.rows(); ++m) {
        const auto w = accepted.row(m).transpose();
        double risk = kInfinity;
        try {
            risk = evaluator(w);
        } catch (const RiskError&) {
        }
        if (std::isnan(risk))
            risk = kInfinity;
        if (best_row < 0 || precedes(risk, accepted.row(m), best_risk, accepted.row(best_row))) {
            best_row = m;
            best_risk = risk;
        }
    }

    OptimizationResult result;
    result.best_weights = accepted.row(best_row).transpose();
    result.best_risk = best_risk;
    result.candidates_evaluated = static_cast<std::uint64_t>(pool.rows());
    result.candidates_accepted = static_cast<std::uint64_t>(accepted.rows());
    result.master_seed = seed;
    result.worker_count = 1;
    result.elapsed_ms = elapsed_since(start);
    return result;
}

OptimizationResult run_workers(const OptimizationProblem& problem, int workers,
                               std::uint64_t master_seed, unsigned max_threads)
{
    if (workers < 1)
        throw std::invalid_argument("worker count must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    problem.validate();

    const auto slots = static_cast<std::size_t>(workers);
    std::vector<std::optional<OptimizationResult>> partial(slots);
    std::vector<std::exception_ptr> failures(slots);
    std::vector<bool> infeasible(slots, false);
    std::atomic<int> next{0};

    auto drain = [&] {
        for (int w = next++; w < workers; w = next++) {
            const auto slot = static_cast<std::size_t>(w);
            try {
                partial[slot] = optimize_single(problem, mix_seed(master_seed, slot + 1));
            } catch (const InfeasibleError&) {
                infeasible[slot] = true;
            } catch (...) {
                failures[slot] = std::current_exception();
            }
        }
    };

    unsigned threads = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(workers));
    if (threads <= 1) {
        drain();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(drain);
    }

    for (const auto& failure : failures)
        if (failure)
            std::rethrow_exception(failure);

    OptimizationResult merged;
    bool any = false;
    const std::uint64_t pool_size = candidate_pool_size(problem);
    for (std::size_t w = 0; w < slots; ++w) {
        if (!partial[w]) {
            merged.candidates_evaluated += pool_size;
            continue;
        }
        const auto& r = *partial[w];
        merged.candidates_evaluated += r.candidates_evaluated;
        merged.candidates_accepted += r.candidates_accepted;
        if (!any || precedes(r.best_risk, r.best_weights, merged.best_risk, merged.best_weights)) {
            merged.best_risk = r.best_risk;
            merged.best_weights = r.best_weights;
            any = true;
        }
    }
    if (!any)
        throw InfeasibleError("no feasible candidates in any worker");
    merged.master_seed = master_seed;
    merged.worker_count = workers;
    merged.elapsed_ms = elapsed_since(start);
    return merged;
}

std::string risk_spec_text(const OptimizationProblem& problem)
{
    return std::visit(Overloaded{
                          [](const AnalyticQuadratic& q) {
                              return to_string(RiskSpec{MeanVariance{q.lambda, std::nullopt}});
                          },
                          [](const Distributional& d) { return to_string(d.risk); },
                      },
                      problem.objective);
}

nlohmann::json to_json(const OptimizationResult& result, const std::string& risk_spec)
{
    nlohmann::json j;
    j["weights"] = std::vector<double>(result.best_weights.begin(), result.best_weights.end());
    if (std::isfinite(result.best_risk))
        j["risk"] = result.best_risk;
    else
        j["risk"] = nullptr;
    j["risk_spec"] = risk_spec;
    j["candidates_evaluated"] = result.candidates_evaluated;
    j["candidates_accepted"] = result.candidates_accepted;
    j["master_seed"] = result.master_seed;
    j["worker_count"] = result.worker_count;
    j["elapsed_ms"] = result.elapsed_ms;
    return j;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Computation computation)
{
    switch (computation) {
    case Computation::AnalyticInput: return "analytic-qp/input";
    case Computation::AnalyticRealized: return "analytic-qp/realized";
    case Computation::MonteCarloInput: return "mc/input";
    case Computation::MonteCarloRealized: return "mc/realized";
    case Computation::MonteCarloDistributional: return "mc/full-distributional";
    }
    return "unknown";
}

const ComputationOutcome* StabilityReport::find(Computation computation) const
{
    for (const auto& c : computations)
        if (c.computation == computation)
            return &c;
    return nullptr;
}

double StabilityReport::difference(Computation first, Computation second) const
{
    for (const auto& d : differences)
        if ((d.first == first && d.second == second) || (d.first == second && d.second == first))
            return d.max_abs;
    throw std::out_of_range("computation pair not in the report");
}

StabilityReport stability_diagnostics(const CovarianceSpec& input, double lambda,
                                      const std::optional<Weights>& expected_returns,
                                      std::shared_ptr<const ScenarioMatrix> scenarios,
                                      const SamplerConfig& sampler,
                                      const ConstraintSet& constraints,
                                      const StabilityOptions& options)
{
    if (!scenarios)
        throw std::invalid_argument("stability diagnostics need scenarios");
    const Index n = input.size();
    if (scenarios->asset_count() != n)
        throw std::invalid_argument("scenario and covariance dimensions differ");
    if (expected_returns && expected_returns->size() != n)
        throw std::invalid_argument("expected returns need one entry per asset");

    StabilityReport report;
    const CovarianceSpec realized = realized_covariance(*scenarios);
    report.covariance_delta = covariance_discrepancy(input, realized);
    report.degenerate_scenarios = realized.matrix().cwiseAbs().maxCoeff() == 0.0;

    auto quadratic = [&](const CovarianceSpec& c) {
        return [&c, lambda, &expected_returns](const Eigen::Ref<const Weights>& w) {
            double value = w.dot(c.matrix() * w);
            if (expected_returns)
                value -= lambda * expected_returns->dot(w);
            return value;
        };
    };

    if (n <= 8) {
        GridSpec grid{n, largest_resolution(n, options.grid_max_points), options.grid_polish_steps,
                      options.grid_max_points};
        if (options.analytic_input) {
            report.computations.push_back(
                {Computation::AnalyticInput, *options.analytic_input,
                 quadratic(input)(*options.analytic_input)});
        } else {
            const GridResult r = grid_oracle(quadratic(input), grid, constraints);
            report.computations.push_back({Computation::AnalyticInput, r.weights, r.value});
        }
        const GridResult r = grid_oracle(quadratic(realized), grid, constraints);
        report.computations.push_back({Computation::AnalyticRealized, r.weights, r.value});
    }

    SamplerConfig config = sampler;
    config.n_assets = n;
    auto monte_carlo = [&](Computation which, ObjectiveSource source) {
        OptimizationProblem problem{std::move(source), constraints, config,
                                    options.include_equal_weight_baseline, false};
        const auto r = run_workers(problem, options.workers, options.master_seed);
        report.computations.push_back({which, r.best_weights, r.best_risk});
    };
    monte_carlo(Computation::MonteCarloInput, AnalyticQuadratic{input, lambda, expected_returns});
    monte_carlo(Computation::MonteCarloRealized,
                AnalyticQuadratic{realized, lambda, expected_returns});
    monte_carlo(Computation::MonteCarloDistributional,
                Distributional{scenarios, MeanVariance{lambda, expected_returns}});

    for (std::size_t a = 0; a < report.computations.size(); ++a)
        for (std::size_t b = a + 1; b < report.computations.size(); ++b)
            report.differences.push_back(
                {report.computations[a].computation, report.computations[b].computation,
                 (report.computations[a].weights - report.computations[b].weights)
                     .cwiseAbs()
                     .maxCoeff()});
    return report;
}

nlohmann::json to_json(const StabilityReport& report)
{
    nlohmann::json j;
    j["covariance_delta"] = report.covariance_delta;
    j["degenerate_scenarios"] = report.degenerate_scenarios;
    auto& computations = j["computations"] = nlohmann::json::array();
    for (const auto& c : report.computations)
        computations.push_back({{"computation", to_string(c.computation)},
                                {"weights", std::vector<double>(c.weights.begin(), c.weights.end())},
                                {"objective", c.objective}});
    auto& differences = j["weight_differences"] = nlohmann::json::array();
    for (const auto& d : report.differences)
        differences.push_back({{"first", to_string(d.first)},
                               {"second", to_string(d.second)},
                               {"max_abs", d.max_abs}});
    return j;
}

} // namespace mcpope
