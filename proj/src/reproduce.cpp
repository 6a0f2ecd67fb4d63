#include "mcpope/reproduce.hpp"

#include "mcpope/io.hpp"
#include "mcpope/optimizer.hpp"
#include "mcpope/random.hpp"
#include "mcpope/reference.hpp"
#include "mcpope/special.hpp"
#include "mcpope/tolerances.hpp"

#include <ostream>

namespace mcpope {

namespace rt = reference_table;

namespace {

constexpr std::uint64_t kScenarioStream = 0x5343454e4152494f;

struct Settings {
    Index base_samples;
    int bias_depth;
    int workers;
};

Settings resolve(const rt::RunSettings& defaults, const ReproduceOptions& options)
{
    return {options.base_samples.value_or(defaults.base_samples),
            options.bias_depth.value_or(defaults.bias_depth),
            options.workers.value_or(defaults.workers)};
}

OptimizationProblem make_problem(ObjectiveSource objective, Index n_assets, const Settings& settings,
                                 ConstraintSet constraints = {})
{
    OptimizationProblem problem{std::move(objective), std::move(constraints), {}};
    problem.sampler.n_assets = n_assets;
    problem.sampler.base_count = settings.base_samples;
    problem.sampler.bias_depth = settings.bias_depth;
    return problem;
}

AnalyticQuadratic variance_objective(const Eigen::MatrixXd& covariance)
{
    return AnalyticQuadratic{CovarianceSpec(covariance), 0.0, std::nullopt};
}

std::string weight_label(const std::string& prefix, Index i)
{
    return prefix + "_w" + std::to_string(i + 1);
}

void record(ReproduceOutcome& outcome, nlohmann::json inputs, const OptimizationResult& result,
            const std::string& risk_spec)
{
    nlohmann::json entry = to_json(result, risk_spec);
    entry["inputs"] = std::move(inputs);
    outcome.results.push_back(std::move(entry));
}

ReproduceOutcome run_table1(const ReproduceOptions& options)
{
    const Settings s = resolve(rt::kTable1Run, options);
    ReproduceOutcome outcome;
    for (std::size_t c = 0; c < rt::kTable1Correlations.size(); ++c) {
        const double r = rt::kTable1Correlations[c];
        const auto problem = make_problem(variance_objective(three_asset_covariance(r)), 3, s);
        const auto result = run_workers(problem, s.workers, options.seed);
        const std::string prefix = "r=" + format_double(r);
        for (Index i = 0; i < 3; ++i)
            outcome.rows.push_back({weight_label(prefix, i), rt::kTable1Weights[c][i],
                                    result.best_weights(i), rt::kTable1WeightTolerance});
        record(outcome, {{"case", "table1"}, {"r", r}}, result, risk_spec_text(problem));
    }
    return outcome;
}

ConstraintSet constrained3_constraints()
{
    ConstraintSet constraints;
    constraints.lower_bounds = Eigen::Vector3d(1.0 / 3.0, 0.0, 0.0);
    constraints.linear_inequalities.push_back({Eigen::Vector3d(0.0, 1.0, 1.1), 0.5});
    return constraints;
}

ReproduceOutcome run_constrained3(const ReproduceOptions& options)
{
    const Settings s = resolve(rt::kConstrainedRun, options);
    ReproduceOutcome outcome;
    const auto problem =
        make_problem(variance_objective(three_asset_covariance(rt::kConstrainedCorrelation)), 3, s,
                     constrained3_constraints());
    const auto result = run_workers(problem, s.workers, options.seed);
    outcome.rows.push_back({"objective", rt::kConstrainedObjective, result.best_risk,
                            rt::kConstrainedRelativeTolerance * rt::kConstrainedObjective});
    nlohmann::json inputs{{"case", "constrained3"}, {"r", rt::kConstrainedCorrelation}};
    inputs["acceptance_rate"] = static_cast<double>(result.candidates_accepted) /
                                static_cast<double>(result.candidates_evaluated);
    record(outcome, std::move(inputs), result, risk_spec_text(problem));
    return outcome;
}

ReproduceOutcome run_pathological6(const ReproduceOptions& options)
{
    const Settings s = resolve(rt::kPathologicalRun, options);
    ReproduceOutcome outcome;
    const auto problem = make_problem(variance_objective(pathological_six_covariance()), 6, s);
    const auto result = run_workers(problem, s.workers, options.seed);
    for (Index i = 0; i < 6; ++i)
        outcome.rows.push_back({weight_label("min_variance", i), rt::kPathologicalWeights[i],
                                result.best_weights(i), rt::kPathologicalWeightTolerance});
    record(outcome, {{"case", "pathological6"}}, result, risk_spec_text(problem));
    return outcome;
}

ReproduceOutcome run_ru_cvar(const ReproduceOptions& options)
{
    const Settings s = resolve(rt::kRuCvarRun, options);
    ReproduceOutcome outcome;

    const MinimumVariance mv = ru_min_variance_reference();
    for (Index i = 0; i < 3; ++i)
        outcome.rows.push_back({weight_label("min_variance", i), rt::kRuMinVarianceWeights[i],
                                mv.weights(i), rt::kRuMinVarianceWeightTolerance});
    outcome.rows.push_back(
        {"min_variance", rt::kRuMinVariance, mv.variance, rt::kRuMinVarianceTolerance});

    const GaussianModel model{ru_expected_returns(), ru_covariance()};
    for (const auto& c : rt::kRuCvarCases) {
        if (options.quantile && std::abs(*options.quantile - c.tail) > 1e-12)
            continue;
        const Index J = options.scenario_count.value_or(c.scenario_count);
        auto scenarios = std::make_shared<const ScenarioMatrix>(
            realize(model, J, mix_seed(options.seed, kScenarioStream)));
        const auto problem =
            make_problem(Distributional{scenarios, ConditionalValueAtRisk{c.tail}}, 3, s,
                         ru_constraints());
        const auto result = run_workers(problem, s.workers, options.seed);
        const std::string prefix = "u=" + format_double(c.tail);
        outcome.rows.push_back({prefix + "_cvar", c.cvar, result.best_risk, c.tolerance});
        if (c.tail == 0.05)
            for (Index i = 0; i < 3; ++i)
                outcome.rows.push_back({weight_label(prefix, i), rt::kRuMinVarianceWeights[i],
                                        result.best_weights(i), rt::kRuCvarWeightTolerance});
        record(outcome, {{"case", "ru-cvar"}, {"tail", c.tail}, {"scenarios", J}}, result,
               risk_spec_text(problem));
    }
    if (options.quantile && outcome.results.empty())
        throw std::invalid_argument("ru-cvar: --quantile must be one of 0.1, 0.05, 0.01");
    return outcome;
}

ReproduceOutcome run_omega_admn(const ReproduceOptions& options)
{
    const Settings s = resolve(rt::kAdmnRun, options);
    ReproduceOutcome outcome;

    const Eigen::Vector3d mu = admn_means();
    const Eigen::Vector3d sigma = admn_sigmas();
    static constexpr const char* kAssets[] = {"A", "B", "C"};
    for (std::size_t t = 0; t < rt::kMarginalVarTails.size(); ++t) {
        const double u = rt::kMarginalVarTails[t];
        for (Index i = 0; i < 3; ++i)
            outcome.rows.push_back({std::string("marginal_var_") + kAssets[i] + "_u=" +
                                        format_double(u),
                                    rt::kMarginalVar[t][i],
                                    marginal_var_student(mu(i), sigma(i), kAdmnDof, u),
                                    rt::kMarginalVarTolerance});
    }

    const Index J = options.scenario_count.value_or(rt::kAdmnScenarioCount);
    const StudentTModel model{mu, sigma, admn_correlation(), kAdmnDof};
    auto scenarios = std::make_shared<const ScenarioMatrix>(
        realize(model, J, mix_seed(options.seed, kScenarioStream)));

    auto optimize_at = [&](double b) {
        const auto problem = make_problem(Distributional{scenarios, NegativeOmega{b}}, 3, s);
        const auto result = run_workers(problem, s.workers, options.seed);
        record(outcome, {{"case", "omega-admn"}, {"threshold", b}, {"scenarios", J}}, result,
               risk_spec_text(problem));
        return result;
    };

    for (const auto& c : rt::kAdmnOmegaCases) {
        const auto result = optimize_at(c.threshold);
        const std::string prefix = "b=" + format_double(c.threshold);
        for (Index i = 0; i < 3; ++i)
            outcome.rows.push_back({weight_label(prefix, i), c.weights[i], result.best_weights(i),
                                    rt::kAdmnWeightTolerance});
        outcome.rows.push_back({prefix + "_omega", c.omega, -result.best_risk,
                                rt::kAdmnOmegaRelativeTolerance * c.omega});
    }

    const auto high = optimize_at(rt::kAdmnHighThreshold);
    outcome.rows.push_back({"b=" + format_double(rt::kAdmnHighThreshold) + "_max_weight", 1.0,
                            high.best_weights.maxCoeff(), 1.0 - rt::kAdmnConcentration});
    return outcome;
}

} // namespace

ReproduceCase parse_reproduce_case(std::string_view name)
{
    if (name == "table1")
        return ReproduceCase::Table1;
    if (name == "constrained3")
        return ReproduceCase::Constrained3;
    if (name == "pathological6")
        return ReproduceCase::Pathological6;
    if (name == "ru-cvar")
        return ReproduceCase::RuCvar;
    if (name == "omega-admn")
        return ReproduceCase::OmegaAdmn;
    throw std::invalid_argument(
        "unknown reproduce case '" + std::string(name) +
        "' (expected table1, constrained3, pathological6, ru-cvar or omega-admn)");
}

std::string_view to_string(ReproduceCase reproduce_case)
{
    switch (reproduce_case) {
    case ReproduceCase::Table1:
        return "table1";
    case ReproduceCase::Constrained3:
        return "constrained3";
    case ReproduceCase::Pathological6:
        return "pathological6";
    case ReproduceCase::RuCvar:
        return "ru-cvar";
    case ReproduceCase::OmegaAdmn:
        return "omega-admn";
    }
    return "unknown";
}

bool ReproduceOutcome::all_pass() const
{
    for (const auto& row : rows)
        if (!row.pass())
            return false;
    return true;
}

ReproduceOutcome reproduce(ReproduceCase reproduce_case, const ReproduceOptions& options)
{
    switch (reproduce_case) {
    case ReproduceCase::Table1:
        return run_table1(options);
    case ReproduceCase::Constrained3:
        return run_constrained3(options);
    case ReproduceCase::Pathological6:
        return run_pathological6(options);
    case ReproduceCase::RuCvar:
        return run_ru_cvar(options);
    case ReproduceCase::OmegaAdmn:
        return run_omega_admn(options);
    }
    throw std::invalid_argument("unknown reproduce case");
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows)
{
    out << "quantity,paper_value,computed_value,abs_diff,tolerance,pass\n";
    for (const auto& row : rows)
        out << row.quantity << ',' << format_double17(row.paper_value) << ','
            << format_double17(row.computed_value) << ',' << format_double17(row.abs_diff())
            << ',' << format_double17(row.tolerance) << ',' << (row.pass() ? "true" : "false")
            << '\n';
}

} // namespace mcpope
