#include "mcpope/optimizer.hpp"
#include "mcpope/random.hpp"
#include "mcpope/reference.hpp"
#include "mcpope/tolerances.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace mcpope;

namespace {

SamplerConfig sampler(Index n, Index k, int depth = 5)
{
    SamplerConfig c;
    c.n_assets = n;
    c.base_count = k;
    c.bias_depth = depth;
    return c;
}

OptimizationProblem quadratic_problem(const Eigen::MatrixXd& c, Index k, int depth = 5)
{
    return {AnalyticQuadratic{CovarianceSpec(c), 0.0, std::nullopt}, {}, sampler(c.rows(), k, depth)};
}

Eigen::MatrixXd random_covariance(std::mt19937_64& engine, Index n)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a(n, n + 2);
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            a(i, j) = normal(engine);
    return a * a.transpose() / static_cast<double>(a.cols());
}

std::shared_ptr<const ScenarioMatrix> gaussian_scenarios(const Eigen::MatrixXd& c, Index j,
                                                         std::uint64_t seed)
{
    return std::make_shared<const ScenarioMatrix>(
        simulate_gaussian(Eigen::VectorXd::Zero(c.rows()), CovarianceSpec(c), j, seed));
}

} // namespace

TEST_CASE("single asset always returns the whole portfolio")
{
    const auto scenarios = gaussian_scenarios(Eigen::MatrixXd::Identity(1, 1), 200, 1);
    OptimizationProblem p{Distributional{scenarios, ConditionalValueAtRisk{0.05}}, {}, sampler(1, 50)};
    const OptimizationResult r = run_workers(p, 3, 11);
    CHECK(r.best_weights.size() == 1);
    CHECK(r.best_weights(0) == 1.0);
}

TEST_CASE("identity covariance is solved exactly by the equal-weight baseline")
{
    for (Index n : {2, 3, 5, 8}) {
        const OptimizationResult r =
            run_workers(quadratic_problem(Eigen::MatrixXd::Identity(n, n), 500), 2, 4);
        for (Index i = 0; i < n; ++i)
            CHECK(r.best_weights(i) == 1.0 / static_cast<double>(n));
        CHECK(r.best_risk == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-15));
    }
}

TEST_CASE("the result is feasible and never worse than the baseline")
{
    std::mt19937_64 engine(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + trial % 6;
        OptimizationProblem p = quadratic_problem(random_covariance(engine, n), 300);
        p.constraints.upper_bounds = Eigen::VectorXd::Constant(n, 0.6);
        const OptimizationResult r = run_workers(p, 2, static_cast<std::uint64_t>(trial));
        CHECK(is_portfolio(r.best_weights));
        CHECK((r.best_weights.array() >= 0.0).all());
        CHECK(p.constraints.satisfied_by(r.best_weights));
        const Weights baseline = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        CHECK(r.best_risk <= objective_value(p, baseline));
        CHECK(r.best_risk == objective_value(p, r.best_weights));
    }
}

TEST_CASE("more base samples never give a worse optimum")
{
    std::mt19937_64 engine(5);
    const Eigen::MatrixXd c = random_covariance(engine, 4);
    double previous = std::numeric_limits<double>::infinity();
    for (Index k : {10, 100, 1000, 5000}) {
        const OptimizationResult r = optimize_single(quadratic_problem(c, k), 77);
        CHECK(r.best_risk <= previous);
        previous = r.best_risk;
    }
}

TEST_CASE("pool size accounts for every source")
{
    OptimizationProblem p = quadratic_problem(Eigen::MatrixXd::Identity(3, 3), 100, 5);
    CHECK(candidate_pool_size(p) == 601);
    CHECK(optimize_single(p, 1).candidates_evaluated == 601);
    p.include_even_pool = true;
    CHECK(candidate_pool_size(p) == 701);
    CHECK(optimize_single(p, 1).candidates_evaluated == 701);
    p.include_equal_weight_baseline = false;
    CHECK(candidate_pool_size(p) == 700);
    const OptimizationResult r = run_workers(p, 3, 1);
    CHECK(r.candidates_evaluated == 2100);
    CHECK(r.candidates_accepted == 2100);
}

TEST_CASE("workers merge to the best single search")
{
    std::mt19937_64 engine(8);
    const Eigen::MatrixXd c = random_covariance(engine, 5);
    const auto scenarios = gaussian_scenarios(c, 2000, 3);
    const OptimizationProblem p{Distributional{scenarios, ConditionalValueAtRisk{0.05}}, {},
                                sampler(5, 200)};
    const std::uint64_t master = 12345;
    const int workers = 6;
    const OptimizationResult merged = run_workers(p, workers, master, 1);

    double best = std::numeric_limits<double>::infinity();
    Weights best_w;
    for (int w = 1; w <= workers; ++w) {
        const OptimizationResult single = optimize_single(p, mix_seed(master, static_cast<std::uint64_t>(w)));
        if (single.best_risk < best) {
            best = single.best_risk;
            best_w = single.best_weights;
        }
    }
    CHECK(merged.best_risk == best);
    CHECK(merged.best_weights == best_w);
    CHECK(merged.worker_count == workers);
    CHECK(merged.master_seed == master);
}

TEST_CASE("results do not depend on the thread count")
{
    std::mt19937_64 engine(13);
    const Eigen::MatrixXd c = random_covariance(engine, 4);
    const auto scenarios = gaussian_scenarios(c, 3000, 9);
    const OptimizationProblem p{Distributional{scenarios, NegativeOmega{-0.5}}, {}, sampler(4, 300)};
    const OptimizationResult reference = run_workers(p, 7, 99, 1);
    for (unsigned threads : {2u, 3u, 7u, 0u}) {
        const OptimizationResult r = run_workers(p, 7, 99, threads);
        CHECK(r.best_weights == reference.best_weights);
        CHECK(r.best_risk == reference.best_risk);
        CHECK(r.candidates_evaluated == reference.candidates_evaluated);
    }
    const OptimizationResult again = run_workers(p, 7, 99, 1);
    CHECK(again.best_weights == reference.best_weights);
}

TEST_CASE("ties go to the lexicographically smallest weights")
{
    // No scenario falls below the threshold, so every candidate has Omega = +infinity.
    Eigen::MatrixXd x(4, 3);
    x << 1, 2, 3,
         2, 1, 1,
         3, 3, 2,
         1, 1, 1;
    const auto scenarios = std::make_shared<const ScenarioMatrix>(x);
    const OptimizationProblem p{Distributional{scenarios, NegativeOmega{0.0}}, {}, sampler(3, 50)};
    const std::uint64_t master = 2;
    const OptimizationResult r = run_workers(p, 3, master);
    CHECK(r.best_risk == -std::numeric_limits<double>::infinity());

    std::optional<Weights> smallest;
    for (std::uint64_t w = 1; w <= 3; ++w) {
        SamplerConfig c = p.sampler;
        c.seed = mix_seed(master, w);
        const WeightBatch pool = sample_edge_vertex(c);
        for (Index m = 0; m < pool.rows(); ++m) {
            const Weights row = pool.row(m).transpose();
            if (!smallest || std::lexicographical_compare(row.begin(), row.end(), smallest->begin(),
                                                          smallest->end()))
                smallest = row;
        }
    }
    CHECK(r.best_weights == *smallest);
}

TEST_CASE("candidates whose risk cannot be evaluated lose")
{
    // Asset 0 never moves, so only portfolios holding some of asset 1 have dispersion.
    Eigen::MatrixXd x(5, 2);
    x << 0.1, -1.0,
         0.1, 0.5,
         0.1, 2.0,
         0.1, 1.0,
         0.1, -0.2;
    const auto scenarios = std::make_shared<const ScenarioMatrix>(x);
    const OptimizationProblem p{Distributional{scenarios, NegativeSharpe{0.0}}, {}, sampler(2, 100)};
    const OptimizationResult r = run_workers(p, 2, 6);
    CHECK(std::isfinite(r.best_risk));
    CHECK(r.best_weights(1) > 0.0);

    const auto flat = std::make_shared<const ScenarioMatrix>(Eigen::MatrixXd(x.col(0)));
    const OptimizationProblem q{Distributional{flat, NegativeSharpe{0.0}}, {}, sampler(1, 10)};
    const OptimizationResult only = optimize_single(q, 1);
    CHECK(only.best_risk == std::numeric_limits<double>::infinity());
    CHECK(only.best_weights(0) == 1.0);
}

TEST_CASE("infeasible problems")
{
    OptimizationProblem p = quadratic_problem(Eigen::MatrixXd::Identity(3, 3), 100);
    p.constraints.lower_bounds = Eigen::Vector3d(0.6, 0.6, 0.0);
    CHECK_THROWS_AS(optimize_single(p, 1), InfeasibleError);
    CHECK_THROWS_AS(run_workers(p, 4, 1), InfeasibleError);
    CHECK_THROWS_AS(run_workers(p, 0, 1), std::invalid_argument);

    OptimizationProblem mismatch = quadratic_problem(Eigen::MatrixXd::Identity(3, 3), 100);
    mismatch.sampler.n_assets = 4;
    CHECK_THROWS_AS(optimize_single(mismatch, 1), std::invalid_argument);
}

TEST_CASE("sampled optimum never beats the analytic optimum")
{
    for (double r : {-0.5, 0.0, 0.5, 0.9}) {
        const Eigen::Matrix3d c = three_asset_covariance(r);
        const Weights opt = analytic_three_asset(r);
        const double best = opt.dot(c * opt);
        const OptimizationResult res = run_workers(quadratic_problem(c, 2000), 2, 5);
        CHECK(res.best_risk >= best - 1e-12);
        CHECK(res.best_risk <= best * 1.002);
    }
}

TEST_CASE("three-asset weights at moderate sample size")
{
    namespace rt = reference_table;
    const Eigen::Matrix3d c = three_asset_covariance(0.0);
    const OptimizationResult r = run_workers(quadratic_problem(c, 20000), 4, 0);
    for (Index i = 0; i < 3; ++i)
        CHECK(std::abs(r.best_weights(i) - rt::kTable1Weights[1][static_cast<std::size_t>(i)]) <=
              rt::kTable1WeightTolerance);
}

TEST_CASE("result JSON round trip")
{
    const Eigen::Matrix3d c = three_asset_covariance(0.5);
    const OptimizationProblem p = quadratic_problem(c, 500);
    const OptimizationResult r = run_workers(p, 2, 31);
    const nlohmann::json j = nlohmann::json::parse(to_json(r, risk_spec_text(p)).dump());
    for (const char* key : {"weights", "risk", "risk_spec", "candidates_evaluated",
                            "candidates_accepted", "master_seed", "worker_count", "elapsed_ms"})
        CHECK(j.contains(key));
    const auto w = j["weights"].get<std::vector<double>>();
    REQUIRE(w.size() == 3);
    const Weights parsed = Eigen::Map<const Eigen::VectorXd>(w.data(), 3);
    CHECK(std::abs(objective_value(p, parsed) - j["risk"].get<double>()) <= 1e-12);
    CHECK(j["risk_spec"] == "mv:0");
    CHECK(j["master_seed"].get<std::uint64_t>() == 31);
    CHECK(j["worker_count"] == 2);

    OptimizationResult unbounded = r;
    unbounded.best_risk = -std::numeric_limits<double>::infinity();
    CHECK(to_json(unbounded, "omega:0")["risk"].is_null());
}

TEST_CASE("stability diagnostics on a large Gaussian sample")
{
    const Eigen::Matrix3d c = ru_covariance();
    const auto scenarios = gaussian_scenarios(c, 100000, 7);
    StabilityOptions options;
    options.workers = 2;
    options.master_seed = 3;
    options.grid_max_points = 5e4;
    const StabilityReport report = stability_diagnostics(CovarianceSpec(c), 0.0, std::nullopt, scenarios,
                                                         sampler(3, 5000), {}, options);
    CHECK(report.computations.size() == 5);
    CHECK(report.differences.size() == 10);
    CHECK_FALSE(report.degenerate_scenarios);
    const CovarianceSpec realized = realized_covariance(*scenarios);
    CHECK(report.covariance_delta == covariance_discrepancy(CovarianceSpec(c), realized));
    CHECK(report.difference(Computation::MonteCarloRealized, Computation::MonteCarloDistributional) <=
          0.01);
    CHECK(report.difference(Computation::AnalyticRealized, Computation::MonteCarloRealized) <= 0.02);
    const auto* full = report.find(Computation::MonteCarloDistributional);
    REQUIRE(full != nullptr);
    CHECK(full->objective ==
          doctest::Approx(full->weights.dot(realized.matrix() * full->weights)).epsilon(1e-10).scale(0.0));

    const nlohmann::json j = to_json(report);
    CHECK(j["computations"].size() == 5);
    CHECK(j["computations"][0]["computation"] == "analytic-qp/input");
    CHECK(j["weight_differences"].size() == 10);
    CHECK(j["covariance_delta"].get<double>() == report.covariance_delta);
}

TEST_CASE("stability diagnostics flag degenerate scenarios")
{
    const auto zero = std::make_shared<const ScenarioMatrix>(Eigen::MatrixXd::Zero(10, 3));
    StabilityOptions options;
    options.grid_max_points = 2e3;
    const StabilityReport report = stability_diagnostics(CovarianceSpec(ru_covariance()), 0.0, std::nullopt,
                                                         zero, sampler(3, 100), {}, options);
    CHECK(report.degenerate_scenarios);
    CHECK(report.covariance_delta > 0.0);
    CHECK_THROWS_AS(stability_diagnostics(CovarianceSpec(ru_covariance()), 0.0, std::nullopt, nullptr,
                                          sampler(3, 100), {}, options),
                    std::invalid_argument);
}

TEST_CASE("the known analytic optimum replaces the lattice search")
{
    const Eigen::Matrix3d c = three_asset_covariance(0.0);
    const auto scenarios = gaussian_scenarios(c, 5000, 2);
    StabilityOptions options;
    options.analytic_input = analytic_three_asset(0.0);
    options.grid_max_points = 2e3;
    const StabilityReport report = stability_diagnostics(CovarianceSpec(c), 0.0, std::nullopt, scenarios,
                                                         sampler(3, 500), {}, options);
    CHECK(report.find(Computation::AnalyticInput)->weights == *options.analytic_input);
}
