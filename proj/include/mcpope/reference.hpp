#pragma once

#include "mcpope/simplex.hpp"
#include "mcpope/types.hpp"

#include <functional>

namespace mcpope {

/// Three-asset test covariance parametrized by the correlation r of assets 1 and 2.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 3, 3> three_asset_covariance(Scalar r)
{
    Eigen::Matrix<Scalar, 3, 3> c;
    c << Scalar(64), Scalar(120) * r, Scalar(25),
         Scalar(120) * r, Scalar(225), Scalar(50),
         Scalar(25), Scalar(50), Scalar(100);
    return c;
}

/// Left and right ends of the interior branch of the three-asset solution.
inline constexpr double kThreeAssetLowerBoundary = -0.383782;
inline constexpr double kThreeAssetUpperBoundary = 0.425;

enum class ThreeAssetBranch { LowCorrelation, Interior, HighCorrelation };

/// Closed-form minimizer of w . C(r) . w on the simplex.
Weights analytic_three_asset(double r);
/// One branch of the closed form evaluated regardless of where r falls.
Weights analytic_three_asset(double r, ThreeAssetBranch branch);

struct GridSpec {
    Index n_assets = 3;
    /// Lattice w_i = k_i / resolution with sum k_i = resolution.
    Index resolution = 100;
    int polish_steps = 0;
    double max_points = 5e7;

    void validate() const;
    /// C(resolution + n - 1, n - 1)
    double lattice_size() const;
};

struct GridResult {
    Weights weights;
    double value = 0.0;
};

using WeightObjective = std::function<double(const Eigen::Ref<const Weights>&)>;

/// Exhaustive lattice minimum (ties to the lexicographically smallest point), followed by
/// polish_steps rounds of pairwise mass transfers between coordinates with the step halved
/// each round. Throws std::invalid_argument("lattice too large") and
/// InfeasibleError("no feasible lattice point").
GridResult grid_oracle(const WeightObjective& objective, const GridSpec& grid,
                       const ConstraintSet& constraints = {});

/// Largest resolution (capped at `cap`) whose lattice stays below `max_points`.
Index largest_resolution(Index n_assets, double max_points, Index cap = 1000);

// Fixed problem data ---------------------------------------------------------

/// Three-asset CVaR test problem: covariance and expected returns.
Eigen::Matrix3d ru_covariance();
Eigen::Vector3d ru_expected_returns();
/// Minimum expected portfolio return of the three-asset CVaR problem.
inline constexpr double kRuMinimumReturn = 0.011;
/// Single linear constraint R . w >= kRuMinimumReturn.
ConstraintSet ru_constraints();

struct MinimumVariance {
    Weights weights;
    double variance = 0.0;
};

/// Lattice oracle (resolution 1000, 40 polish rounds) for w . C . w under ru_constraints().
MinimumVariance ru_min_variance_reference();

/// Six-asset covariance whose minimum-variance portfolio sits on a two-asset edge.
Eigen::MatrixXd pathological_six_covariance();

/// Simplified three-index Omega model (Germany, UK, US): correlation, means, volatilities, dof.
Eigen::Matrix3d admn_correlation();
Eigen::Vector3d admn_means();
Eigen::Vector3d admn_sigmas();
inline constexpr double kAdmnDof = 9.0;

} // namespace mcpope
