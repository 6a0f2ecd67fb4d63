#include "mcpope/reference.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace mcpope {

namespace {

bool precedes(double value, const Weights& w, double best_value, const Weights& best)
{
    if (value != best_value)
        return value < best_value;
    return std::lexicographical_compare(w.begin(), w.end(), best.begin(), best.end());
}

} // namespace

Weights analytic_three_asset(double r, ThreeAssetBranch branch)
{
    double w1 = 0.0;
    double w2 = 0.0;
    switch (branch) {
    case ThreeAssetBranch::LowCorrelation:
        w1 = (225.0 - 120.0 * r) / (289.0 - 240.0 * r);
        w2 = 1.0 - w1;
        break;
    case ThreeAssetBranch::Interior: {
        const double denominator = 576.0 * r * r + 240.0 * r - 1001.0;
        w1 = 5.0 * (48.0 * r - 125.0) / denominator;
        w2 = 9.0 * (40.0 * r - 17.0) / denominator;
        break;
    }
    case ThreeAssetBranch::HighCorrelation:
        // Minimizer on the w2 = 0 edge, (100 - 25) / (64 + 100 - 2 * 25) = 0.657895.
        w1 = 75.0 / 114.0;
        w2 = 0.0;
        break;
    }
    Weights w(3);
    w << w1, w2, std::max(0.0, 1.0 - w1 - w2);
    return w;
}

Weights analytic_three_asset(double r)
{
    if (!(r >= -1.0 && r <= 1.0))
        throw std::invalid_argument("three-asset correlation must lie in [-1, 1]");
    if (r < kThreeAssetLowerBoundary)
        return analytic_three_asset(r, ThreeAssetBranch::LowCorrelation);
    if (r > kThreeAssetUpperBoundary)
        return analytic_three_asset(r, ThreeAssetBranch::HighCorrelation);
    return analytic_three_asset(r, ThreeAssetBranch::Interior);
}

void GridSpec::validate() const
{
    if (n_assets < 1 || n_assets > 8)
        throw std::invalid_argument("grid oracle supports 1 to 8 assets");
    if (resolution < 1)
        throw std::invalid_argument("grid resolution must be positive");
    if (polish_steps < 0)
        throw std::invalid_argument("polish steps must be nonnegative");
    if (lattice_size() > max_points)
        throw std::invalid_argument("lattice too large");
}

double GridSpec::lattice_size() const
{
    double size = 1.0;
    for (Index i = 1; i < n_assets; ++i)
        size = size * static_cast<double>(resolution + i) / static_cast<double>(i);
    return size;
}

Index largest_resolution(Index n_assets, double max_points, Index cap)
{
    Index best = 1;
    for (Index m = 1; m <= cap; ++m) {
        GridSpec g{n_assets, m, 0, max_points};
        if (g.lattice_size() > max_points)
            break;
        best = m;
    }
    return best;
}

GridResult grid_oracle(const WeightObjective& objective, const GridSpec& grid,
                       const ConstraintSet& constraints)
{
    grid.validate();
    constraints.validate(grid.n_assets);

    const Index n = grid.n_assets;
    const double m = static_cast<double>(grid.resolution);
    std::vector<Index> counts(static_cast<std::size_t>(n), 0);
    Weights w(n);
    Weights best(n);
    double best_value = std::numeric_limits<double>::infinity();
    bool found = false;

    auto visit = [&] {
        for (Index i = 0; i < n; ++i)
            w(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]) / m;
        if (!constraints.satisfied_by(w))
            return;
        const double value = objective(w);
        if (!found || precedes(value, w, best_value, best)) {
            best = w;
            best_value = value;
            found = true;
        }
    };
    auto enumerate = [&](auto&& self, Index i, Index remaining) -> void {
        if (i == n - 1) {
            counts[static_cast<std::size_t>(i)] = remaining;
            visit();
            return;
        }
        for (Index v = 0; v <= remaining; ++v) {
            counts[static_cast<std::size_t>(i)] = v;
            self(self, i + 1, remaining - v);
        }
    };
    enumerate(enumerate, 0, grid.resolution);
    if (!found)
        throw InfeasibleError("no feasible lattice point");

    auto try_move = [&](Weights trial) {
        if (!constraints.satisfied_by(trial))
            return false;
        const double value = objective(trial);
        if (!(value < best_value))
            return false;
        best = std::move(trial);
        best_value = value;
        return true;
    };

    constexpr int kMaxSweeps = 10000;
    constexpr double kInwardMargin = 1e-9;
    double step = 1.0 / m;
    for (int round = 0; round < grid.polish_steps; ++round) {
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            bool improved = false;
            for (Index from = 0; from < n; ++from) {
                for (Index to = 0; to < n; ++to) {
                    if (to == from || best(from) <= 0.0)
                        continue;
                    const double amount = std::min(step, best(from));
                    Weights trial = best;
                    trial(from) = amount == best(from) ? 0.0 : best(from) - amount;
                    trial(to) += amount;
                    improved |= try_move(std::move(trial));
                }
            }
            // A transfer that lowers a linear constraint's value is paired with a second
            // transfer sized to restore it, so the search can slide along a binding plane.
            for (const auto& c : constraints.linear_inequalities) {
                const Weights& a = c.coefficients;
                for (Index from = 0; from < n; ++from)
                    for (Index to = 0; to < n; ++to) {
                        const double loss = a(from) - a(to);
                        if (to == from || !(loss > 0.0) || best(from) < step)
                            continue;
                        for (Index from2 = 0; from2 < n; ++from2)
                            for (Index to2 = 0; to2 < n; ++to2) {
                                const double gain = a(to2) - a(from2);
                                if (to2 == from2 || !(gain > 0.0))
                                    continue;
                                const double amount2 = step * loss / gain * (1.0 + kInwardMargin);
                                Weights trial = best;
                                trial(from) -= step;
                                trial(to) += step;
                                trial(from2) -= amount2;
                                trial(to2) += amount2;
                                if ((trial.array() < 0.0).any())
                                    continue;
                                improved |= try_move(std::move(trial));
                            }
                    }
            }
            if (!improved)
                break;
        }
        step *= 0.5;
    }
    return {best, best_value};
}

Eigen::Matrix3d ru_covariance()
{
    Eigen::Matrix3d c;
    c << 0.00324625, 0.00022983, 0.00420395,
         0.00022983, 0.00049937, 0.00019247,
         0.00420395, 0.00019247, 0.00764097;
    return c;
}

Eigen::Vector3d ru_expected_returns()
{
    return {0.010111, 0.0043532, 0.0137058};
}

ConstraintSet ru_constraints()
{
    ConstraintSet constraints;
    constraints.linear_inequalities.push_back({ru_expected_returns(), kRuMinimumReturn});
    return constraints;
}

MinimumVariance ru_min_variance_reference()
{
    const Eigen::Matrix3d c = ru_covariance();
    const GridResult r = grid_oracle(
        [&c](const Eigen::Ref<const Weights>& w) { return w.dot(c * w); },
        GridSpec{3, 1000, 40}, ru_constraints());
    return {r.weights, r.value};
}

Eigen::MatrixXd pathological_six_covariance()
{
    Eigen::MatrixXd c(6, 6);
    c << 0.0549686, 0.144599, -0.188442, 0.0846818, 0.21354, 0.0815392,
         0.144599, 1.00269, -0.837786, 0.188534, 0.23907, -0.376582,
         -0.188442, -0.837786, 1.65445, 0.404402, 0.34708, -0.350142,
         0.0846818, 0.188534, 0.404402, 0.709815, 1.13685, -0.177787,
         0.21354, 0.23907, 0.34708, 1.13685, 2.13408, 0.166434,
         0.0815392, -0.376582, -0.350142, -0.177787, 0.166434, 0.890896;
    return c;
}

Eigen::Matrix3d admn_correlation()
{
    Eigen::Matrix3d rho;
    rho << 1.00000000, 0.47105463, 0.35635569,
           0.47105463, 1.00000000, 0.44091699,
           0.35635569, 0.44091699, 1.00000000;
    return rho;
}

Eigen::Vector3d admn_means()
{
    return {0.18963989, 0.16829560, 0.2788619};
}

Eigen::Vector3d admn_sigmas()
{
    return {2.3251341, 2.0430214, 1.8134084};
}

} // namespace mcpope
