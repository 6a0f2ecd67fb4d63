#pragma once

#include "mcpope/types.hpp"

#include <cstdint>
#include <filesystem>
#include <variant>

namespace mcpope {

/// Pivots of the Cholesky factorization in [-kPsdTolerance, 0] are clamped to zero;
/// anything below is rejected as not positive semi-definite.
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kSymmetryTolerance = 1e-12;

/// Lower-triangular L with L * L^T = C for a symmetric positive semi-definite C.
/// Throws NotPositiveSemiDefinite.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& covariance);

/// Symmetric positive semi-definite N x N matrix.
class CovarianceSpec {
public:
    /// Throws std::invalid_argument (shape, non-finite, asymmetric) or NotPositiveSemiDefinite.
    explicit CovarianceSpec(Eigen::MatrixXd matrix);

    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    Index size() const noexcept { return matrix_.rows(); }
    double operator()(Index i, Index j) const { return matrix_(i, j); }

private:
    Eigen::MatrixXd matrix_;
};

Eigen::MatrixXd cholesky_factor(const CovarianceSpec& covariance);

/// J x N realized returns, one scenario per row. Immutable once built.
class ScenarioMatrix {
public:
    /// Throws std::invalid_argument unless J >= 2, N >= 1 and every entry is finite.
    explicit ScenarioMatrix(Eigen::MatrixXd returns);

    const Eigen::MatrixXd& returns() const noexcept { return returns_; }
    Index scenario_count() const noexcept { return returns_.rows(); }
    Index asset_count() const noexcept { return returns_.cols(); }

private:
    Eigen::MatrixXd returns_;
};

struct GaussianModel {
    Weights mean;
    Eigen::MatrixXd covariance;
};

/// Multivariate Student t with one shared chi-square mixing variable per scenario.
/// `sigma` is the marginal standard deviation, not the scale parameter.
struct StudentTModel {
    Weights mean;
    Weights sigma;
    Eigen::MatrixXd correlation;
    double dof = 0.0;
};

struct EmpiricalModel {
    std::filesystem::path path;
};

using DistributionSpec = std::variant<GaussianModel, StudentTModel, EmpiricalModel>;

/// Rows mean + L z with z standard normal.
ScenarioMatrix simulate_gaussian(const Weights& mean, const CovarianceSpec& covariance,
                                 Index scenario_count, std::uint64_t seed);

/// Rows mu + D L z sqrt(nu / chi2_nu) with D = diag(sigma_i sqrt((nu - 2) / nu)) and
/// L the Cholesky factor of the correlation, so coordinate i has standard deviation sigma_i.
ScenarioMatrix simulate_student_t(const Weights& mu, const Weights& sigma,
                                  const Eigen::MatrixXd& correlation, double dof,
                                  Index scenario_count, std::uint64_t seed);

/// Simulates (or, for an empirical spec, loads) the scenario matrix.
ScenarioMatrix realize(const DistributionSpec& spec, Index scenario_count, std::uint64_t seed);

ScenarioMatrix load_scenarios(const std::filesystem::path& path);
void save_scenarios(const std::filesystem::path& path, const ScenarioMatrix& scenarios);

/// Population covariance (divisor J), so that w . C . w is exactly the population
/// variance of the portfolio returns over the same scenarios.
CovarianceSpec realized_covariance(const ScenarioMatrix& scenarios);

/// max_ij |realized_ij - input_ij|
double covariance_discrepancy(const CovarianceSpec& input, const CovarianceSpec& realized);
double covariance_discrepancy(const Eigen::MatrixXd& input, const Eigen::MatrixXd& realized);

} // namespace mcpope
