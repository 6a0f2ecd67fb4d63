#include "mcpope/scenarios.hpp"

#include "mcpope/io.hpp"
#include "mcpope/random.hpp"

#include <string>

namespace mcpope {

namespace {

void require_square_symmetric(const Eigen::MatrixXd& m, const char* what)
{
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::invalid_argument(std::string(what) + " must be a non-empty square matrix");
    if (!m.allFinite())
        throw std::invalid_argument(std::string(what) + " has non-finite entries");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
        throw std::invalid_argument(std::string(what) + " is not symmetric");
}

void require_scenario_count(Index scenario_count)
{
    if (scenario_count < 2)
        throw std::invalid_argument("J >= 2 required");
}

} // namespace

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& c)
{
    require_square_symmetric(c, "covariance");
    const Index n = c.rows();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        const double pivot = c(j, j) - l.row(j).head(j).squaredNorm();
        if (pivot < -kPsdTolerance)
            throw NotPositiveSemiDefinite("not positive semi-definite (pivot " +
                                          format_double(pivot) + " at " + std::to_string(j) + ")");
        if (pivot <= 0.0) {
            // Rank-deficient direction: the remaining column must vanish as well.
            for (Index i = j + 1; i < n; ++i) {
                const double residual = c(i, j) - l.row(i).head(j).dot(l.row(j).head(j));
                if (std::abs(residual) > kPsdTolerance)
                    throw NotPositiveSemiDefinite("not positive semi-definite (zero pivot at " +
                                                  std::to_string(j) + " with coupling)");
            }
            continue;
        }
        const double diagonal = std::sqrt(pivot);
        l(j, j) = diagonal;
        for (Index i = j + 1; i < n; ++i)
            l(i, j) = (c(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / diagonal;
    }
    return l;
}

CovarianceSpec::CovarianceSpec(Eigen::MatrixXd matrix) : matrix_(std::move(matrix))
{
    require_square_symmetric(matrix_, "covariance");
    cholesky_factor(matrix_);
}

Eigen::MatrixXd cholesky_factor(const CovarianceSpec& covariance)
{
    return cholesky_factor(covariance.matrix());
}

ScenarioMatrix::ScenarioMatrix(Eigen::MatrixXd returns) : returns_(std::move(returns))
{
    require_scenario_count(returns_.rows());
    if (returns_.cols() < 1)
        throw std::invalid_argument("scenario matrix needs at least one asset");
    if (!returns_.allFinite())
        throw std::invalid_argument("scenario matrix has non-finite entries");
}

ScenarioMatrix simulate_gaussian(const Weights& mean, const CovarianceSpec& covariance,
                                 Index scenario_count, std::uint64_t seed)
{
    require_scenario_count(scenario_count);
    const Index n = covariance.size();
    if (mean.size() != n)
        throw std::invalid_argument("mean and covariance dimensions differ");

    const Eigen::MatrixXd l = cholesky_factor(covariance);
    RandomStream stream(seed);
    Eigen::MatrixXd z(scenario_count, n);
    for (Index j = 0; j < scenario_count; ++j)
        for (Index i = 0; i < n; ++i)
            z(j, i) = stream.normal();
    Eigen::MatrixXd x = z * l.transpose();
    x.rowwise() += mean.transpose();
    return ScenarioMatrix(std::move(x));
}

ScenarioMatrix simulate_student_t(const Weights& mu, const Weights& sigma,
                                  const Eigen::MatrixXd& correlation, double dof,
                                  Index scenario_count, std::uint64_t seed)
{
    if (!(dof > 2.0))
        throw std::invalid_argument("nu must exceed 2");
    require_scenario_count(scenario_count);
    require_square_symmetric(correlation, "correlation");
    const Index n = correlation.rows();
    if (mu.size() != n || sigma.size() != n)
        throw std::invalid_argument("mean, sigma and correlation dimensions differ");
    if ((sigma.array() < 0).any())
        throw std::invalid_argument("sigma must be nonnegative");
    if ((correlation.diagonal().array() - 1.0).abs().maxCoeff() > kSymmetryTolerance)
        throw std::invalid_argument("correlation must have a unit diagonal");

    const Eigen::MatrixXd l = cholesky_factor(correlation);
    const Eigen::MatrixXd scaled =
        (sigma * std::sqrt((dof - 2.0) / dof)).asDiagonal() * l;

    RandomStream stream(seed);
    Eigen::MatrixXd x(scenario_count, n);
    Weights z(n);
    for (Index j = 0; j < scenario_count; ++j) {
        for (Index i = 0; i < n; ++i)
            z(i) = stream.normal();
        const double mixing = std::sqrt(dof / stream.chi_squared(dof));
        x.row(j) = (mu + scaled * z * mixing).transpose();
    }
    return ScenarioMatrix(std::move(x));
}

ScenarioMatrix realize(const DistributionSpec& spec, Index scenario_count, std::uint64_t seed)
{
    struct Visitor {
        Index count;
        std::uint64_t seed;
        ScenarioMatrix operator()(const GaussianModel& m) const
        {
            return simulate_gaussian(m.mean, CovarianceSpec(m.covariance), count, seed);
        }
        ScenarioMatrix operator()(const StudentTModel& m) const
        {
            return simulate_student_t(m.mean, m.sigma, m.correlation, m.dof, count, seed);
        }
        ScenarioMatrix operator()(const EmpiricalModel& m) const { return load_scenarios(m.path); }
    };
    return std::visit(Visitor{scenario_count, seed}, spec);
}

ScenarioMatrix load_scenarios(const std::filesystem::path& path)
{
    return ScenarioMatrix(read_csv_matrix(path));
}

void save_scenarios(const std::filesystem::path& path, const ScenarioMatrix& scenarios)
{
    write_csv_matrix(path, scenarios.returns());
}

CovarianceSpec realized_covariance(const ScenarioMatrix& scenarios)
{
    const auto& x = scenarios.returns();
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd c = (centered.transpose() * centered) / static_cast<double>(x.rows());
    c = 0.5 * (c + c.transpose()).eval();
    return CovarianceSpec(std::move(c));
}

double covariance_discrepancy(const Eigen::MatrixXd& input, const Eigen::MatrixXd& realized)
{
    if (input.rows() != realized.rows() || input.cols() != realized.cols())
        throw std::invalid_argument("covariance discrepancy: dimension mismatch");
    if (input.size() == 0)
        return 0.0;
    return (realized - input).cwiseAbs().maxCoeff();
}

double covariance_discrepancy(const CovarianceSpec& input, const CovarianceSpec& realized)
{
    return covariance_discrepancy(input.matrix(), realized.matrix());
}

} // namespace mcpope
