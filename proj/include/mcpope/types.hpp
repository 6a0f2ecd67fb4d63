#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace mcpope {

using Eigen::Index;

template <typename Scalar>
using WeightsT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Weights = WeightsT<double>;

/// One candidate portfolio per row.
template <typename Scalar>
using WeightBatchT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using WeightBatch = WeightBatchT<double>;

inline constexpr double kUnitSumTolerance = 1e-12;

/// No candidate survived the constraint filter.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveSemiDefinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A risk functional is undefined on the given sample (zero dispersion, no downside mass, ...).
class RiskError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed CSV, config document or risk spec text.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Long-only, fully invested: every entry >= 0 and the entries sum to one.
template <typename Derived>
bool is_portfolio(const Eigen::MatrixBase<Derived>& w, double tolerance = kUnitSumTolerance)
{
    return w.size() > 0 && (w.array() >= 0).all() &&
           std::abs(static_cast<double>(w.sum()) - 1.0) <= tolerance;
}

} // namespace mcpope
