#pragma once

#include "mcpope/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mcpope {

// ---------------------------------------------------------------------------
// Risk specification
// ---------------------------------------------------------------------------

/// Population variance minus lambda times the expected return. When expected returns
/// are given they replace the sample mean of the portfolio returns.
struct MeanVariance {
    double lambda = 0.0;
    std::optional<Weights> expected_returns;
};
struct VarianceOnly {};
struct ValueAtRisk {
    double tail = 0.05;
};
struct ConditionalValueAtRisk {
    double tail = 0.05;
};
struct NegativeSharpe {
    double benchmark = 0.0;
};
struct NegativeOmega {
    double threshold = 0.0;
};
/// Evaluated as the negated ratio so that minimizing it maximizes the ratio.
struct VariabilityRatio {
    double threshold = 0.0;
    double p = 1.0;
    double q = 1.0;
};

using RiskSpec = std::variant<MeanVariance, VarianceOnly, ValueAtRisk, ConditionalValueAtRisk,
                              NegativeSharpe, NegativeOmega, VariabilityRatio>;

/// Throws std::invalid_argument for a tail outside (0,1) or non-positive exponents.
void validate(const RiskSpec& spec);

/// Text forms: mv:<lambda>, variance, var:<u>, cvar:<u>, sharpe:<b>, omega:<b>, phi:<b>,<p>,<q>.
/// Throws FormatError naming the malformed field.
RiskSpec parse_risk_spec(std::string_view text);
std::string to_string(const RiskSpec& spec);

// ---------------------------------------------------------------------------
// Scalar functionals of a sample of portfolio returns. Moments use divisor J.
// ---------------------------------------------------------------------------

namespace detail {

template <typename Derived>
void require_sample(const Eigen::DenseBase<Derived>& r)
{
    if (r.size() < 2)
        throw std::invalid_argument("return sample needs J >= 2 entries");
}

inline void require_tail(double u)
{
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("tail probability must lie strictly inside (0, 1)");
}

/// ceil(u J), guarded against u J landing a rounding error above an integer.
inline Index tail_rank(double u, Index sample_size)
{
    const double scaled = u * static_cast<double>(sample_size);
    auto rank = static_cast<Index>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
    return std::clamp<Index>(rank, 1, sample_size);
}

/// The `rank` smallest entries of r, unordered except that entry rank - 1 is the rank-th
/// smallest. A strided subsample picks a threshold a little above the target rank, so the
/// selection usually runs on a few multiples of `rank` entries instead of all of r.
template <typename Derived>
const std::vector<typename Derived::Scalar>& lower_tail(const Eigen::DenseBase<Derived>& r,
                                                        Index rank)
{
    using Scalar = typename Derived::Scalar;
    thread_local std::vector<Scalar> sample;
    thread_local std::vector<Scalar> values;
    const Index n = r.size();

    auto select_all = [&]() -> const std::vector<Scalar>& {
        values.resize(static_cast<std::size_t>(n));
        for (Index j = 0; j < n; ++j)
            values[static_cast<std::size_t>(j)] = r.derived().coeff(j);
        std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
        return values;
    };

    constexpr Index kStride = 16;
    if (n < 1024 * kStride)
        return select_all();

    sample.clear();
    for (Index j = 0; j < n; j += kStride)
        sample.push_back(r.derived().coeff(j));
    const double expected = static_cast<double>(rank) / static_cast<double>(kStride);
    const auto target = static_cast<std::size_t>(expected + 4.0 * std::sqrt(expected) + 8.0);
    if (target >= sample.size() / 2)
        return select_all();
    std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(target),
                     sample.end());
    const Scalar threshold = sample[target];

    values.clear();
    for (Index j = 0; j < n; ++j) {
        const Scalar v = r.derived().coeff(j);
        if (v <= threshold)
            values.push_back(v);
    }
    if (static_cast<Index>(values.size()) < rank)
        return select_all();
    std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
    return values;
}

} // namespace detail

/// r_j = sum_i w_i x_ji
template <typename Derived, typename WeightDerived>
auto portfolio_returns(const Eigen::MatrixBase<Derived>& scenarios,
                       const Eigen::MatrixBase<WeightDerived>& weights)
{
    if (scenarios.cols() != weights.size())
        throw std::invalid_argument("portfolio returns: dimension mismatch");
    return (scenarios * weights).eval();
}

template <typename Derived>
typename Derived::Scalar sample_mean(const Eigen::DenseBase<Derived>& r)
{
    return r.sum() / static_cast<typename Derived::Scalar>(r.size());
}

template <typename Derived>
typename Derived::Scalar population_variance(const Eigen::DenseBase<Derived>& r)
{
    const auto mean = sample_mean(r);
    return (r.derived().array() - mean).square().sum() /
           static_cast<typename Derived::Scalar>(r.size());
}

template <typename Derived>
typename Derived::Scalar risk_mean_variance(const Eigen::DenseBase<Derived>& r, double lambda)
{
    detail::require_sample(r);
    return population_variance(r) - lambda * sample_mean(r);
}

/// Negated ceil(uJ)-th smallest return; positive values are losses.
template <typename Derived>
typename Derived::Scalar empirical_var(const Eigen::DenseBase<Derived>& r, double u)
{
    detail::require_sample(r);
    detail::require_tail(u);
    const Index rank = detail::tail_rank(u, r.size());
    const auto& values = detail::lower_tail(r, rank);
    return -values[static_cast<std::size_t>(rank - 1)];
}

/// Negated mean of the ceil(uJ) smallest returns.
template <typename Derived>
typename Derived::Scalar empirical_cvar(const Eigen::DenseBase<Derived>& r, double u)
{
    detail::require_sample(r);
    detail::require_tail(u);
    const Index rank = detail::tail_rank(u, r.size());
    const auto& values = detail::lower_tail(r, rank);
    typename Derived::Scalar sum = 0;
    for (Index j = 0; j < rank; ++j)
        sum += values[static_cast<std::size_t>(j)];
    return -sum / static_cast<typename Derived::Scalar>(rank);
}

/// -(mean - b) / population standard deviation. Throws RiskError on zero dispersion.
template <typename Derived>
typename Derived::Scalar negative_sharpe(const Eigen::DenseBase<Derived>& r, double benchmark)
{
    detail::require_sample(r);
    using std::sqrt;
    const auto sd = sqrt(population_variance(r));
    if (r.minCoeff() == r.maxCoeff() || !(sd > 0))
        throw RiskError("zero dispersion");
    return -(sample_mean(r) - benchmark) / sd;
}

/// E[(r - b)^+] / E[(b - r)^+]. +infinity when only the denominator vanishes;
/// RiskError("degenerate at threshold") when both do.
template <typename Derived>
typename Derived::Scalar omega(const Eigen::DenseBase<Derived>& r, double threshold)
{
    using Scalar = typename Derived::Scalar;
    detail::require_sample(r);
    const auto excess = (r.derived().array() - threshold).eval();
    const Scalar upside = excess.max(Scalar(0)).sum();
    const Scalar downside = (-excess).max(Scalar(0)).sum();
    if (downside == 0) {
        if (upside == 0)
            throw RiskError("degenerate at threshold");
        return std::numeric_limits<Scalar>::infinity();
    }
    return upside / downside;
}

/// (mean - b) / E[(b - r)^+] + 1, the put-call parity form of omega.
template <typename Derived>
typename Derived::Scalar omega_put_call(const Eigen::DenseBase<Derived>& r, double threshold)
{
    using Scalar = typename Derived::Scalar;
    detail::require_sample(r);
    const Scalar n = static_cast<Scalar>(r.size());
    const Scalar shortfall = (threshold - r.derived().array()).max(Scalar(0)).sum() / n;
    const Scalar drift = sample_mean(r) - threshold;
    if (shortfall == 0) {
        if (drift > 0)
            return std::numeric_limits<Scalar>::infinity();
        throw RiskError("degenerate at threshold");
    }
    return drift / shortfall + Scalar(1);
}

/// E[((r - b)^+)^p]^(1/p) / E[((b - r)^+)^q]^(1/q). Omega at p = q = 1, Sortino at (1, 2).
template <typename Derived>
typename Derived::Scalar variability_ratio(const Eigen::DenseBase<Derived>& r, double threshold,
                                           double p, double q)
{
    using Scalar = typename Derived::Scalar;
    using std::pow;
    detail::require_sample(r);
    if (!(p > 0.0 && q > 0.0))
        throw std::invalid_argument("variability ratio: p and q must be positive");
    const Scalar n = static_cast<Scalar>(r.size());
    const auto excess = (r.derived().array() - threshold).eval();
    const Scalar lower = excess.min(Scalar(0)).abs().pow(q).sum() / n;
    if (lower == 0)
        throw RiskError("no downside mass");
    const Scalar upper = excess.max(Scalar(0)).pow(p).sum() / n;
    return pow(upper, Scalar(1) / p) / pow(lower, Scalar(1) / q);
}

/// Dispatches on the spec. NegativeOmega and VariabilityRatio return the negated ratio.
double evaluate(const RiskSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& returns);

/// As above; a MeanVariance spec carrying expected returns uses R . w for the return term.
double evaluate(const RiskSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& returns,
                const Eigen::Ref<const Weights>& weights);

} // namespace mcpope
