#pragma once

#include "mcpope/types.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace mcpope {

struct SamplerConfig {
    Index n_assets = 1;
    Index base_count = 10000;
    /// Edge-vertex powers used are q = 2^p for p = 0..bias_depth.
    int bias_depth = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr int kMaxBiasDepth = 30;

/// rows x cols uniforms on (0,1), drawn row by row from a single stream.
/// A batch of k rows is always a prefix of the batch of k' > k rows.
WeightBatch draw_open_uniforms(Index rows, Index cols, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Transforms from hypercube draws to simplex points. One output row per input row.
// ---------------------------------------------------------------------------

/// w_i = v_i / sum_j v_j.
template <typename Derived>
WeightBatchT<typename Derived::Scalar> ratio_weights(const Eigen::MatrixBase<Derived>& values)
{
    WeightBatchT<typename Derived::Scalar> w = values;
    for (Index m = 0; m < w.rows(); ++m)
        w.row(m) /= w.row(m).sum();
    return w;
}

/// Gaps between the sorted interior points, including the endpoints 0 and 1.
/// Input is k x (N-1); output is k x N.
template <typename Derived>
WeightBatchT<typename Derived::Scalar> gap_weights(const Eigen::MatrixBase<Derived>& points)
{
    using Scalar = typename Derived::Scalar;
    const Index interior = points.cols();
    WeightBatchT<Scalar> w(points.rows(), interior + 1);
    std::vector<Scalar> sorted(static_cast<std::size_t>(interior));
    for (Index m = 0; m < points.rows(); ++m) {
        for (Index i = 0; i < interior; ++i)
            sorted[static_cast<std::size_t>(i)] = points(m, i);
        std::sort(sorted.begin(), sorted.end());
        Scalar previous = 0;
        for (Index i = 0; i < interior; ++i) {
            w(m, i) = sorted[static_cast<std::size_t>(i)] - previous;
            previous = sorted[static_cast<std::size_t>(i)];
        }
        w(m, interior) = Scalar(1) - previous;
    }
    return w;
}

/// Same law as gap_weights without sorting: the interior points are generated in
/// descending order, the largest of n uniforms below y being y * u^(1/n).
/// Input is k x (N-1); output is k x N.
template <typename Derived>
WeightBatchT<typename Derived::Scalar>
order_statistic_weights(const Eigen::MatrixBase<Derived>& uniforms)
{
    using Scalar = typename Derived::Scalar;
    using std::pow;
    const Index interior = uniforms.cols();
    WeightBatchT<Scalar> w(uniforms.rows(), interior + 1);
    std::vector<Scalar> descending(static_cast<std::size_t>(interior));
    for (Index m = 0; m < uniforms.rows(); ++m) {
        Scalar y = 1;
        for (Index j = 0; j < interior; ++j) {
            y *= pow(uniforms(m, j), Scalar(1) / Scalar(interior - j));
            descending[static_cast<std::size_t>(j)] = y;
        }
        Scalar previous = 0;
        for (Index i = 0; i < interior; ++i) {
            const Scalar point = descending[static_cast<std::size_t>(interior - 1 - i)];
            w(m, i) = point - previous;
            previous = point;
        }
        w(m, interior) = Scalar(1) - previous;
    }
    return w;
}

/// Normalized exponential variates; the rate cancels, leaving log U_i / sum_j log U_j.
/// Uniforms must lie strictly inside (0,1).
template <typename Derived>
WeightBatchT<typename Derived::Scalar> exponential_weights(const Eigen::MatrixBase<Derived>& uniforms)
{
    return ratio_weights(uniforms.derived().array().log().matrix());
}

/// Edge-vertex biasing. Row m of the base produces bias_depth + 1 consecutive output rows
/// U_m^(2^p) / sum_j U_jm^(2^p), p = 0..bias_depth. Each level squares the previous,
/// already normalized, level and renormalizes, which keeps the powers from underflowing.
/// Tied maxima share the mass equally.
template <typename Derived>
WeightBatchT<typename Derived::Scalar> ev_bias(const Eigen::MatrixBase<Derived>& base, int bias_depth)
{
    using Scalar = typename Derived::Scalar;
    if (bias_depth < 0 || bias_depth > kMaxBiasDepth)
        throw std::invalid_argument("bias depth must lie in [0, 30]");
    if (!((base.array() > Scalar(0)).all() && (base.array() < Scalar(1)).all()))
        throw std::invalid_argument("edge-vertex base uniforms must lie strictly inside (0,1)");

    const Index levels = bias_depth + 1;
    WeightBatchT<Scalar> w(base.rows() * levels, base.cols());
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> level(base.cols());
    for (Index m = 0; m < base.rows(); ++m) {
        level = base.row(m);
        level /= level.sum();
        w.row(m * levels) = level;
        for (Index p = 1; p < levels; ++p) {
            level = level.array().square().matrix();
            level /= level.sum();
            w.row(m * levels + p) = level;
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

enum class SamplingMethod { UniformRatio, Gap, OrderStatistics, Exponential, EdgeVertex };

SamplingMethod parse_sampling_method(std::string_view name);
std::string_view to_string(SamplingMethod method);

/// Normalized raw uniforms. Biased toward the centroid; kept as the p = 0 edge-vertex level.
WeightBatch sample_uniform_ratio(const SamplerConfig& config);
/// Even simplicial sample by sorted gaps. The default even sampler.
WeightBatch sample_gap(const SamplerConfig& config);
WeightBatch sample_order_statistics(const SamplerConfig& config);
WeightBatch sample_exponential(const SamplerConfig& config);
/// k * (bias_depth + 1) edge-vertex biased candidates.
WeightBatch sample_edge_vertex(const SamplerConfig& config);

WeightBatch sample(SamplingMethod method, const SamplerConfig& config);

// ---------------------------------------------------------------------------
// Constraints
// ---------------------------------------------------------------------------

/// coefficients . w >= bound
struct LinearConstraint {
    Weights coefficients;
    double bound = 0.0;
};

using WeightPredicate = std::function<bool(const Eigen::Ref<const Weights>&)>;

struct ConstraintSet {
    std::optional<Weights> lower_bounds;
    std::optional<Weights> upper_bounds;
    std::vector<LinearConstraint> linear_inequalities;
    std::vector<WeightPredicate> general_predicates;

    bool empty() const noexcept
    {
        return !lower_bounds && !upper_bounds && linear_inequalities.empty() &&
               general_predicates.empty();
    }

    /// Throws std::invalid_argument when the parts disagree with `n_assets`
    /// or a lower bound exceeds its upper bound.
    void validate(Index n_assets) const;

    bool satisfied_by(const Eigen::Ref<const Weights>& w) const;
};

struct FilterResult {
    WeightBatch accepted;
    double acceptance_rate = 0.0;
};

/// Rejection: keeps exactly the rows satisfying every constraint, in their original order.
/// Throws InfeasibleError when a non-empty batch loses every row.
FilterResult filter_constraints(const WeightBatch& candidates, const ConstraintSet& constraints);

} // namespace mcpope
