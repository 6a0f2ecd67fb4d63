#include "mcpope/simplex.hpp"

#include "mcpope/random.hpp"

#include <string>

namespace mcpope {

void SamplerConfig::validate() const
{
    if (n_assets < 1)
        throw std::invalid_argument("sampler: n_assets must be >= 1");
    if (base_count < 1)
        throw std::invalid_argument("sampler: base_count must be >= 1");
    if (bias_depth < 0 || bias_depth > kMaxBiasDepth)
        throw std::invalid_argument("sampler: bias_depth must lie in [0, 30]");
}

WeightBatch draw_open_uniforms(Index rows, Index cols, std::uint64_t seed)
{
    RandomStream stream(seed);
    WeightBatch u(rows, cols);
    // Row-major storage: filling data() in order draws row by row.
    for (Index i = 0; i < u.size(); ++i)
        u.data()[i] = stream.open_uniform();
    return u;
}

SamplingMethod parse_sampling_method(std::string_view name)
{
    if (name == "uniform-ratio")
        return SamplingMethod::UniformRatio;
    if (name == "gap")
        return SamplingMethod::Gap;
    if (name == "order-statistics")
        return SamplingMethod::OrderStatistics;
    if (name == "exponential")
        return SamplingMethod::Exponential;
    if (name == "ev")
        return SamplingMethod::EdgeVertex;
    throw FormatError("unknown sampling method '" + std::string(name) +
                      "' (expected uniform-ratio, gap, order-statistics, exponential or ev)");
}

std::string_view to_string(SamplingMethod method)
{
    switch (method) {
    case SamplingMethod::UniformRatio: return "uniform-ratio";
    case SamplingMethod::Gap: return "gap";
    case SamplingMethod::OrderStatistics: return "order-statistics";
    case SamplingMethod::Exponential: return "exponential";
    case SamplingMethod::EdgeVertex: return "ev";
    }
    return "unknown";
}

WeightBatch sample_uniform_ratio(const SamplerConfig& config)
{
    config.validate();
    return ratio_weights(draw_open_uniforms(config.base_count, config.n_assets, config.seed));
}

WeightBatch sample_gap(const SamplerConfig& config)
{
    config.validate();
    return gap_weights(draw_open_uniforms(config.base_count, config.n_assets - 1, config.seed));
}

WeightBatch sample_order_statistics(const SamplerConfig& config)
{
    config.validate();
    return order_statistic_weights(
        draw_open_uniforms(config.base_count, config.n_assets - 1, config.seed));
}

WeightBatch sample_exponential(const SamplerConfig& config)
{
    config.validate();
    return exponential_weights(draw_open_uniforms(config.base_count, config.n_assets, config.seed));
}

WeightBatch sample_edge_vertex(const SamplerConfig& config)
{
    config.validate();
    return ev_bias(draw_open_uniforms(config.base_count, config.n_assets, config.seed),
                   config.bias_depth);
}

WeightBatch sample(SamplingMethod method, const SamplerConfig& config)
{
    switch (method) {
    case SamplingMethod::UniformRatio: return sample_uniform_ratio(config);
    case SamplingMethod::Gap: return sample_gap(config);
    case SamplingMethod::OrderStatistics: return sample_order_statistics(config);
    case SamplingMethod::Exponential: return sample_exponential(config);
    case SamplingMethod::EdgeVertex: return sample_edge_vertex(config);
    }
    throw std::invalid_argument("unknown sampling method");
}

void ConstraintSet::validate(Index n_assets) const
{
    if (lower_bounds && lower_bounds->size() != n_assets)
        throw std::invalid_argument("constraints: lower bounds need one entry per asset");
    if (upper_bounds && upper_bounds->size() != n_assets)
        throw std::invalid_argument("constraints: upper bounds need one entry per asset");
    if (lower_bounds && upper_bounds && (lower_bounds->array() > upper_bounds->array()).any())
        throw std::invalid_argument("constraints: lower bound exceeds upper bound");
    for (const auto& c : linear_inequalities)
        if (c.coefficients.size() != n_assets)
            throw std::invalid_argument("constraints: linear inequality needs one coefficient per asset");
}

bool ConstraintSet::satisfied_by(const Eigen::Ref<const Weights>& w) const
{
    if (lower_bounds && (w.array() < lower_bounds->array()).any())
        return false;
    if (upper_bounds && (w.array() > upper_bounds->array()).any())
        return false;
    for (const auto& c : linear_inequalities)
        if (!(c.coefficients.dot(w) >= c.bound))
            return false;
    for (const auto& predicate : general_predicates)
        if (!predicate(w))
            return false;
    return true;
}

FilterResult filter_constraints(const WeightBatch& candidates, const ConstraintSet& constraints)
{
    constraints.validate(candidates.cols());
    if (candidates.rows() == 0)
        return {candidates, 1.0};
    if (constraints.empty())
        return {candidates, 1.0};

    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(candidates.rows()));
    for (Index m = 0; m < candidates.rows(); ++m)
        if (constraints.satisfied_by(candidates.row(m).transpose()))
            keep.push_back(m);
    if (keep.empty())
        throw InfeasibleError("no candidate satisfies the constraints (infeasible or too tight; "
                              "enlarge the base sample count)");

    FilterResult result;
    result.accepted.resize(static_cast<Index>(keep.size()), candidates.cols());
    for (std::size_t i = 0; i < keep.size(); ++i)
        result.accepted.row(static_cast<Index>(i)) = candidates.row(keep[i]);
    result.acceptance_rate =
        static_cast<double>(keep.size()) / static_cast<double>(candidates.rows());
    return result;
}

} // namespace mcpope
