#include "mcpope/risk.hpp"

#include "mcpope/io.hpp"

namespace mcpope {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_field(std::string_view kind, std::string_view field, std::string_view text)
{
    try {
        return parse_double(text);
    } catch (const FormatError&) {
        throw FormatError("malformed risk spec '" + std::string(kind) + "': field '" +
                          std::string(field) + "' is not a number ('" + std::string(text) + "')");
    }
}

} // namespace

void validate(const RiskSpec& spec)
{
    std::visit(Overloaded{
                   [](const MeanVariance& s) {
                       if (!std::isfinite(s.lambda))
                           throw std::invalid_argument("mean-variance lambda must be finite");
                   },
                   [](const VarianceOnly&) {},
                   [](const ValueAtRisk& s) { detail::require_tail(s.tail); },
                   [](const ConditionalValueAtRisk& s) { detail::require_tail(s.tail); },
                   [](const NegativeSharpe&) {},
                   [](const NegativeOmega&) {},
                   [](const VariabilityRatio& s) {
                       if (!(s.p > 0.0 && s.q > 0.0))
                           throw std::invalid_argument("variability ratio: p and q must be positive");
                   },
               },
               spec);
}

RiskSpec parse_risk_spec(std::string_view text)
{
    if (text == "variance")
        return VarianceOnly{};
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw FormatError("malformed risk spec '" + std::string(text) +
                          "' (expected kind:value, e.g. cvar:0.05)");
    const auto kind = text.substr(0, colon);
    const auto body = text.substr(colon + 1);

    RiskSpec spec;
    if (kind == "mv") {
        spec = MeanVariance{parse_field(kind, "lambda", body), std::nullopt};
    } else if (kind == "var") {
        spec = ValueAtRisk{parse_field(kind, "u", body)};
    } else if (kind == "cvar") {
        spec = ConditionalValueAtRisk{parse_field(kind, "u", body)};
    } else if (kind == "sharpe") {
        spec = NegativeSharpe{parse_field(kind, "b", body)};
    } else if (kind == "omega") {
        spec = NegativeOmega{parse_field(kind, "b", body)};
    } else if (kind == "phi") {
        const auto first = body.find(',');
        const auto second = first == std::string_view::npos ? first : body.find(',', first + 1);
        if (second == std::string_view::npos)
            throw FormatError("malformed risk spec 'phi': expected phi:<b>,<p>,<q>");
        spec = VariabilityRatio{parse_field(kind, "b", body.substr(0, first)),
                                parse_field(kind, "p", body.substr(first + 1, second - first - 1)),
                                parse_field(kind, "q", body.substr(second + 1))};
    } else {
        throw FormatError("unknown risk kind '" + std::string(kind) +
                          "' (expected mv, variance, var, cvar, sharpe, omega or phi)");
    }
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw FormatError("malformed risk spec '" + std::string(text) + "': " + e.what());
    }
    return spec;
}

std::string to_string(const RiskSpec& spec)
{
    return std::visit(
        Overloaded{
            [](const MeanVariance& s) { return "mv:" + format_double(s.lambda); },
            [](const VarianceOnly&) { return std::string("variance"); },
            [](const ValueAtRisk& s) { return "var:" + format_double(s.tail); },
            [](const ConditionalValueAtRisk& s) { return "cvar:" + format_double(s.tail); },
            [](const NegativeSharpe& s) { return "sharpe:" + format_double(s.benchmark); },
            [](const NegativeOmega& s) { return "omega:" + format_double(s.threshold); },
            [](const VariabilityRatio& s) {
                return "phi:" + format_double(s.threshold) + "," + format_double(s.p) + "," +
                       format_double(s.q);
            },
        },
        spec);
}

double evaluate(const RiskSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& r)
{
    return std::visit(
        Overloaded{
            [&](const MeanVariance& s) { return risk_mean_variance(r, s.lambda); },
            [&](const VarianceOnly&) { return risk_mean_variance(r, 0.0); },
            [&](const ValueAtRisk& s) { return empirical_var(r, s.tail); },
            [&](const ConditionalValueAtRisk& s) { return empirical_cvar(r, s.tail); },
            [&](const NegativeSharpe& s) { return negative_sharpe(r, s.benchmark); },
            [&](const NegativeOmega& s) { return -omega(r, s.threshold); },
            [&](const VariabilityRatio& s) { return -variability_ratio(r, s.threshold, s.p, s.q); },
        },
        spec);
}

double evaluate(const RiskSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& r,
                const Eigen::Ref<const Weights>& weights)
{
    if (const auto* mv = std::get_if<MeanVariance>(&spec); mv && mv->expected_returns) {
        if (mv->expected_returns->size() != weights.size())
            throw std::invalid_argument("expected returns and weights dimensions differ");
        detail::require_sample(r);
        return population_variance(r) - mv->lambda * mv->expected_returns->dot(weights);
    }
    return evaluate(spec, r);
}

} // namespace mcpope
