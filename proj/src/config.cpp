#include "mcpope/config.hpp"

#include "mcpope/io.hpp"

#include <fstream>
#include <istream>

namespace mcpope {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string require(const ConfigDocument& document, const std::string& key, const std::string& what)
{
    auto value = document.get(key);
    if (!value)
        throw FormatError(what + ": missing key '" + key + "'");
    return *value;
}

} // namespace

ConfigDocument ConfigDocument::parse(std::istream& in, std::filesystem::path base_directory)
{
    ConfigDocument document;
    document.base_ = std::move(base_directory);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        // The key ends at the first '=', so values may contain ">=".
        if (eq == std::string::npos || eq == 0)
            throw FormatError("config line " + std::to_string(number) + ": expected key = value");
        document.entries_.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return document;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    return parse(in, path.parent_path());
}

std::optional<std::string> ConfigDocument::get(const std::string& key) const
{
    std::optional<std::string> value;
    for (const auto& [k, v] : entries_)
        if (k == key)
            value = v;
    return value;
}

std::vector<std::string> ConfigDocument::get_all(const std::string& key) const
{
    std::vector<std::string> values;
    for (const auto& [k, v] : entries_)
        if (k == key)
            values.push_back(v);
    return values;
}

std::filesystem::path ConfigDocument::resolve(const std::string& value) const
{
    std::filesystem::path p(value);
    if (p.is_relative() && !base_.empty())
        return base_ / p;
    return p;
}

ConstraintSet parse_constraints(const ConfigDocument& document)
{
    ConstraintSet constraints;
    for (const auto& [key, value] : document.entries()) {
        if (key == "lower") {
            constraints.lower_bounds = parse_vector(value);
        } else if (key == "upper") {
            constraints.upper_bounds = parse_vector(value);
        } else if (key == "linear") {
            auto op = value.find(">=");
            double sign = 1.0;
            if (op == std::string::npos) {
                op = value.find("<=");
                sign = -1.0;
            }
            if (op == std::string::npos)
                throw FormatError("constraints: linear entry needs '>=' or '<=' ('" + value + "')");
            LinearConstraint c;
            c.coefficients = sign * parse_vector(value.substr(0, op));
            c.bound = sign * parse_double(value.substr(op + 2));
            constraints.linear_inequalities.push_back(std::move(c));
        } else {
            throw FormatError("constraints: unknown key '" + key + "'");
        }
    }
    return constraints;
}

DistributionSpec parse_distribution(const ConfigDocument& document)
{
    const std::string what = "distribution";
    const std::string kind = require(document, "kind", what);
    if (kind == "gaussian") {
        GaussianModel m;
        m.mean = parse_vector(require(document, "mean", what));
        m.covariance = read_csv_matrix(document.resolve(require(document, "covariance", what)));
        return m;
    }
    if (kind == "student_t") {
        StudentTModel m;
        m.mean = parse_vector(require(document, "mean", what));
        m.sigma = parse_vector(require(document, "sigma", what));
        m.correlation = read_csv_matrix(document.resolve(require(document, "correlation", what)));
        m.dof = parse_double(require(document, "nu", what));
        return m;
    }
    if (kind == "empirical")
        return EmpiricalModel{document.resolve(require(document, "path", what))};
    throw FormatError("distribution: unknown kind '" + kind +
                      "' (expected gaussian, student_t or empirical)");
}

} // namespace mcpope
