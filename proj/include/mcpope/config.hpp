#pragma once

#include "mcpope/scenarios.hpp"
#include "mcpope/simplex.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mcpope {

/// Flat `key = value` document. '#' starts a comment; keys may repeat.
class ConfigDocument {
public:
    static ConfigDocument parse(std::istream& in, std::filesystem::path base_directory = {});
    static ConfigDocument load(const std::filesystem::path& path);

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept
    {
        return entries_;
    }
    /// Last value given for `key`.
    std::optional<std::string> get(const std::string& key) const;
    std::vector<std::string> get_all(const std::string& key) const;
    /// Relative paths resolve against the document's directory.
    std::filesystem::path resolve(const std::string& value) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::filesystem::path base_;
};

/// Keys: `lower = <list>`, `upper = <list>`, and repeatable `linear = <coefficients> >= <bound>`
/// (also accepted: `<=`, which is stored negated).
ConstraintSet parse_constraints(const ConfigDocument& document);

/// Keys: `kind = gaussian | student_t | empirical`; gaussian: `mean`, `covariance` (CSV path);
/// student_t: `mean`, `sigma`, `correlation` (CSV path), `nu`; empirical: `path` (CSV).
DistributionSpec parse_distribution(const ConfigDocument& document);

} // namespace mcpope
