#pragma once

#include "mcpope/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mcpope {

/// Shortest text that parses back to exactly `value`.
std::string format_double(double value);
/// Always 17 significant digits ("%.17g").
std::string format_double17(double value);

/// Throws FormatError when the text is not entirely a number.
double parse_double(std::string_view text);

/// Comma-separated list of numbers, e.g. "0.1, 0.2,0.3".
Weights parse_vector(std::string_view text);

/// Rectangular numeric CSV. A first line made only of non-numeric cells is taken as a header.
/// Blank lines are skipped. Errors (FormatError): "empty file", "ragged rows",
/// "non-numeric cell (row, col)" with 1-based row and column.
Eigen::MatrixXd read_csv_matrix(std::istream& in);
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);

/// Comma-separated, LF line endings, 17 significant digits.
void write_csv_matrix(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                      const std::vector<std::string>& header = {});
void write_csv_matrix(const std::filesystem::path& path,
                      const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                      const std::vector<std::string>& header = {});

/// asset_1, ..., asset_n
std::vector<std::string> asset_labels(Index n);

} // namespace mcpope
