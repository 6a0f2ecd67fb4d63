#include "mcpope/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mcpope {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool try_parse_double(std::string_view text, double& value)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    if (text.empty())
        return false;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc() && end == text.data() + text.size();
}

std::vector<std::string_view> split(std::string_view line, char separator)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(separator, start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return cells;
}

} // namespace

std::string format_double(double value)
{
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return ec == std::errc() ? std::string(buffer, end) : std::string("nan");
}

std::string format_double17(double value)
{
    char buffer[64];
    const auto [end, ec] =
        std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return ec == std::errc() ? std::string(buffer, end) : std::string("nan");
}

double parse_double(std::string_view text)
{
    double value = 0.0;
    if (!try_parse_double(text, value))
        throw FormatError("not a number: '" + std::string(trim(text)) + "'");
    return value;
}

Weights parse_vector(std::string_view text)
{
    const auto cells = split(trim(text), ',');
    Weights v(static_cast<Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i)
        v(static_cast<Index>(i)) = parse_double(cells[i]);
    return v;
}

Eigen::MatrixXd read_csv_matrix(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_number = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_number;
        const auto content = trim(line);
        if (content.empty())
            continue;
        const auto cells = split(content, ',');
        std::vector<double> values(cells.size());
        std::size_t bad_cell = 0;
        std::size_t bad_count = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!try_parse_double(cells[c], values[c])) {
                if (bad_count++ == 0)
                    bad_cell = c + 1;
            }
        }
        if (first_content_line && bad_count == cells.size()) {
            first_content_line = false;
            continue; // header
        }
        first_content_line = false;
        if (bad_count > 0)
            throw FormatError("non-numeric cell (" + std::to_string(line_number) + ", " +
                              std::to_string(bad_cell) + ")");
        if (!rows.empty() && values.size() != rows.front().size())
            throw FormatError("ragged rows: line " + std::to_string(line_number) + " has " +
                              std::to_string(values.size()) + " cells, expected " +
                              std::to_string(rows.front().size()));
        rows.push_back(std::move(values));
    }
    if (rows.empty())
        throw FormatError("empty file");

    Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return m;
}

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    return read_csv_matrix(in);
}

void write_csv_matrix(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                      const std::vector<std::string>& header)
{
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            out << (c ? "," : "") << header[c];
        out << '\n';
    }
    std::string line;
    for (Index r = 0; r < matrix.rows(); ++r) {
        line.clear();
        for (Index c = 0; c < matrix.cols(); ++c) {
            if (c)
                line += ',';
            line += format_double17(matrix(r, c));
        }
        line += '\n';
        out << line;
    }
}

void write_csv_matrix(const std::filesystem::path& path,
                      const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                      const std::vector<std::string>& header)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    write_csv_matrix(out, matrix, header);
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<std::string> asset_labels(Index n)
{
    std::vector<std::string> labels;
    for (Index i = 1; i <= n; ++i)
        labels.push_back("asset_" + std::to_string(i));
    return labels;
}

} // namespace mcpope
