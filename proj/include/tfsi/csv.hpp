#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tfsi {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based line number in the source for each row.
    std::vector<size_t> line_numbers;

    /// Index of a named column; throws kParse when absent.
    size_t column(std::string_view name) const;
    std::optional<size_t> find_column(std::string_view name) const;
};

/// RFC-4180-ish reader: comma separator, double-quote quoting, blank lines skipped.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

std::string csv_escape(std::string_view field);

/// Shortest round-trip decimal representation (locale independent).
std::string format_double(double v);
/// Fixed-point with the given number of decimals.
std::string format_fixed(double v, int decimals);

/// Empty (after trimming) -> nullopt; otherwise a strict double parse.
std::optional<double> parse_optional_double(std::string_view field);
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace tfsi
