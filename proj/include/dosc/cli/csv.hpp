#pragma once

// RFC-4180 style CSV with fixed 17-significant-digit scientific notation, and
// the JSON metadata sidecar written next to every table.

#include "dosc/cli/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace dosc::cli {

using CsvCell = std::variant<double, std::int64_t, std::string>;

// "%.16e"; non-finite values print as nan, inf, -inf.
std::string format_number(double v);
std::string format_cell(const CsvCell& cell);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<CsvCell> row);
    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<CsvCell>> rows_;
};

// Writes `table` to `path` and `meta` (plus the column list) to `path`.json.
void write_table(const std::filesystem::path& path, const CsvTable& table, Json meta);

}  // namespace dosc::cli
