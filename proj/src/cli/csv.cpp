#include "dosc/cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dosc::cli {

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

}  // namespace

std::string format_cell(const CsvCell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) {
        return format_number(*d);
    }
    if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        return std::to_string(*i);
    }
    return quote(std::get<std::string>(cell));
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvCell> row) {
    if (row.size() != header_.size()) {
        throw std::logic_error("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                               std::to_string(header_.size()));
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        out += (i ? "," : "") + quote(header_[i]);
    }
    out += "\r\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + format_cell(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

void write_table(const std::filesystem::path& path, const CsvTable& table, Json meta) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        out << table.str();
    }
    meta["csv"] = path.filename().string();
    meta["columns"] = table.header();
    meta["rows"] = table.rows();
    std::ofstream side(path.string() + ".json", std::ios::binary);
    if (!side) {
        throw std::runtime_error("cannot write " + path.string() + ".json");
    }
    side << meta.dump(2) << '\n';
}

}  // namespace dosc::cli
