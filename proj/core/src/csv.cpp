#include "mmwloc/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mmwloc {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::trunc), path_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const auto& h : header) field(h);
    end_row();
}

CsvWriter& CsvWriter::field(std::string_view s) {
    if (pending_ > 0) out_ << ',';
    out_ << s;
    ++pending_;
    return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_double(v))); }
CsvWriter& CsvWriter::field(std::int64_t v) { return field(std::string_view(std::to_string(v))); }
CsvWriter& CsvWriter::field(std::uint64_t v) { return field(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
    if (pending_ != columns_) {
        throw std::logic_error(path_.string() + ": row has " + std::to_string(pending_) + " fields, expected " +
                               std::to_string(columns_));
    }
    out_ << '\n';
    pending_ = 0;
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw std::runtime_error("error writing " + path_.string());
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::out_of_range("no column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::string_view name) const {
    return std::strtod(rows.at(row).at(column(name)).c_str(), nullptr);
}

const std::string& CsvTable::text(std::size_t row, std::string_view name) const {
    return rows.at(row).at(column(name));
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

}  // namespace mmwloc
