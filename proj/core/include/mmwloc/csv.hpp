#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace mmwloc {

/// Shortest decimal form that parses back to the same double ("nan",
/// "inf" for non-finite values).
std::string format_double(double v);

/// Comma-separated writer. Fields never need quoting here: ids are plain
/// tokens and numbers are written with format_double.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& field(std::string_view s);
    CsvWriter& field(double v);
    CsvWriter& field(std::int64_t v);
    CsvWriter& field(std::uint64_t v);
    CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
    CsvWriter& field(const char* s) { return field(std::string_view(s)); }
    CsvWriter& field(const std::string& s) { return field(std::string_view(s)); }
    void end_row();

    template <typename... Ts>
    void row(const Ts&... values) {
        (field(values), ...);
        end_row();
    }

    void close();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t columns_{};
    std::size_t pending_{};
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws std::out_of_range if absent.
    std::size_t column(std::string_view name) const;
    double number(std::size_t row, std::string_view name) const;
    const std::string& text(std::size_t row, std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace mmwloc
