#pragma once

#include <string>
#include <vector>

namespace dpfd {

// Minimal RFC-4180-style table: header row plus string cells. Quoted fields
// and escaped quotes are handled; embedded newlines are not.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const; // throws DataError
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);
void write_csv(const std::string& path, const CsvTable& table);
std::string format_csv(const CsvTable& table);

// Shortest round-trip decimal formatting, used everywhere a double is
// printed so that identical values yield identical bytes.
std::string format_double(double v);

} // namespace dpfd
