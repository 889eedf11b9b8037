#ifndef ELBCHAIN_CSV_HPP
#define ELBCHAIN_CSV_HPP

#include <string>
#include <vector>

namespace elb {

// Minimal comma-separated table, no quoting (field values here are plain
// identifiers and numbers). Whitespace and trailing CR are trimmed.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

// Column position by header name, -1 when absent.
int column_index(const CsvTable& table, const std::string& name);

// Shortest decimal string that round-trips the exact double, locale
// independent, so emitted files are byte-stable across runs.
std::string format_double(double v);

double parse_double(const std::string& field, int line = 0);
long parse_long(const std::string& field, int line = 0);

} // namespace elb

#endif
