#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prodcat {

// RFC 4180 style CSV: header row, comma separated, double-quote quoting with
// "" escapes, CRLF treated as LF. Quoted fields may contain commas, quotes
// and newlines.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Returns the column position or -1.
    int column(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

std::string csv_quote(const std::string& field);
void write_csv(std::ostream& out, const CsvTable& table);

}  // namespace prodcat
