#include "prodcat/csv.hpp"

#include <fstream>
#include <sstream>

#include "prodcat/common.hpp"

namespace prodcat {

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

[[noreturn]] void quoting_error(std::size_t line, const char* what) {
    throw DataError("malformed CSV quoting at line " + std::to_string(line) + ": " + what);
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool after_close = false;  // just closed a quote; only , or newline may follow
    bool any_char = false;     // row has content (distinguishes trailing newline)
    std::size_t line = 1;
    std::size_t field_start_line = 1;

    auto end_field = [&]() {
        row.push_back(field);
        field.clear();
        after_close = false;
    };
    auto end_row = [&]() {
        end_field();
        if (table.header.empty()) {
            table.header = row;
        } else {
            if (row.size() != table.header.size()) {
                throw DataError("CSV row at line " + std::to_string(line) + " has " +
                                std::to_string(row.size()) + " fields, expected " +
                                std::to_string(table.header.size()));
            }
            table.rows.push_back(row);
        }
        row.clear();
        any_char = false;
    };

    int c;
    // skip a UTF-8 BOM
    if (in.peek() == 0xEF) {
        char bom[3];
        in.read(bom, 3);
        if (in.gcount() != 3 || bom[1] != char(0xBB) || bom[2] != char(0xBF)) {
            throw DataError("bad byte order mark at line 1");
        }
    }

    while ((c = in.get()) != EOF) {
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                    after_close = true;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (after_close || !field.empty()) quoting_error(line, "quote inside unquoted field");
                in_quotes = true;
                any_char = true;
                field_start_line = line;
                break;
            case ',':
                end_field();
                any_char = true;
                break;
            case '\r':
                if (in.peek() == '\n') break;  // CRLF handled by the '\n' branch
                quoting_error(line, "stray carriage return");
            case '\n':
                if (any_char || !field.empty() || !row.empty()) end_row();
                ++line;
                break;
            default:
                if (after_close) quoting_error(line, "characters after closing quote");
                field.push_back(ch);
                any_char = true;
                break;
        }
    }
    if (in_quotes) quoting_error(field_start_line, "unterminated quoted field");
    if (any_char || !field.empty() || !row.empty()) end_row();
    if (table.header.empty()) throw DataError("CSV file has no header row");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    return parse_csv(in);
}

std::string csv_quote(const std::string& field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.put(',');
            out << csv_quote(row[i]);
        }
        out.put('\n');
    };
    write_row(table.header);
    for (const auto& row : table.rows) write_row(row);
}

}  // namespace prodcat
