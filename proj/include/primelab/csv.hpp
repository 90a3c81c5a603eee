#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace primelab {

// 12 significant digits ("%.12g"); the only float format used in output.
std::string format_double(double x);

// RFC 4180-style writer: comma separated, '\n' line endings, fields quoted
// only when they contain a comma, quote or newline.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column, or -1.
    int column(std::string_view name) const;
};

// Throws Error on unterminated quotes or ragged rows.
CsvTable read_csv(std::istream& in);

} // namespace primelab
