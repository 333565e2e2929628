#pragma once

// Minimal numeric CSV: fixed 12-significant-digit scientific notation,
// locale independent, "\n" line endings, "nan" for missing cells.

#include <iosfwd>
#include <string>
#include <vector>

namespace quenchcorr::csv {

std::string format_number(double v);
std::string format_integer(long v);

void write_row(std::ostream& os, const std::vector<std::string>& cells);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows; // unparsable cells become nan

    // Index of a header name; throws DomainError when absent.
    std::size_t column(const std::string& name) const;
};

// Reads a header line and numeric rows. Blank lines are skipped; rows with the
// wrong number of cells throw DomainError naming the line.
Table read(std::istream& is);

} // namespace quenchcorr::csv
