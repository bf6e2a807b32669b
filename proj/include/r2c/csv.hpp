#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "r2c/common.hpp"

namespace r2c {

struct CsvTable {
    std::vector<std::string> header;  // empty when the file has no header row
    Matrix values;
};

/// Reads a comma-separated numeric table. A single leading header row is
/// auto-detected (any non-numeric field). Rows with a deviating field
/// count or unparseable values raise ParseError with line and column.
CsvTable read_numeric_csv(const std::string& path);
CsvTable read_numeric_csv(std::istream& in, const std::string& name);

/// Serializes a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values);

/// Reads a single-column (or last-column) integer label vector from CSV.
std::vector<int> read_labels_csv(const std::string& path);

}  // namespace r2c
