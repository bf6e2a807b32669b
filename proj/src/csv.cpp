#include "r2c/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace r2c {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& field, double& out) {
    const std::string t = trimmed(field);
    if (t.empty()) return false;
    std::size_t consumed = 0;
    try {
        out = std::stod(t, &consumed);
    } catch (const std::exception&) {
        return false;
    }
    return consumed == t.size();
}

}  // namespace

CsvTable read_numeric_csv(std::istream& in, const std::string& name) {
    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        const auto fields = split_fields(line);

        if (rows.empty() && table.header.empty() && line_no == 1) {
            bool numeric = true;
            double v;
            for (const auto& f : fields)
                if (!parse_double(f, v)) {
                    numeric = false;
                    break;
                }
            if (!numeric) {
                for (const auto& f : fields) table.header.push_back(trimmed(f));
                width = fields.size();
                continue;
            }
        }

        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw ParseError(name + ": row has " + std::to_string(fields.size()) +
                                 " fields, expected " + std::to_string(width),
                             line_no, fields.size());
        std::vector<double> row(width);
        for (std::size_t j = 0; j < width; ++j)
            if (!parse_double(fields[j], row[j]))
                throw ParseError(name + ": field is not numeric: '" + trimmed(fields[j]) + "'",
                                 line_no, j + 1);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(name + ": no data rows", line_no, 0);

    table.values = Matrix(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j) table.values(i, j) = rows[i][j];
    return table;
}

CsvTable read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);
    return read_numeric_csv(in, path);
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    for (std::size_t j = 0; j < header.size(); ++j)
        out << header[j] << (j + 1 < header.size() ? "," : "");
    if (!header.empty()) out << "\n";
    for (std::size_t i = 0; i < values.rows(); ++i) {
        for (std::size_t j = 0; j < values.cols(); ++j)
            out << format_double(values(i, j)) << (j + 1 < values.cols() ? "," : "");
        out << "\n";
    }
}

std::vector<int> read_labels_csv(const std::string& path) {
    const CsvTable table = read_numeric_csv(path);
    const std::size_t col = table.values.cols() - 1;
    std::vector<int> labels(table.values.rows());
    for (std::size_t i = 0; i < table.values.rows(); ++i)
        labels[i] = static_cast<int>(std::llround(table.values(i, col)));
    return labels;
}

}  // namespace r2c
