#include "cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace dpdncv::cli {

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
    throw CsvError(source + ":" + std::to_string(line) + ": " + what);
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t line,
                  std::size_t col) {
    std::size_t b = 0, e = cell.size();
    while (b < e && (cell[b] == ' ' || cell[b] == '\t')) ++b;
    while (e > b && (cell[e - 1] == ' ' || cell[e - 1] == '\t')) --e;
    const std::string where = "column " + std::to_string(col + 1);
    if (b == e) fail(source, line, where + ": empty cell");
    const char* first = cell.data() + b;
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, cell.data() + e, v);
    if (ec != std::errc() || ptr != cell.data() + e)
        fail(source, line, where + ": not a number: '" + cell.substr(b, e - b) + "'");
    if (!std::isfinite(v)) fail(source, line, where + ": non-finite value");
    return v;
}

}  // namespace

std::vector<CsvRecord> parse_csv_records(std::istream& in, const std::string& source) {
    std::vector<CsvRecord> records;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;       // inside quotes
    bool was_quoted = false;   // current field opened with a quote
    bool row_has_data = false;
    std::size_t line = 1;
    std::size_t quote_line = 0;
    std::size_t row_line = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
    };
    auto end_row = [&] {
        if (row_has_data || !field.empty() || !row.empty()) {
            end_field();
            records.push_back({row_line, std::move(row)});
        }
        row.clear();
        row_has_data = false;
        row_line = line + 1;
    };

    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || was_quoted) fail(source, line, "stray quote inside field");
                quoted = was_quoted = row_has_data = true;
                quote_line = line;
                break;
            case ',':
                end_field();
                row_has_data = true;
                break;
            case '\r':
                if (in.peek() == '\n') break;
                end_row();
                ++line;
                break;
            case '\n':
                end_row();
                ++line;
                break;
            default:
                if (was_quoted) fail(source, line, "characters after closing quote");
                field.push_back(c);
                row_has_data = true;
        }
    }
    if (quoted) fail(source, quote_line, "unterminated quoted field");
    end_row();
    return records;
}

Dataset read_dataset(std::istream& in, const std::string& source) {
    const auto records = parse_csv_records(in, source);
    if (records.empty()) throw CsvError(source + ": empty file");

    auto header = records[0].fields;
    if (header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
    const std::size_t hline = records[0].line;
    if (header.size() < 2) fail(source, hline, "header needs y and at least one covariate");
    if (header[0] != "y") fail(source, hline, "first column must be named 'y', got '" + header[0] + "'");
    const std::size_t cols = header.size();
    const Index n = static_cast<Index>(records.size() - 1);
    if (n == 0) fail(source, hline, "no data rows");

    Vector y(n);
    Matrix X(n, static_cast<Index>(cols - 1));
    for (Index i = 0; i < n; ++i) {
        const auto& rec = records[static_cast<std::size_t>(i) + 1].fields;
        const std::size_t line = records[static_cast<std::size_t>(i) + 1].line;
        if (rec.size() != cols)
            fail(source, line, "expected " + std::to_string(cols) + " columns, found " +
                                   std::to_string(rec.size()));
        y(i) = parse_cell(rec[0], source, line, 0);
        for (std::size_t j = 1; j < cols; ++j)
            X(i, static_cast<Index>(j - 1)) = parse_cell(rec[j], source, line, j);
    }
    std::vector<std::string> names(header.begin() + 1, header.end());
    return Dataset(std::move(y), std::move(X), std::move(names));
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open input file: " + path);
    return read_dataset(in, path);
}

void write_dataset(std::ostream& os, const Vector& y, const Matrix& X,
                   const std::vector<std::string>& names) {
    char buf[32];
    os << "y";
    for (Index j = 0; j < X.cols(); ++j) {
        os << ',';
        if (static_cast<std::size_t>(j) < names.size()) os << names[static_cast<std::size_t>(j)];
        else os << 'x' << (j + 1);
    }
    os << '\n';
    for (Index i = 0; i < y.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", y(i));
        os << buf;
        for (Index j = 0; j < X.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", X(i, j));
            os << ',' << buf;
        }
        os << '\n';
    }
}

}  // namespace dpdncv::cli
