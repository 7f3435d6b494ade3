#pragma once

#include "dpdncv/types.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpdncv::cli {

/// Malformed input. The message carries the source and line number.
class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvRecord {
    std::size_t line = 0;  ///< 1-based line where the record starts
    std::vector<std::string> fields;
};

/// RFC-4180 records: quoted fields, doubled quotes, CRLF or LF endings.
/// Blank lines are skipped.
std::vector<CsvRecord> parse_csv_records(std::istream& in, const std::string& source);

/// Header row first; column `y` is the response, the rest are covariates.
Dataset read_dataset(std::istream& in, const std::string& source);
Dataset read_dataset_file(const std::string& path);

void write_dataset(std::ostream& os, const Vector& y, const Matrix& X,
                   const std::vector<std::string>& names = {});

}  // namespace dpdncv::cli
