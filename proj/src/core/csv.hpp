#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace ratl {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based line on which the record starts
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
// newlines. Accepts both \n and \r\n line endings.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Next record, or nullopt at end of input. Throws DataError on a stray
    // quote inside an unquoted field or an unterminated quoted field.
    std::optional<CsvRecord> next();

private:
    std::istream& in_;
    std::size_t line_ = 1;
};

} // namespace ratl
