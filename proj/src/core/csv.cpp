#include "core/csv.hpp"

#include "core/errors.hpp"

namespace ratl {

std::optional<CsvRecord> CsvReader::next() {
    int first = in_.peek();
    if (first == std::istream::traits_type::eof()) return std::nullopt;

    CsvRecord record;
    record.line = line_;
    std::string field;
    bool quoted = false;
    bool quote_closed = false; // just left a quoted section; only , " CR LF legal

    for (;;) {
        int ci = in_.get();
        if (ci == std::istream::traits_type::eof()) {
            if (quoted) {
                throw DataError("line " + std::to_string(record.line) + ": unterminated quoted field");
            }
            record.fields.push_back(std::move(field));
            return record;
        }
        char c = static_cast<char>(ci);
        if (c == '\n') ++line_;

        if (quoted) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                    quote_closed = true;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == ',') {
            record.fields.push_back(std::move(field));
            field.clear();
            quote_closed = false;
        } else if (c == '\r') {
            if (in_.peek() == '\n') {
                in_.get();
                ++line_;
            }
            record.fields.push_back(std::move(field));
            return record;
        } else if (c == '\n') {
            record.fields.push_back(std::move(field));
            return record;
        } else if (c == '"') {
            if (!field.empty() || quote_closed) {
                throw DataError("line " + std::to_string(line_) + ": unexpected quote in unquoted field");
            }
            quoted = true;
        } else {
            field.push_back(c);
        }
    }
}

} // namespace ratl
