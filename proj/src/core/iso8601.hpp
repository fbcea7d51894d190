#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ratl {

// Parses an ISO 8601 instant ("2016-05-01T10:00:00Z", optional fractional
// seconds, "Z" or a +hh:mm/-hh:mm offset) to Unix seconds. Fractional seconds
// are truncated; sub-second ordering is preserved by file order instead.
std::optional<std::int64_t> parse_iso8601(std::string_view s);

// Formats Unix seconds as "YYYY-MM-DDThh:mm:ssZ".
std::string format_iso8601(std::int64_t unix_seconds);

} // namespace ratl
