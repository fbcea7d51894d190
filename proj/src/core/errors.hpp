#pragma once

#include <stdexcept>
#include <string>

namespace ratl {

// Input files or datasets that violate a documented contract (missing fields,
// duplicate ids, unknown references, ...). Maps to exit code 2 at the CLI.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem problems: file missing, unreadable, unwritable.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operation not defined for the given model or configuration, and model file
// version mismatches.
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ratl
