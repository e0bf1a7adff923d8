#pragma once

#include <stdexcept>
#include <string>

namespace xlem {

// Raised for malformed or inconsistent input data (bad files, unknown ids,
// dimension mismatches in user-supplied data). Maps to CLI exit code 2.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string &what) : std::runtime_error(what) {}
};

// Raised when a serialized container is unreadable: bad magic, version
// mismatch, checksum failure, truncation.
class FormatError : public DataError {
  public:
    explicit FormatError(const std::string &what) : DataError(what) {}
};

}  // namespace xlem
