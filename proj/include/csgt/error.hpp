#pragma once

#include <stdexcept>
#include <string>

namespace csgt {

// Bad caller input: wrong shapes, invalid parameters, flag misuse.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed or corrupt data: bad magic, truncated streams, unreadable files.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace csgt
