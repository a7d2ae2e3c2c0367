#pragma once

#include <stdexcept>
#include <string>

namespace stylo {

// Domain errors (bad corpus, bad arguments, degenerate inputs).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / stream failures.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace stylo
