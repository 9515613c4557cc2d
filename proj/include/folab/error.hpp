#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace folab {

// Base of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

struct ConvergenceError : Error {
  using Error::Error;
};

struct IntegrationError : Error {
  using Error::Error;
};

}  // namespace folab
