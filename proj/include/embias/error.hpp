#pragma once

#include <stdexcept>
#include <string>

namespace embias {

// Base of every error the library raises. The subclasses map onto the CLI
// exit-code taxonomy: ParseError -> 1, ResolutionError/DegenerateError -> 2,
// UsageError -> 64.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files, I/O failures and data validation failures.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Words that cannot be found in an embedding, or sets that shrink below the
// minimum size after resolution.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Statistics whose denominator vanishes (zero variance, zero deviation).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Caller mistakes: unknown ids, out-of-range options.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace embias
