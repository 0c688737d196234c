#pragma once

#include <stdexcept>
#include <string>

namespace rcw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured search or enumeration cap would be exceeded.
class BoundExceeded : public Error {
 public:
  using Error::Error;
};

/// Arguments refer to different or oversized domains.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Text input (cycle notation, subsets, files) could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace rcw
