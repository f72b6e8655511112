#pragma once

#include <stdexcept>
#include <string>

namespace aqualoc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Timestamps went backwards (or did not advance) where monotone time is required.
class OrderingError : public Error {
 public:
  using Error::Error;
};

// IMU gap too large to integrate in one step; the caller must re-anchor.
class GapError : public Error {
 public:
  using Error::Error;
};

class InitError : public Error {
 public:
  using Error::Error;
};

// Latitude outside the Mercator domain.
class GeoDomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Input is structurally valid but unusable (empty, no overlap, out of bounds).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqualoc
