#pragma once

#include <stdexcept>
#include <string>

namespace sssa {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct ZeroAtom : Error {
  using Error::Error;
};

struct InvalidT : Error {
  using Error::Error;
};

struct NotSquare : Error {
  using Error::Error;
};

struct NonFinite : Error {
  using Error::Error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct NegativeThreshold : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

struct ZeroReference : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct TooFewSamples : Error {
  using Error::Error;
};

struct IncompleteGrid : Error {
  using Error::Error;
};

struct InvalidConfig : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace sssa
