#pragma once

#include <stdexcept>

namespace doobmax {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A measure value is nonpositive, NaN or infinite.
struct InvalidMeasureError : Error {
  using Error::Error;
};

// A requested structure exceeds the fixed memory budget.
struct CapacityError : Error {
  using Error::Error;
};

// Level partitions do not nest, or a node is empty.
struct RefinementError : Error {
  using Error::Error;
};

// A serialized document is malformed.
struct DocumentError : Error {
  using Error::Error;
};

// A function or mask does not match the space it is used with.
struct ShapeError : Error {
  using Error::Error;
};

// A level index is outside {0, ..., depth}.
struct LevelRangeError : Error {
  using Error::Error;
};

// A numeric parameter is outside its admissible range (p <= 1, a <= 1, ...).
struct ParameterError : Error {
  using Error::Error;
};

}  // namespace doobmax
