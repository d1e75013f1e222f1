#pragma once

#include <stdexcept>
#include <string>

namespace onebit {

// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An argument violates a documented precondition (bad range, dimension
// mismatch, enumeration guard).
struct invalid_parameter_error : error {
  using error::error;
};

// An input vector is degenerate for the requested operation, e.g. normalizing
// the zero vector.
struct degenerate_input_error : error {
  using error::error;
};

// The score vector v = A^T y has an all-zero top-k block, so the program
// maximum carries no direction information.
struct degenerate_score_error : error {
  using error::error;
};

// A model parameter breaks one of the standing model assumptions, e.g. a flip
// probability that drives the correlation parameter to zero or below.
struct assumption_violation_error : error {
  using error::error;
};

}  // namespace onebit
