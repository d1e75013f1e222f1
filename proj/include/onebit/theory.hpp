#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "onebit/sensing.hpp"

namespace onebit {

// Average correlation lambda = E[g * theta(g)] between a standard normal
// argument and the quantizer response; sqrt(2/pi) for the pure sign model.
inline double lambda_sign() { return std::sqrt(2.0 / M_PI); }

struct ModelTheory {
  double lambda = 0.0;
  std::optional<Vector> per_measurement_lambda;  // lambda_i when heterogeneous
  MeasurementModel model;
};

struct BoundReport {
  double bound = 0.0;
  // constituents, kept so the bound is recomputable from the report
  double lambda = 0.0;
  int k = 0;
  double d = 0.0;
  int n = 0;
  double C = 1.0;
  std::optional<bool> satisfied_condition;
};

// Quantizer description for Monte Carlo estimation of lambda.
struct ResponseModel {
  enum Kind { Sign, Flip, Zero };
  Kind kind = Sign;
  double p = 0.0;  // flip probability (mean p for heterogeneous models)

  static ResponseModel from(const MeasurementModel& m);
};

// Closed-form lambda: sqrt(2/pi) for the noiseless sign model, scaled by
// (1 - 2 p_i) under sign flips, and sqrt(2/pi) for the dithered model (whose
// augmented (d+1)-dimensional system is again a noiseless sign model).
ModelTheory lambda_closed_form(const MeasurementModel& model);

// Sample mean of g * theta(g) over `samples` i.i.d. standard normal g.
double lambda_monte_carlo(const ResponseModel& theta, long samples, std::uint64_t seed);

// (C / lambda) * sqrt(k * ln(d) / n); ln is the natural logarithm, with the
// base change absorbed into C.  d is real-valued so the closed form itself is
// directly testable.
BoundReport error_bound(double lambda, int k, double d, int n, double C = 1.0);

// Exact support recovery condition: x_min > error_bound(...) (strict).
BoundReport support_condition(double x_min, double lambda, int k, double d, int n, double C = 1.0);

// Misspecification tail for running the estimator with budget k below the
// true sparsity: the target becomes z = H_k(xbar) / ||H_k(xbar)||_2 and
//   ||z - xbar||_inf = max{ (1/alpha - 1) |xbar|_(1), |xbar|_(k+1) },
// where xbar is first normalized to unit l2-norm, alpha = ||H_k(xbar)||_2 of
// the normalized signal, and |xbar|_(j) is the j-th largest magnitude.
struct MisspecTail {
  double inf_term = 0.0;
  double full_term = 0.0;  // sqrt(2k) * inf_term
  Vector z;
};

MisspecTail misspec_tail(const SparseSignal& x_bar, int k);

}  // namespace onebit
