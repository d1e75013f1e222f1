#pragma once

#include <optional>
#include <string>
#include <utility>

#include "onebit/sensing.hpp"

namespace onebit {

// Which branch of the norm estimator produced the scaled vector: whether the
// augmented coordinate t0 of the thresholded solution was zero.
enum class Branch { T0_ZERO, T0_NONZERO };

inline const char* branch_name(Branch b) {
  return b == Branch::T0_ZERO ? "T0_ZERO" : "T0_NONZERO";
}

struct EstimateResult {
  Vector direction;     // unit l2 norm, at most k nonzeros
  IndexSet support;     // ascending; equals supp(direction) or a superset of it
  Vector score_vector;  // v = A^T y, kept for diagnostics and verification
  std::optional<Vector> scaled;  // norm-carrying estimate (norm variant) or the
                                 // raw ternary vector (ternary variant)
  std::optional<Branch> branch;  // present iff produced by estimate_with_norm
  std::optional<double> t0;      // augmented coordinate before rescaling
  int k = 0;
  std::string variant;  // "unit" | "nonneg" | "ternary" | "norm"
};

struct ConstraintVariant {
  enum Kind { UnitSparse, NonnegUnitSparse, TernarySparse };
  Kind kind = UnitSparse;
  int k = 1;
};

// One-step estimator: H_k(v) / ||H_k(v)||_2 with v = A^T y, the global
// optimum of max y^T A x over unit k-sparse x.
EstimateResult estimate_direction(const SensingMatrix& A, const MeasurementSet& y, int k);
EstimateResult estimate_direction_from_score(const Vector& v, int k);

// Closed form over nonnegative unit k-sparse vectors: positive part of v on
// its best support; falls back to the basis vector at the largest entry of v
// when v has no positive entry.
EstimateResult estimate_nonneg_direction(const SensingMatrix& A, const MeasurementSet& y, int k);

// Closed form over k-sparse sign vectors: sign(v) on supp(v, k).  The raw
// ternary vector (not unit-normalized) is returned in `scaled`; `direction`
// holds its normalized copy for direction metrics.
EstimateResult estimate_ternary(const SensingMatrix& A, const MeasurementSet& y, int k);

// Norm-aware recovery through the augmented system A' = [A, b/R]: thresholds
// (A')^T y in d+1 dimensions, splits the unit solution as (x0; t0), and
// rescales to a norm-carrying estimate: (R/t0) x0 when t0 != 0, else
// R x0 / ||x0||_2.
EstimateResult estimate_with_norm(const SensingMatrix& A, const MeasurementSet& y, const Vector& b,
                                  double R, int k);
EstimateResult estimate_with_norm_from_score(const Vector& v_aug, double R, int k);

// Exhaustive maximizer of y^T A x over the constraint set; testing oracle for
// the closed forms above.  Guarded to d <= 14 and k <= 4.
std::pair<double, Vector> brute_force_oracle(const SensingMatrix& A, const MeasurementSet& y,
                                             const ConstraintVariant& constraint);

}  // namespace onebit
