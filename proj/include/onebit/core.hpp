#pragma once

#include <Eigen/Dense>
#include <vector>

#include "onebit/errors.hpp"

namespace onebit {

using Vector = Eigen::VectorXd;

// Strictly increasing indices in [0, d).
using IndexSet = std::vector<int>;

// s-sparse target signal with explicit support bookkeeping.
struct SparseSignal {
  Vector vec;
  int s = 0;
  IndexSet support;  // ascending positions of the nonzero entries of vec

  // Smallest magnitude over the support of the unit-normalized signal; this
  // is the quantity the support-recovery condition compares against.
  double min_magnitude() const;

  // vec / ||vec||_2
  Vector unit() const;

  static SparseSignal from_vector(const Vector& v);
};

// Indices of the k largest-magnitude entries, ties broken toward the smaller
// index.  When z has fewer than k nonzeros the set is padded with the
// lowest-index zero entries so that |result| = k always holds.  Returned
// sorted ascending.
IndexSet top_k_support(const Vector& z, int k);

// Euclidean projection onto k-sparse vectors: z on top_k_support(z, k), zero
// elsewhere.
Vector hard_threshold(const Vector& z, int k);

// z / ||z||_2; the zero vector is rejected rather than silently mapped to an
// arbitrary unit vector.
Vector normalize(const Vector& z);

// sqrt(2k): bound on sup ||z||_1 / ||z||_2 over 2k-sparse vectors, the
// restricted induced norm of differences of k-sparse unit vectors.
double rho_sparse_bound(int k);

}  // namespace onebit
