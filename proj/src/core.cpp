#include "onebit/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace onebit {

double SparseSignal::min_magnitude() const {
  if (support.empty()) throw degenerate_input_error("min_magnitude: empty support");
  const double nrm = vec.norm();
  if (nrm == 0.0) throw degenerate_input_error("min_magnitude: zero signal");
  double m = std::numeric_limits<double>::infinity();
  for (int i : support) m = std::min(m, std::fabs(vec[i]) / nrm);
  return m;
}

Vector SparseSignal::unit() const { return normalize(vec); }

SparseSignal SparseSignal::from_vector(const Vector& v) {
  SparseSignal out;
  out.vec = v;
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) out.support.push_back(i);
  }
  out.s = static_cast<int>(out.support.size());
  if (out.s == 0) throw degenerate_input_error("from_vector: zero vector has no support");
  return out;
}

IndexSet top_k_support(const Vector& z, int k) {
  const int d = static_cast<int>(z.size());
  if (k < 1 || k > d) throw invalid_parameter_error("top_k_support: need 1 <= k <= d");
  if (!z.allFinite()) throw invalid_parameter_error("top_k_support: non-finite entry");
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  auto before = [&z](int a, int b) {
    const double ma = std::fabs(z[a]), mb = std::fabs(z[b]);
    if (ma != mb) return ma > mb;
    return a < b;  // lexicographic tie-break
  };
  std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), before);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector hard_threshold(const Vector& z, int k) {
  const IndexSet keep = top_k_support(z, k);
  Vector out = Vector::Zero(z.size());
  for (int i : keep) out[i] = z[i];
  return out;
}

Vector normalize(const Vector& z) {
  if (!z.allFinite()) throw invalid_parameter_error("normalize: non-finite entry");
  const double nrm = z.norm();
  if (nrm == 0.0) throw degenerate_input_error("normalize: zero vector");
  return z / nrm;
}

double rho_sparse_bound(int k) {
  if (k < 1) throw invalid_parameter_error("rho_sparse_bound: need k >= 1");
  return std::sqrt(2.0 * static_cast<double>(k));
}

}  // namespace onebit
