#include "onebit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace onebit {

namespace {

Vector score_of(const SensingMatrix& A, const MeasurementSet& y) {
  if (y.y.size() != A.n) throw invalid_parameter_error("estimator: y length mismatch");
  return A.rows.transpose() * y.y.cast<double>();
}

}  // namespace

EstimateResult estimate_direction_from_score(const Vector& v, int k) {
  const Vector h = hard_threshold(v, k);
  if (h.norm() == 0.0)
    throw degenerate_score_error("estimate_direction: top-k of the score is all zero");
  EstimateResult out;
  out.direction = h / h.norm();
  out.support = top_k_support(v, k);
  out.score_vector = v;
  out.k = k;
  out.variant = "unit";
  return out;
}

EstimateResult estimate_direction(const SensingMatrix& A, const MeasurementSet& y, int k) {
  return estimate_direction_from_score(score_of(A, y), k);
}

EstimateResult estimate_nonneg_direction(const SensingMatrix& A, const MeasurementSet& y, int k) {
  const Vector v = score_of(A, y);
  const int d = static_cast<int>(v.size());
  if (k < 1 || k > d) throw invalid_parameter_error("estimate_nonneg_direction: need 1 <= k <= d");

  std::vector<int> pos;
  for (int i = 0; i < d; ++i) {
    if (v[i] > 0.0) pos.push_back(i);
  }
  if (static_cast<int>(pos.size()) > k) {
    // keep the k largest positive entries, smaller index on ties
    std::nth_element(pos.begin(), pos.begin() + (k - 1), pos.end(), [&v](int a, int b) {
      if (v[a] != v[b]) return v[a] > v[b];
      return a < b;
    });
    pos.resize(k);
    std::sort(pos.begin(), pos.end());
  }

  EstimateResult out;
  out.score_vector = v;
  out.k = k;
  out.variant = "nonneg";
  if (pos.empty()) {
    // m = 0: the optimum is the basis vector at the largest entry of v.
    int best = 0;
    for (int i = 1; i < d; ++i) {
      if (v[i] > v[best]) best = i;
    }
    out.direction = Vector::Zero(d);
    out.direction[best] = 1.0;
    out.support = {best};
    return out;
  }
  Vector vs = Vector::Zero(d);
  for (int i : pos) vs[i] = v[i];
  out.direction = vs / vs.norm();
  out.support = pos;
  return out;
}

EstimateResult estimate_ternary(const SensingMatrix& A, const MeasurementSet& y, int k) {
  const Vector v = score_of(A, y);
  const IndexSet S = top_k_support(v, k);
  Vector tern = Vector::Zero(v.size());
  for (int i : S) {
    if (v[i] > 0.0)
      tern[i] = 1.0;
    else if (v[i] < 0.0)
      tern[i] = -1.0;
  }
  if (tern.norm() == 0.0)
    throw degenerate_score_error("estimate_ternary: top-k of the score is all zero");
  EstimateResult out;
  out.direction = tern / tern.norm();
  out.support = S;
  out.score_vector = v;
  out.scaled = tern;
  out.k = k;
  out.variant = "ternary";
  return out;
}

EstimateResult estimate_with_norm_from_score(const Vector& v_aug, double R, int k) {
  if (k < 2) throw invalid_parameter_error("estimate_with_norm: need k >= 2");
  if (!(R > 0.0)) throw invalid_parameter_error("estimate_with_norm: R must be positive");
  const int d = static_cast<int>(v_aug.size()) - 1;
  if (d < 1) throw invalid_parameter_error("estimate_with_norm: augmented score too short");
  const Vector h = hard_threshold(v_aug, k);
  if (h.norm() == 0.0)
    throw degenerate_score_error("estimate_with_norm: top-k of the score is all zero");
  const Vector xp = h / h.norm();
  const Vector x0 = xp.head(d);
  const double t0 = xp[d];
  if (x0.norm() == 0.0)
    throw degenerate_score_error("estimate_with_norm: all score mass on the dither coordinate");

  EstimateResult out;
  out.direction = x0 / x0.norm();
  out.score_vector = v_aug;
  out.t0 = t0;
  out.k = k;
  out.variant = "norm";
  if (t0 != 0.0) {
    out.scaled = (R / t0) * x0;
    out.branch = Branch::T0_NONZERO;
  } else {
    out.scaled = R * out.direction;
    out.branch = Branch::T0_ZERO;
  }
  // support of the d-dimensional direction: the augmented top-k set without
  // the dither coordinate
  for (int i : top_k_support(v_aug, k)) {
    if (i < d) out.support.push_back(i);
  }
  return out;
}

EstimateResult estimate_with_norm(const SensingMatrix& A, const MeasurementSet& y, const Vector& b,
                                  double R, int k) {
  const SensingMatrix Ap = augment(A, b, R);
  return estimate_with_norm_from_score(score_of(Ap, y), R, k);
}

std::pair<double, Vector> brute_force_oracle(const SensingMatrix& A, const MeasurementSet& y,
                                             const ConstraintVariant& constraint) {
  const Vector v = score_of(A, y);
  const int d = static_cast<int>(v.size());
  const int k = constraint.k;
  if (d > 14 || k > 4 || k < 1)
    throw invalid_parameter_error("brute_force_oracle: enumeration guard (d <= 14, k <= 4)");

  double best_value = -std::numeric_limits<double>::infinity();
  Vector best_x = Vector::Zero(d);
  auto consider = [&](double value, const Vector& x) {
    if (value > best_value) {
      best_value = value;
      best_x = x;
    }
  };

  // enumerate supports of size 1..k in lexicographic order
  std::vector<int> comb;
  auto for_each_support = [&](auto&& visit) {
    for (int sz = 1; sz <= k; ++sz) {
      comb.assign(sz, 0);
      std::iota(comb.begin(), comb.end(), 0);
      for (;;) {
        visit(comb);
        int i = sz - 1;
        while (i >= 0 && comb[i] == d - sz + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < sz; ++j) comb[j] = comb[j - 1] + 1;
      }
    }
  };

  switch (constraint.kind) {
    case ConstraintVariant::UnitSparse: {
      for_each_support([&](const std::vector<int>& S) {
        double nrm2 = 0.0;
        for (int i : S) nrm2 += v[i] * v[i];
        const double nrm = std::sqrt(nrm2);
        if (nrm == 0.0) return;
        Vector x = Vector::Zero(d);
        for (int i : S) x[i] = v[i] / nrm;
        consider(nrm, x);
      });
      if (!(best_value > -std::numeric_limits<double>::infinity()))
        throw degenerate_score_error("brute_force_oracle: score is identically zero");
      break;
    }
    case ConstraintVariant::NonnegUnitSparse: {
      // basis vectors are always feasible and cover the no-positive-entry case
      for (int i = 0; i < d; ++i) {
        Vector x = Vector::Zero(d);
        x[i] = 1.0;
        consider(v[i], x);
      }
      for_each_support([&](const std::vector<int>& S) {
        double nrm2 = 0.0;
        for (int i : S) {
          if (v[i] > 0.0) nrm2 += v[i] * v[i];
        }
        const double nrm = std::sqrt(nrm2);
        if (nrm == 0.0) return;
        Vector x = Vector::Zero(d);
        for (int i : S) {
          if (v[i] > 0.0) x[i] = v[i] / nrm;
        }
        consider(nrm, x);
      });
      break;
    }
    case ConstraintVariant::TernarySparse: {
      consider(0.0, Vector::Zero(d));  // empty support
      for_each_support([&](const std::vector<int>& S) {
        const int sz = static_cast<int>(S.size());
        for (int mask = 0; mask < (1 << sz); ++mask) {
          double value = 0.0;
          Vector x = Vector::Zero(d);
          for (int j = 0; j < sz; ++j) {
            const double sgn = (mask >> j) & 1 ? -1.0 : 1.0;
            x[S[j]] = sgn;
            value += sgn * v[S[j]];
          }
          consider(value, x);
        }
      });
      break;
    }
  }
  return {best_value, best_x};
}

}  // namespace onebit
