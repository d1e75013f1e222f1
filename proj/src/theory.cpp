#include "onebit/theory.hpp"

#include <algorithm>
#include <cmath>

#include "onebit/rng.hpp"

namespace onebit {

ResponseModel ResponseModel::from(const MeasurementModel& m) {
  ResponseModel out;
  if (const auto* f = std::get_if<SignFlip>(&m)) {
    out.kind = Flip;
    out.p = f->mean_p();
  } else {
    out.kind = Sign;  // noiseless, and dithered via the augmented equivalence
  }
  return out;
}

ModelTheory lambda_closed_form(const MeasurementModel& model) {
  ModelTheory out;
  out.model = model;
  if (const auto* f = std::get_if<SignFlip>(&model)) {
    for (int i = 0; i < f->p.size(); ++i) {
      if (f->p[i] >= 0.5)
        throw assumption_violation_error("lambda_closed_form: p >= 0.5 gives lambda <= 0");
      if (f->p[i] < 0.0) throw invalid_parameter_error("lambda_closed_form: negative p");
    }
    out.lambda = lambda_sign() * (1.0 - 2.0 * f->mean_p());
    if (f->p.size() > 1) {
      Vector per(f->p.size());
      for (int i = 0; i < f->p.size(); ++i) per[i] = lambda_sign() * (1.0 - 2.0 * f->p[i]);
      out.per_measurement_lambda = std::move(per);
    }
  } else {
    out.lambda = lambda_sign();
  }
  return out;
}

double lambda_monte_carlo(const ResponseModel& theta, long samples, std::uint64_t seed) {
  if (samples < 1000) throw invalid_parameter_error("lambda_monte_carlo: need samples >= 1e3");
  if (theta.kind == ResponseModel::Zero) return 0.0;
  Philox g(seed, stream::kMonteCarloG);
  Philox u(seed, stream::kMonteCarloU);
  double acc = 0.0;
  for (long i = 0; i < samples; ++i) {
    const double gi = g.next_normal();
    double resp = static_cast<double>(sign_pm(gi));
    if (theta.kind == ResponseModel::Flip && u.next_uniform() < theta.p) resp = -resp;
    acc += gi * resp;
  }
  return acc / static_cast<double>(samples);
}

BoundReport error_bound(double lambda, int k, double d, int n, double C) {
  if (!(lambda > 0.0)) throw assumption_violation_error("error_bound: lambda must be positive");
  if (k < 1 || n < 1 || !(d >= 2.0) || !(C > 0.0))
    throw invalid_parameter_error("error_bound: need k >= 1, n >= 1, d >= 2, C > 0");
  BoundReport out;
  out.lambda = lambda;
  out.k = k;
  out.d = d;
  out.n = n;
  out.C = C;
  out.bound = (C / lambda) * std::sqrt(static_cast<double>(k) * std::log(d) / n);
  return out;
}

BoundReport support_condition(double x_min, double lambda, int k, double d, int n, double C) {
  if (!(x_min > 0.0)) throw invalid_parameter_error("support_condition: need x_min > 0");
  BoundReport out = error_bound(lambda, k, d, n, C);
  out.satisfied_condition = (x_min > out.bound);
  return out;
}

MisspecTail misspec_tail(const SparseSignal& x_bar, int k) {
  if (k < 1) throw invalid_parameter_error("misspec_tail: need k >= 1");
  if (x_bar.vec.size() < 1 || x_bar.vec.norm() == 0.0)
    throw degenerate_input_error("misspec_tail: zero signal");
  const Vector u = x_bar.unit();
  const int d = static_cast<int>(u.size());
  if (k > d) throw invalid_parameter_error("misspec_tail: k exceeds dimension");
  const Vector h = hard_threshold(u, k);
  const double alpha = h.norm();
  if (alpha == 0.0) throw degenerate_input_error("misspec_tail: H_k of the signal is zero");

  std::vector<double> mags(d);
  for (int i = 0; i < d; ++i) mags[i] = std::fabs(u[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());

  MisspecTail out;
  const double dropped = (k < d) ? mags[k] : 0.0;
  if (dropped == 0.0) {
    // at most k nonzeros: H_k keeps the whole signal, so z = x_bar and the
    // tail vanishes identically
    out.z = u;
    return out;
  }
  out.z = h / alpha;
  const double kept = (1.0 / alpha - 1.0) * mags[0];
  out.inf_term = std::max(kept, dropped);
  out.full_term = rho_sparse_bound(k) * out.inf_term;
  return out;
}

}  // namespace onebit
