#include "onebit/sensing.hpp"

#include <algorithm>
#include <cmath>

#include "onebit/rng.hpp"

namespace onebit {

std::string model_kind(const MeasurementModel& m) {
  if (std::holds_alternative<NoiselessSign>(m)) return "sign";
  if (std::holds_alternative<SignFlip>(m)) return "flip";
  return "dither";
}

void validate_model(const MeasurementModel& m, int n) {
  if (const auto* f = std::get_if<SignFlip>(&m)) {
    if (f->p.size() != 1 && f->p.size() != n)
      throw invalid_parameter_error("SignFlip: p must be scalar or length n");
    for (int i = 0; i < f->p.size(); ++i) {
      if (!(f->p[i] >= 0.0 && f->p[i] < 0.5))
        throw invalid_parameter_error("SignFlip: every p_i must lie in [0, 0.5)");
    }
  } else if (const auto* dt = std::get_if<Dithered>(&m)) {
    if (!(dt->R > 0.0)) throw invalid_parameter_error("Dithered: R must be positive");
  }
}

SensingMatrix gaussian_ensemble(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw invalid_parameter_error("gaussian_ensemble: need n, d >= 1");
  SensingMatrix A;
  A.n = n;
  A.d = d;
  A.seed = seed;
  A.rows.resize(n, d);
  Philox gen(seed, stream::kMatrix);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t base = static_cast<std::uint64_t>(i) * d;
    for (int j = 0; j < d; ++j) A.rows(i, j) = gen.normal_at(base + j);
  }
  return A;
}

Vector linear_measure(const SensingMatrix& A, const Vector& x) {
  if (x.size() != A.d) throw invalid_parameter_error("linear_measure: dimension mismatch");
  return A.rows * x;
}

MeasurementSet sign_measure(const SensingMatrix& A, const Vector& x) {
  const Vector u = linear_measure(A, x);
  MeasurementSet out;
  out.model = NoiselessSign{};
  out.seed = A.seed;
  out.y.resize(A.n);
  for (int i = 0; i < A.n; ++i) out.y[i] = sign_pm(u[i]);
  return out;
}

MeasurementSet flip_noise_measure(const SensingMatrix& A, const Vector& x, const Vector& p,
                                  std::uint64_t seed) {
  MeasurementModel model = SignFlip{p};
  validate_model(model, A.n);
  const Vector u = linear_measure(A, x);
  MeasurementSet out;
  out.model = std::move(model);
  out.seed = seed;
  out.y.resize(A.n);
  Philox gen(seed, stream::kFlip);
  const bool scalar = (p.size() == 1);
  for (int i = 0; i < A.n; ++i) {
    const double pi = scalar ? p[0] : p[i];
    const int flip = (gen.uniform_at(i) < pi) ? -1 : 1;
    out.y[i] = flip * sign_pm(u[i]);
  }
  return out;
}

MeasurementSet flip_noise_measure(const SensingMatrix& A, const Vector& x, double p,
                                  std::uint64_t seed) {
  Vector pv(1);
  pv[0] = p;
  return flip_noise_measure(A, x, pv, seed);
}

MeasurementSet dithered_measure(const SensingMatrix& A, const Vector& x, double R,
                                std::uint64_t seed) {
  MeasurementModel model = Dithered{R};
  validate_model(model, A.n);
  const Vector u = linear_measure(A, x);
  MeasurementSet out;
  out.model = std::move(model);
  out.seed = seed;
  out.norm_bound_warning = (x.norm() > R);
  out.y.resize(A.n);
  Vector b(A.n);
  Philox gen(seed, stream::kDither);
  for (int i = 0; i < A.n; ++i) {
    b[i] = R * gen.normal_at(i);
    out.y[i] = sign_pm(u[i] + b[i]);
  }
  out.dither = std::move(b);
  return out;
}

SensingMatrix augment(const SensingMatrix& A, const Vector& b, double R) {
  if (b.size() != A.n) throw invalid_parameter_error("augment: dither length mismatch");
  if (!(R > 0.0)) throw invalid_parameter_error("augment: R must be positive");
  SensingMatrix out;
  out.n = A.n;
  out.d = A.d + 1;
  out.seed = A.seed;
  out.rows.resize(A.n, A.d + 1);
  out.rows.leftCols(A.d) = A.rows;
  out.rows.col(A.d) = b / R;
  return out;
}

int stream_block_rows(int d) {
  // ~32 MiB of row buffer; fixed as a function of d alone so that the
  // blockwise accumulation order (and hence the score bit pattern) never
  // depends on threading or caller context.
  const int rows = (1 << 22) / std::max(d, 1);
  return std::max(rows, 1);
}

SenseScore sense_and_score(int n, int d, std::uint64_t matrix_seed, const Vector& x,
                           const MeasurementModel& model, std::uint64_t noise_seed) {
  if (n < 1 || d < 1) throw invalid_parameter_error("sense_and_score: need n, d >= 1");
  if (x.size() != d) throw invalid_parameter_error("sense_and_score: dimension mismatch");
  validate_model(model, n);

  const bool dithered = std::holds_alternative<Dithered>(model);
  const auto* flip = std::get_if<SignFlip>(&model);
  const double R = dithered ? std::get<Dithered>(model).R : 0.0;

  SenseScore out;
  out.y.resize(n);
  out.score = Vector::Zero(dithered ? d + 1 : d);
  Philox mgen(matrix_seed, stream::kMatrix);
  Philox ngen(noise_seed, dithered ? stream::kDither : stream::kFlip);
  Vector b;
  if (dithered) {
    b.resize(n);
    out.norm_bound_warning = (x.norm() > R);
  }

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const int block = stream_block_rows(d);
  RowMajor buf(block, d);
  Vector yblk(block);
  for (int r0 = 0; r0 < n; r0 += block) {
    const int m = std::min(block, n - r0);
    for (int i = 0; i < m; ++i) {
      const std::uint64_t base = static_cast<std::uint64_t>(r0 + i) * d;
      for (int j = 0; j < d; ++j) buf(i, j) = mgen.normal_at(base + j);
    }
    const Vector u = buf.topRows(m) * x;
    for (int i = 0; i < m; ++i) {
      double ui = u[i];
      int yi;
      if (dithered) {
        const double bi = R * ngen.normal_at(r0 + i);
        b[r0 + i] = bi;
        yi = sign_pm(ui + bi);
      } else if (flip) {
        const double pi = (flip->p.size() == 1) ? flip->p[0] : flip->p[r0 + i];
        const int f = (ngen.uniform_at(r0 + i) < pi) ? -1 : 1;
        yi = f * sign_pm(ui);
      } else {
        yi = sign_pm(ui);
      }
      out.y[r0 + i] = yi;
      yblk[i] = static_cast<double>(yi);
    }
    out.score.head(d) += buf.topRows(m).transpose() * yblk.head(m);
    if (dithered) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += yblk[i] * b[r0 + i];
      out.score[d] += acc / R;
    }
  }
  if (dithered) out.dither = std::move(b);
  return out;
}

}  // namespace onebit
