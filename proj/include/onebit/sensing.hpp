#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "onebit/core.hpp"

namespace onebit {

struct NoiselessSign {};

// Independent sign flips; p holds either one broadcast probability or one
// probability per measurement, each in [0, 0.5).
struct SignFlip {
  Vector p;
  double mean_p() const { return p.mean(); }
};

// Known Gaussian dither b_i ~ N(0, R^2) added before quantization.
struct Dithered {
  double R = 0.0;
};

using MeasurementModel = std::variant<NoiselessSign, SignFlip, Dithered>;

std::string model_kind(const MeasurementModel& m);  // "sign" | "flip" | "dither"
void validate_model(const MeasurementModel& m, int n);

// n x d matrix of i.i.d. standard normal rows.  Entry (i, j) is the
// deterministic function normal(seed, stream::kMatrix, i*d + j) of the seed,
// so any row block can be regenerated independently of the rest.
struct SensingMatrix {
  int n = 0, d = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd rows;

  double entry(int i, int j) const { return rows(i, j); }
};

struct MeasurementSet {
  Eigen::VectorXi y;  // entries in {-1, +1}
  MeasurementModel model;
  std::optional<Vector> dither;  // the b_i, present iff the model is Dithered
  std::uint64_t seed = 0;
  bool norm_bound_warning = false;  // ||x||_2 > R was observed under Dithered
};

// sign with sign(0) = +1, so measurement generation is total.
inline int sign_pm(double t) { return (t < 0.0) ? -1 : 1; }

SensingMatrix gaussian_ensemble(int n, int d, std::uint64_t seed);

Vector linear_measure(const SensingMatrix& A, const Vector& x);

MeasurementSet sign_measure(const SensingMatrix& A, const Vector& x);

MeasurementSet flip_noise_measure(const SensingMatrix& A, const Vector& x, const Vector& p,
                                  std::uint64_t seed);
MeasurementSet flip_noise_measure(const SensingMatrix& A, const Vector& x, double p,
                                  std::uint64_t seed);

MeasurementSet dithered_measure(const SensingMatrix& A, const Vector& x, double R,
                                std::uint64_t seed);

// n x (d+1) matrix with rows (a_i^T, b_i / R); under the dithered model the
// appended column is again standard normal.
SensingMatrix augment(const SensingMatrix& A, const Vector& b, double R);

// One-pass streaming measurement and scoring for seed-defined ensembles: the
// matrix is generated in fixed row blocks (stream_block_rows(d) rows each,
// independent of thread count), producing y and the score v = A^T y without
// ever holding all of A.  Draws coincide entrywise with
// gaussian_ensemble(n, d, matrix_seed).  Under Dithered the score carries the
// augmented coordinate v[d] = sum_i y_i b_i / R.
struct SenseScore {
  Eigen::VectorXi y;
  Vector score;
  std::optional<Vector> dither;
  bool norm_bound_warning = false;
};

SenseScore sense_and_score(int n, int d, std::uint64_t matrix_seed, const Vector& x,
                           const MeasurementModel& model, std::uint64_t noise_seed);

int stream_block_rows(int d);

}  // namespace onebit
