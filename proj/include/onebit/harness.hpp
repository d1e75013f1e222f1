#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "onebit/estimators.hpp"
#include "onebit/theory.hpp"

namespace onebit {

enum class ExperimentKind { SparseApprox, SupportRecovery, NormEstimation, Misspecification };

std::string experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from(const std::string& name);

// Measurement model as configured in an experiment file.  For "dither" the
// radius is specified relative to each trial's raw signal norm
// (R = R_scale * ||x_bar||_2), since the signal changes per trial.
struct ExperimentModel {
  std::string kind = "sign";  // "sign" | "flip" | "dither"
  double p = 0.0;             // flip probability (broadcast)
  double R_scale = 2.0;       // dither radius in units of ||x_bar||_2
};

struct ExperimentSpec {
  std::vector<int> d_grid;
  std::vector<int> n_grid;
  int s = 0;
  std::vector<int> k_grid;  // single entry unless kind == Misspecification
  ExperimentModel model;
  int trials = 100;
  std::uint64_t master_seed = 0;
  ExperimentKind kind = ExperimentKind::SparseApprox;
  std::string output_path;

  void validate() const;
};

struct TrialResult {
  int d = 0, n = 0, s = 0, k = 0, trial_index = 0;
  double l2_error = 0.0;
  int support_symdiff = 0;
  std::optional<double> norm_abs_error;
  std::optional<double> norm_rel_error;
  std::optional<Branch> branch;
  double elapsed = 0.0;  // wall seconds; informational only, not serialized
};

struct Stats {
  double mean = 0.0, median = 0.0, stddev = 0.0;
};

Stats summarize(const std::vector<double>& values);

struct AggregateResult {
  int d = 0, n = 0, s = 0, k = 0;
  std::string model;
  int count = 0;
  Stats l2_error;
  Stats support_symdiff;
  std::optional<Stats> norm_abs_error;
  std::optional<Stats> norm_rel_error;
};

struct GridResult {
  std::vector<TrialResult> trials;  // successful trials, in grid order
  std::vector<AggregateResult> aggregates;
  std::vector<std::string> failures;  // per-cell error messages, in grid order
};

// Per-trial seed: grid cells are independent and individually re-runnable.
// The sparsity budget k is deliberately not part of the derivation, so
// misspecification runs see the same signal and measurements across k.
std::uint64_t derive_trial_seed(std::uint64_t master_seed, int d, int n, int trial_index);

// Support uniform over size-s subsets; nonzero entries i.i.d. uniform on
// [-1000, 1000], excluding (-min_magnitude, min_magnitude) by rejection when
// a minimum is requested (entries exactly zero are rejected always).
SparseSignal generate_signal(int d, int s, std::uint64_t seed,
                             std::optional<double> min_magnitude = {});

// All nonzero entries have the same magnitude with independent random signs;
// this maximizes the minimum normalized entry at fixed s, the most favorable
// signal shape for exact support recovery.
SparseSignal generate_equal_magnitude_signal(int d, int s, std::uint64_t seed,
                                             double magnitude = 1000.0);

TrialResult run_trial(const ExperimentSpec& spec, int d, int n, int k, int trial_index);

// Runs every grid cell, writes the trial CSV to spec.output_path and the
// aggregate CSV next to it, and returns both tables.  Deterministic for a
// given spec regardless of the thread count.
GridResult run_grid_full(const ExperimentSpec& spec, int threads = 1);
std::vector<AggregateResult> run_grid(const ExperimentSpec& spec, int threads = 1);

std::string aggregate_path_for(const std::string& trials_path);

struct MetricBundle {
  double l2_error = 0.0;
  int support_symdiff = 0;
  std::optional<double> norm_abs_error;
  std::optional<double> norm_rel_error;
};

// Errors of an estimate against the generating signal.  For Misspecification
// the comparison target is z = H_k(x_bar)/||H_k(x_bar)||_2 and the support
// target is supp(H_k(x_bar)); otherwise the unit-normalized x_bar itself.
MetricBundle metrics(const EstimateResult& est, const SparseSignal& truth, ExperimentKind kind);

struct MeanIdentityReport {
  double linf = 0.0;
  double tolerance = 0.0;
  double lambda = 0.0;
  int d = 0, n = 0;
  bool pass = false;
};

// Checks the mean identity (1/n) sum_i a_i y_i  ~=  lambda * x_bar in the
// l-infinity norm on a generated unit signal.  Under the dithered model the
// check runs on the augmented (d+1)-dimensional system where the identity
// again holds with lambda = sqrt(2/pi).
MeanIdentityReport verify_mean_identity(const MeasurementModel& model, int d, int n,
                                        std::uint64_t seed, double tolerance);

struct ConcentrationReport {
  std::vector<double> Z;  // one normalized deviation per repetition
  double max_Z = 0.0;
  double p95_Z = 0.0;
  int d = 0, n = 0, repetitions = 0;
  std::optional<double> c_emp;  // reference constant, when supplied
  std::optional<bool> pass;     // max_Z <= c_emp
};

// Distribution of Z = ||(1/n) A^T y - lambda x_bar||_inf * sqrt(n / ln d)
// across repetitions; Z is bounded by a constant independent of d, which is
// the property the calibration runs rely on.  Signals are s-sparse with
// s = 10.
ConcentrationReport verify_concentration(const MeasurementModel& model, int d, int n,
                                         int repetitions, std::uint64_t seed,
                                         std::optional<double> c_emp = {});

}  // namespace onebit
