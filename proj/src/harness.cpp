#include "onebit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <thread>

#include "onebit/rng.hpp"

namespace onebit {

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

IndexSet nonzero_support(const Vector& v) {
  IndexSet s;
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) s.push_back(i);
  }
  return s;
}

int symdiff_size(const IndexSet& a, const IndexSet& b) {
  std::vector<int> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return static_cast<int>(out.size());
}

MeasurementModel model_for_trial(const ExperimentModel& em, const SparseSignal& sig) {
  if (em.kind == "sign") return NoiselessSign{};
  if (em.kind == "flip") {
    Vector pv(1);
    pv[0] = em.p;
    return SignFlip{pv};
  }
  if (em.kind == "dither") return Dithered{em.R_scale * sig.vec.norm()};
  throw invalid_parameter_error("experiment model kind must be sign, flip or dither");
}

double percentile95(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto r = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(r, 1) - 1];
}

}  // namespace

std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SparseApprox: return "sparse_approx";
    case ExperimentKind::SupportRecovery: return "support_recovery";
    case ExperimentKind::NormEstimation: return "norm_estimation";
    case ExperimentKind::Misspecification: return "misspecification";
  }
  throw invalid_parameter_error("unknown experiment kind");
}

ExperimentKind experiment_kind_from(const std::string& name) {
  if (name == "sparse_approx" || name == "SparseApprox") return ExperimentKind::SparseApprox;
  if (name == "support_recovery" || name == "SupportRecovery")
    return ExperimentKind::SupportRecovery;
  if (name == "norm_estimation" || name == "NormEstimation") return ExperimentKind::NormEstimation;
  if (name == "misspecification" || name == "Misspecification")
    return ExperimentKind::Misspecification;
  throw invalid_parameter_error("unknown experiment kind: " + name);
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw invalid_parameter_error("spec: trials must be positive");
  if (s < 1) throw invalid_parameter_error("spec: s must be positive");
  if (k_grid.empty()) throw invalid_parameter_error("spec: k is required");
  if (k_grid.size() > 1 && kind != ExperimentKind::Misspecification)
    throw invalid_parameter_error("spec: k_grid is only valid for misspecification experiments");
  for (int n : n_grid) {
    if (n < 1) throw invalid_parameter_error("spec: grid entries must be positive");
  }
  for (int d : d_grid) {
    if (d < 1) throw invalid_parameter_error("spec: grid entries must be positive");
    if (s > d) throw invalid_parameter_error("spec: s exceeds a grid dimension");
    for (int k : k_grid) {
      if (k < 1 || k > d) throw invalid_parameter_error("spec: need 1 <= k <= d on the grid");
    }
  }
  if (model.kind != "sign" && model.kind != "flip" && model.kind != "dither")
    throw invalid_parameter_error("spec: model kind must be sign, flip or dither");
  if (model.kind == "flip" && !(model.p >= 0.0 && model.p < 0.5))
    throw invalid_parameter_error("spec: flip probability must lie in [0, 0.5)");
  if (model.kind == "dither" && !(model.R_scale > 0.0))
    throw invalid_parameter_error("spec: R_scale must be positive");
  const bool wants_norm = (kind == ExperimentKind::NormEstimation);
  if (wants_norm != (model.kind == "dither"))
    throw invalid_parameter_error(
        "spec: norm_estimation requires the dither model (and only norm_estimation may use it)");
  if (wants_norm) {
    for (int k : k_grid) {
      if (k < 2) throw invalid_parameter_error("spec: norm estimation needs k >= 2");
    }
  }
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, int d, int n, int trial_index) {
  return derive_seed({master_seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(n),
                      static_cast<std::uint64_t>(trial_index)});
}

SparseSignal generate_signal(int d, int s, std::uint64_t seed,
                             std::optional<double> min_magnitude) {
  if (d < 1 || s < 1 || s > d) throw invalid_parameter_error("generate_signal: need 1 <= s <= d");
  const double mm = min_magnitude.value_or(0.0);
  if (mm < 0.0 || mm >= 1000.0)
    throw invalid_parameter_error("generate_signal: min_magnitude must lie in [0, 1000)");

  // Floyd's sampler: uniform over size-s subsets of [0, d).
  Philox sup(seed, stream::kSupport);
  std::set<int> chosen;
  for (int j = d - s; j < d; ++j) {
    const int t = static_cast<int>(sup.next_below(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }

  SparseSignal out;
  out.s = s;
  out.support.assign(chosen.begin(), chosen.end());
  out.vec = Vector::Zero(d);
  Philox amp(seed, stream::kAmplitude);
  for (int i : out.support) {
    double e;
    do {
      e = -1000.0 + 2000.0 * amp.next_uniform();
    } while (e == 0.0 || std::fabs(e) < mm);
    out.vec[i] = e;
  }
  return out;
}

SparseSignal generate_equal_magnitude_signal(int d, int s, std::uint64_t seed, double magnitude) {
  if (d < 1 || s < 1 || s > d)
    throw invalid_parameter_error("generate_equal_magnitude_signal: need 1 <= s <= d");
  if (!(magnitude > 0.0))
    throw invalid_parameter_error("generate_equal_magnitude_signal: magnitude must be positive");
  SparseSignal out = generate_signal(d, s, seed);
  Philox amp(seed, stream::kAmplitude);
  for (int i : out.support) {
    out.vec[i] = (amp.next_uniform() < 0.5) ? -magnitude : magnitude;
  }
  return out;
}

MetricBundle metrics(const EstimateResult& est, const SparseSignal& truth, ExperimentKind kind) {
  if (est.direction.size() != truth.vec.size())
    throw invalid_parameter_error("metrics: dimension mismatch");
  Vector target;
  IndexSet target_support;
  if (kind == ExperimentKind::Misspecification) {
    const MisspecTail mt = misspec_tail(truth, est.k);
    target = mt.z;
    target_support = nonzero_support(mt.z);
  } else {
    target = truth.unit();
    target_support = truth.support;
  }
  MetricBundle out;
  out.l2_error = (est.direction - target).norm();
  out.support_symdiff = symdiff_size(nonzero_support(est.direction), target_support);
  if (est.variant == "norm" && est.scaled) {
    const double tn = truth.vec.norm();
    out.norm_abs_error = std::fabs(est.scaled->norm() - tn);
    out.norm_rel_error = *out.norm_abs_error / tn;
  }
  return out;
}

TrialResult run_trial(const ExperimentSpec& spec, int d, int n, int k, int trial_index) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t tseed = derive_trial_seed(spec.master_seed, d, n, trial_index);
  const SparseSignal sig = (spec.kind == ExperimentKind::SupportRecovery)
                               ? generate_equal_magnitude_signal(d, spec.s, tseed)
                               : generate_signal(d, spec.s, tseed);
  const MeasurementModel model = model_for_trial(spec.model, sig);
  const SenseScore ss = sense_and_score(n, d, tseed, sig.vec, model, tseed);

  EstimateResult est;
  try {
    est = (spec.kind == ExperimentKind::NormEstimation)
              ? estimate_with_norm_from_score(ss.score, std::get<Dithered>(model).R, k)
              : estimate_direction_from_score(ss.score, k);
  } catch (const error& e) {
    throw error("trial (d=" + std::to_string(d) + ", n=" + std::to_string(n) +
                ", k=" + std::to_string(k) + ", trial=" + std::to_string(trial_index) +
                "): " + e.what());
  }
  const MetricBundle m = metrics(est, sig, spec.kind);

  TrialResult out;
  out.d = d;
  out.n = n;
  out.s = spec.s;
  out.k = k;
  out.trial_index = trial_index;
  out.l2_error = m.l2_error;
  out.support_symdiff = m.support_symdiff;
  out.norm_abs_error = m.norm_abs_error;
  out.norm_rel_error = m.norm_rel_error;
  out.branch = est.branch;
  out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

Stats summarize(const std::vector<double>& values) {
  Stats st;
  const std::size_t n = values.size();
  if (n == 0) return st;
  double sum = 0.0;
  for (double v : values) sum += v;
  st.mean = sum / static_cast<double>(n);
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  st.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return st;
}

std::string aggregate_path_for(const std::string& trials_path) {
  const std::string suffix = ".csv";
  if (trials_path.size() >= suffix.size() &&
      trials_path.compare(trials_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return trials_path.substr(0, trials_path.size() - suffix.size()) + ".aggregate.csv";
  }
  return trials_path + ".aggregate.csv";
}

namespace {

const char* kTrialHeader =
    "d,n,s,k,model,trial,l2_error,support_symdiff,norm_abs_error,norm_rel_error,branch,elapsed_s";

void write_trials_csv(const ExperimentSpec& spec, const std::vector<TrialResult>& trials) {
  std::ofstream f(spec.output_path, std::ios::binary);
  if (!f) throw error("cannot open output file: " + spec.output_path);
  f << kTrialHeader << "\n";
  for (const TrialResult& t : trials) {
    f << t.d << ',' << t.n << ',' << t.s << ',' << t.k << ',' << spec.model.kind << ','
      << t.trial_index << ',' << fmt9(t.l2_error) << ',' << t.support_symdiff << ','
      << (t.norm_abs_error ? fmt9(*t.norm_abs_error) : "") << ','
      << (t.norm_rel_error ? fmt9(*t.norm_rel_error) : "") << ','
      << (t.branch ? branch_name(*t.branch) : "")
      // elapsed_s is reserved: a constant zero keeps reruns byte-identical
      << ",0\n";
  }
}

void write_aggregate_csv(const ExperimentSpec& spec, const std::vector<AggregateResult>& aggs) {
  const std::string path = aggregate_path_for(spec.output_path);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("cannot open output file: " + path);
  f << "d,n,s,k,model,trials,l2_error_mean,l2_error_median,l2_error_std,"
       "support_symdiff_mean,support_symdiff_median,support_symdiff_std,"
       "norm_abs_error_mean,norm_abs_error_median,norm_abs_error_std,"
       "norm_rel_error_mean,norm_rel_error_median,norm_rel_error_std\n";
  auto stats_cols = [&f](const std::optional<Stats>& st) {
    if (st) {
      f << ',' << fmt9(st->mean) << ',' << fmt9(st->median) << ',' << fmt9(st->stddev);
    } else {
      f << ",,,";
    }
  };
  for (const AggregateResult& a : aggs) {
    f << a.d << ',' << a.n << ',' << a.s << ',' << a.k << ',' << a.model << ',' << a.count;
    stats_cols(a.l2_error);
    stats_cols(a.support_symdiff);
    stats_cols(a.norm_abs_error);
    stats_cols(a.norm_rel_error);
    f << "\n";
  }
}

}  // namespace

GridResult run_grid_full(const ExperimentSpec& spec, int threads) {
  spec.validate();
  struct Cell {
    int d, n, k, trial;
  };
  std::vector<Cell> cells;
  for (int d : spec.d_grid)
    for (int n : spec.n_grid)
      for (int k : spec.k_grid)
        for (int t = 0; t < spec.trials; ++t) cells.push_back({d, n, k, t});

  GridResult out;
  std::vector<TrialResult> slots(cells.size());
  std::vector<std::string> slot_errors(cells.size());
  auto run_cell = [&](std::size_t i) {
    const Cell& c = cells[i];
    try {
      slots[i] = run_trial(spec, c.d, c.n, c.k, c.trial);
    } catch (const std::exception& e) {
      // a failed cell is recorded and skipped; the rest of the grid completes
      slot_errors[i] = e.what();
    }
  };
  threads = std::max(1, threads);
  if (threads == 1 || cells.size() < 2) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    // Trials are independent; results land in index-addressed slots, so the
    // output is identical for every thread count.
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        run_cell(i);
      }
    };
    std::vector<std::thread> pool;
    const int nt = std::min<int>(threads, static_cast<int>(cells.size()));
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  out.trials.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (slot_errors[i].empty())
      out.trials.push_back(std::move(slots[i]));
    else
      out.failures.push_back(std::move(slot_errors[i]));
  }

  // aggregate per grid cell; cells are contiguous in trial order
  for (std::size_t i = 0; i < out.trials.size();) {
    std::size_t j = i;
    while (j < out.trials.size() && out.trials[j].d == out.trials[i].d &&
           out.trials[j].n == out.trials[i].n && out.trials[j].k == out.trials[i].k)
      ++j;
    AggregateResult a;
    a.d = out.trials[i].d;
    a.n = out.trials[i].n;
    a.s = spec.s;
    a.k = out.trials[i].k;
    a.model = spec.model.kind;
    a.count = static_cast<int>(j - i);
    std::vector<double> l2, sd, na, nr;
    for (std::size_t t = i; t < j; ++t) {
      l2.push_back(out.trials[t].l2_error);
      sd.push_back(static_cast<double>(out.trials[t].support_symdiff));
      if (out.trials[t].norm_abs_error) na.push_back(*out.trials[t].norm_abs_error);
      if (out.trials[t].norm_rel_error) nr.push_back(*out.trials[t].norm_rel_error);
    }
    a.l2_error = summarize(l2);
    a.support_symdiff = summarize(sd);
    if (!na.empty()) a.norm_abs_error = summarize(na);
    if (!nr.empty()) a.norm_rel_error = summarize(nr);
    out.aggregates.push_back(std::move(a));
    i = j;
  }

  if (!spec.output_path.empty()) {
    write_trials_csv(spec, out.trials);
    write_aggregate_csv(spec, out.aggregates);
  }
  return out;
}

std::vector<AggregateResult> run_grid(const ExperimentSpec& spec, int threads) {
  return run_grid_full(spec, threads).aggregates;
}

MeanIdentityReport verify_mean_identity(const MeasurementModel& model, int d, int n,
                                        std::uint64_t seed, double tolerance) {
  if (d < 1 || n < 1) throw invalid_parameter_error("verify_mean_identity: need d, n >= 1");
  validate_model(model, n);
  const Vector xbar = generate_signal(d, d, seed).unit();
  const ModelTheory th = lambda_closed_form(model);
  const SenseScore ss = sense_and_score(n, d, seed, xbar, model, seed);
  const Vector mean = ss.score / static_cast<double>(n);

  Vector target;
  if (const auto* dt = std::get_if<Dithered>(&model)) {
    Vector xa(d + 1);
    xa.head(d) = xbar;
    xa[d] = dt->R;
    target = th.lambda * (xa / xa.norm());
  } else {
    target = th.lambda * xbar;
  }

  MeanIdentityReport out;
  out.d = d;
  out.n = n;
  out.lambda = th.lambda;
  out.tolerance = tolerance;
  out.linf = (mean - target).cwiseAbs().maxCoeff();
  out.pass = (out.linf <= tolerance);
  return out;
}

ConcentrationReport verify_concentration(const MeasurementModel& model, int d, int n,
                                         int repetitions, std::uint64_t seed,
                                         std::optional<double> c_emp) {
  if (repetitions < 30)
    throw invalid_parameter_error("verify_concentration: need repetitions >= 30");
  if (d < 2 || n < 1) throw invalid_parameter_error("verify_concentration: need d >= 2, n >= 1");
  validate_model(model, n);
  const ModelTheory th = lambda_closed_form(model);
  const int s = std::min(10, d);
  const bool dith = std::holds_alternative<Dithered>(model);

  ConcentrationReport out;
  out.d = d;
  out.n = n;
  out.repetitions = repetitions;
  out.c_emp = c_emp;
  out.Z.reserve(repetitions);
  for (int r = 0; r < repetitions; ++r) {
    const std::uint64_t rseed = derive_seed({seed, static_cast<std::uint64_t>(r)});
    const Vector xbar = generate_signal(d, s, rseed).unit();
    const SenseScore ss = sense_and_score(n, d, rseed, xbar, model, rseed);
    Vector target;
    double dim = static_cast<double>(d);
    if (dith) {
      const double R = std::get<Dithered>(model).R;
      Vector xa(d + 1);
      xa.head(d) = xbar;
      xa[d] = R;
      target = th.lambda * (xa / xa.norm());
      dim = static_cast<double>(d + 1);
    } else {
      target = th.lambda * xbar;
    }
    const double linf = (ss.score / static_cast<double>(n) - target).cwiseAbs().maxCoeff();
    out.Z.push_back(linf * std::sqrt(static_cast<double>(n) / std::log(dim)));
  }
  out.max_Z = *std::max_element(out.Z.begin(), out.Z.end());
  out.p95_Z = percentile95(out.Z);
  if (c_emp) out.pass = (out.max_Z <= *c_emp);
  return out;
}

}  // namespace onebit
