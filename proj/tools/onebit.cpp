#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "onebit/io.hpp"
#include "onebit/rng.hpp"

namespace {

using namespace onebit;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ONEBIT_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw invalid_parameter_error(std::string("ONEBIT_SEED is not an integer: ") + env);
    return static_cast<std::uint64_t>(v);
  }
  throw invalid_parameter_error("no --seed given and ONEBIT_SEED is unset");
}

MeasurementModel model_from_flags(const std::string& kind, const std::optional<double>& p,
                                  const std::optional<double>& R) {
  if (kind == "sign") return NoiselessSign{};
  if (kind == "flip") {
    Vector pv(1);
    pv[0] = p.value_or(0.0);
    return SignFlip{pv};
  }
  if (kind == "dither") {
    if (!R) throw invalid_parameter_error("--model dither requires --R");
    return Dithered{*R};
  }
  throw invalid_parameter_error("--model must be sign, flip or dither");
}

int run_verify_oracle(int instances, std::uint64_t seed) {
  int checked = 0, failed = 0;
  for (int inst = 0; inst < instances; ++inst) {
    const std::uint64_t iseed = derive_seed({seed, static_cast<std::uint64_t>(inst)});
    Philox pick(iseed, 8);
    for (const auto variant :
         {ConstraintVariant::UnitSparse, ConstraintVariant::NonnegUnitSparse,
          ConstraintVariant::TernarySparse}) {
      const int dmax = (variant == ConstraintVariant::TernarySparse) ? 8 : 10;
      const int d = 3 + static_cast<int>(pick.next_below(dmax - 2));
      const int n = 2 + static_cast<int>(pick.next_below(19));
      const int k = 1 + static_cast<int>(pick.next_below(3));
      const SensingMatrix A = gaussian_ensemble(n, d, derive_seed({iseed, 1}));
      MeasurementSet ms;
      ms.model = NoiselessSign{};
      ms.y.resize(n);
      for (int i = 0; i < n; ++i) ms.y[i] = pick.next_uniform() < 0.5 ? -1 : 1;

      EstimateResult est;
      switch (variant) {
        case ConstraintVariant::UnitSparse: est = estimate_direction(A, ms, k); break;
        case ConstraintVariant::NonnegUnitSparse: est = estimate_nonneg_direction(A, ms, k); break;
        case ConstraintVariant::TernarySparse: est = estimate_ternary(A, ms, k); break;
      }
      const auto [best, xbest] = brute_force_oracle(A, ms, ConstraintVariant{variant, k});
      const Vector& xhat =
          (variant == ConstraintVariant::TernarySparse) ? *est.scaled : est.direction;
      const double got = est.score_vector.dot(xhat);
      ++checked;
      if (std::fabs(got - best) > 1e-12 * std::max(1.0, std::fabs(best))) {
        ++failed;
        std::cerr << "oracle mismatch: instance " << inst << " variant " << int(variant)
                  << " closed-form objective " << got << " vs enumerated " << best << "\n";
      }
    }
  }
  std::cout << "oracle check: " << checked << " instances, " << failed << " mismatches\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit compressed sensing toolkit"};
  app.require_subcommand(1);

  // gen-signal
  auto* gs = app.add_subcommand("gen-signal", "Generate a sparse signal");
  int gs_d = 0, gs_s = 0;
  std::optional<std::uint64_t> gs_seed;
  std::optional<double> gs_min_mag;
  std::string gs_out;
  gs->add_option("--d", gs_d, "ambient dimension")->required();
  gs->add_option("--s", gs_s, "sparsity (number of nonzeros)")->required();
  gs->add_option("--seed", gs_seed, "generator seed (default: ONEBIT_SEED)");
  gs->add_option("--min-magnitude", gs_min_mag, "smallest allowed |entry|, in [0, 1000)");
  gs->add_option("-o,--output", gs_out, "output JSON file")->required();

  // gen-matrix
  auto* gm = app.add_subcommand("gen-matrix", "Generate a Gaussian sensing matrix");
  int gm_n = 0, gm_d = 0;
  std::optional<std::uint64_t> gm_seed;
  std::string gm_out;
  gm->add_option("--n", gm_n, "number of rows (measurements)")->required();
  gm->add_option("--d", gm_d, "number of columns")->required();
  gm->add_option("--seed", gm_seed, "generator seed (default: ONEBIT_SEED)");
  gm->add_option("-o,--output", gm_out, "output JSON file")->required();

  // sense
  auto* sn = app.add_subcommand("sense", "Take 1-bit measurements of a signal");
  std::string sn_matrix, sn_signal, sn_model = "sign", sn_out;
  std::optional<double> sn_p, sn_R;
  std::optional<std::uint64_t> sn_seed;
  sn->add_option("--matrix", sn_matrix, "matrix JSON file")->required();
  sn->add_option("--signal", sn_signal, "signal JSON file")->required();
  sn->add_option("--model", sn_model, "sign | flip | dither")
      ->check(CLI::IsMember({"sign", "flip", "dither"}));
  sn->add_option("--p", sn_p, "flip probability in [0, 0.5)");
  sn->add_option("--R", sn_R, "dither standard deviation");
  sn->add_option("--seed", sn_seed, "noise seed (default: ONEBIT_SEED)");
  sn->add_option("-o,--output", sn_out, "output JSON file")->required();

  // recover
  auto* rc = app.add_subcommand("recover", "Recover a signal estimate from measurements");
  std::string rc_matrix, rc_meas, rc_variant = "unit", rc_out;
  int rc_k = 0;
  std::optional<double> rc_R;
  rc->add_option("--matrix", rc_matrix, "matrix JSON file")->required();
  rc->add_option("--measurements", rc_meas, "measurements JSON file")->required();
  rc->add_option("--k", rc_k, "sparsity budget")->required();
  rc->add_option("--variant", rc_variant, "unit | nonneg | ternary | norm")
      ->check(CLI::IsMember({"unit", "nonneg", "ternary", "norm"}));
  rc->add_option("--R", rc_R, "dither scale override for --variant norm");
  rc->add_option("-o,--output", rc_out, "output JSON file")->required();

  // experiment
  auto* ex = app.add_subcommand("experiment", "Run an experiment grid from a spec file");
  std::string ex_spec;
  int ex_threads = 1;
  ex->add_option("--spec", ex_spec, "experiment spec JSON file")->required();
  ex->add_option("--threads", ex_threads, "parallel worker cap")->check(CLI::PositiveNumber);

  // verify
  auto* vf = app.add_subcommand("verify", "Statistical and combinatorial self-checks");
  vf->require_subcommand(1);

  auto* vm = vf->add_subcommand("mean", "Mean identity of the score against lambda * signal");
  std::string vm_model = "sign";
  std::optional<double> vm_p, vm_R;
  int vm_d = 20, vm_n = 200000;
  double vm_tol = 0.03;
  std::optional<std::uint64_t> vm_seed;
  vm->add_option("--model", vm_model, "sign | flip | dither")
      ->check(CLI::IsMember({"sign", "flip", "dither"}));
  vm->add_option("--p", vm_p, "flip probability");
  vm->add_option("--R", vm_R, "dither standard deviation");
  vm->add_option("--d", vm_d, "dimension");
  vm->add_option("--n", vm_n, "measurements");
  vm->add_option("--tol", vm_tol, "l-infinity tolerance");
  vm->add_option("--seed", vm_seed, "seed (default: ONEBIT_SEED)");

  auto* vc = vf->add_subcommand("concentration", "Normalized score deviation across repetitions");
  std::string vc_model = "sign";
  std::optional<double> vc_p, vc_R, vc_cemp;
  int vc_d = 500, vc_n = 5000, vc_reps = 100;
  std::optional<std::uint64_t> vc_seed;
  vc->add_option("--model", vc_model, "sign | flip | dither")
      ->check(CLI::IsMember({"sign", "flip", "dither"}));
  vc->add_option("--p", vc_p, "flip probability");
  vc->add_option("--R", vc_R, "dither standard deviation");
  vc->add_option("--d", vc_d, "dimension");
  vc->add_option("--n", vc_n, "measurements");
  vc->add_option("--reps", vc_reps, "repetitions (>= 30)");
  vc->add_option("--c-emp", vc_cemp, "pass threshold for max Z");
  vc->add_option("--seed", vc_seed, "seed (default: ONEBIT_SEED)");

  auto* vb = vf->add_subcommand("bounds", "Evaluate the error bound and support condition");
  std::string vb_model = "sign";
  std::optional<double> vb_p, vb_xmin;
  int vb_k = 0, vb_n = 0;
  double vb_d = 0.0, vb_C = 1.0;
  vb->add_option("--model", vb_model, "sign | flip")->check(CLI::IsMember({"sign", "flip"}));
  vb->add_option("--p", vb_p, "flip probability");
  vb->add_option("--k", vb_k, "sparsity budget")->required();
  vb->add_option("--d", vb_d, "dimension")->required();
  vb->add_option("--n", vb_n, "measurements")->required();
  vb->add_option("--C", vb_C, "bound constant");
  vb->add_option("--x-min", vb_xmin, "smallest normalized magnitude, for the support condition");

  auto* vo = vf->add_subcommand("oracle", "Closed-form estimators against brute-force search");
  int vo_instances = 200;
  std::optional<std::uint64_t> vo_seed;
  vo->add_option("--instances", vo_instances, "random instances per variant")
      ->check(CLI::PositiveNumber);
  vo->add_option("--seed", vo_seed, "seed (default: ONEBIT_SEED)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_code = app.exit(e);
    return rc_code == 0 ? 0 : 2;
  }

  try {
    if (*gs) {
      const std::uint64_t seed = resolve_seed(gs_seed);
      SignalFile sf{generate_signal(gs_d, gs_s, seed, gs_min_mag), seed};
      write_json_file(gs_out, to_json(sf));
      std::cout << "wrote " << gs_out << "\n";
    } else if (*gm) {
      const std::uint64_t seed = resolve_seed(gm_seed);
      if (gm_n < 1 || gm_d < 1) throw invalid_parameter_error("gen-matrix: need n, d >= 1");
      MatrixFile mf;
      if (static_cast<long long>(gm_n) * gm_d <= kMaxStoredEntries) {
        mf = matrix_file_of(gaussian_ensemble(gm_n, gm_d, seed));
      } else {
        mf = MatrixFile{gm_n, gm_d, seed, std::nullopt};
      }
      write_json_file(gm_out, to_json(mf));
      std::cout << "wrote " << gm_out << (mf.rows ? "" : " (entries regenerated from seed on read)")
                << "\n";
    } else if (*sn) {
      const SensingMatrix A = materialize(matrix_file_from_json(read_json_file(sn_matrix)));
      const SignalFile sf = signal_file_from_json(read_json_file(sn_signal));
      if (static_cast<int>(sf.signal.vec.size()) != A.d)
        throw invalid_parameter_error("sense: signal dimension does not match the matrix");
      MeasurementSet ms;
      if (sn_model == "sign") {
        ms = sign_measure(A, sf.signal.vec);
      } else if (sn_model == "flip") {
        ms = flip_noise_measure(A, sf.signal.vec, sn_p.value_or(0.0), resolve_seed(sn_seed));
      } else {
        if (!sn_R) throw invalid_parameter_error("sense: --model dither requires --R");
        ms = dithered_measure(A, sf.signal.vec, *sn_R, resolve_seed(sn_seed));
        if (ms.norm_bound_warning)
          std::cerr << "warning: signal norm exceeds the dither scale R; "
                       "norm estimates degrade beyond it\n";
      }
      write_json_file(sn_out, to_json(ms));
      std::cout << "wrote " << sn_out << "\n";
    } else if (*rc) {
      const SensingMatrix A = materialize(matrix_file_from_json(read_json_file(rc_matrix)));
      const MeasurementSet ms = measurements_from_json(read_json_file(rc_meas));
      if (static_cast<int>(ms.y.size()) != A.n)
        throw invalid_parameter_error("recover: measurement count does not match the matrix");
      EstimateResult est;
      if (rc_variant == "unit") {
        est = estimate_direction(A, ms, rc_k);
      } else if (rc_variant == "nonneg") {
        est = estimate_nonneg_direction(A, ms, rc_k);
      } else if (rc_variant == "ternary") {
        est = estimate_ternary(A, ms, rc_k);
      } else {
        const auto* dt = std::get_if<Dithered>(&ms.model);
        if (!dt || !ms.dither)
          throw invalid_parameter_error(
              "recover: --variant norm requires measurements taken under the dither model");
        est = estimate_with_norm(A, ms, *ms.dither, rc_R.value_or(dt->R), rc_k);
      }
      write_json_file(rc_out, estimate_to_json(est));
      std::cout << "wrote " << rc_out << "\n";
    } else if (*ex) {
      std::optional<std::uint64_t> fallback;
      if (const char* env = std::getenv("ONEBIT_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
          throw invalid_parameter_error(std::string("ONEBIT_SEED is not an integer: ") + env);
        fallback = static_cast<std::uint64_t>(v);
      }
      ExperimentSpec spec = experiment_spec_from_json(read_json_file(ex_spec), fallback);
      if (spec.output_path.empty())
        throw invalid_parameter_error("spec: output_path is required for the experiment command");
      run_grid_full(spec, ex_threads);
      std::cout << "wrote " << spec.output_path << " and " << aggregate_path_for(spec.output_path)
                << "\n";
    } else if (*vm) {
      const MeasurementModel model = model_from_flags(vm_model, vm_p, vm_R);
      const MeanIdentityReport r =
          verify_mean_identity(model, vm_d, vm_n, resolve_seed(vm_seed), vm_tol);
      std::cout << "mean identity: model=" << vm_model << " d=" << r.d << " n=" << r.n
                << " lambda=" << r.lambda << " linf=" << r.linf << " tol=" << r.tolerance << " -> "
                << (r.pass ? "PASS" : "FAIL") << "\n";
      return r.pass ? 0 : 1;
    } else if (*vc) {
      const MeasurementModel model = model_from_flags(vc_model, vc_p, vc_R);
      const ConcentrationReport r =
          verify_concentration(model, vc_d, vc_n, vc_reps, resolve_seed(vc_seed), vc_cemp);
      std::cout << "concentration: model=" << vc_model << " d=" << r.d << " n=" << r.n << " reps="
                << r.repetitions << " max_Z=" << r.max_Z << " p95_Z=" << r.p95_Z;
      if (r.pass) std::cout << " c_emp=" << *r.c_emp << " -> " << (*r.pass ? "PASS" : "FAIL");
      std::cout << "\n";
      return (!r.pass || *r.pass) ? 0 : 1;
    } else if (*vb) {
      double lambda = lambda_sign();
      if (vb_model == "flip") {
        Vector pv(1);
        pv[0] = vb_p.value_or(0.0);
        lambda = lambda_closed_form(SignFlip{pv}).lambda;
      }
      const BoundReport r = vb_xmin ? support_condition(*vb_xmin, lambda, vb_k, vb_d, vb_n, vb_C)
                                    : error_bound(lambda, vb_k, vb_d, vb_n, vb_C);
      std::cout << "bound: lambda=" << r.lambda << " k=" << r.k << " d=" << r.d << " n=" << r.n
                << " C=" << r.C << " bound=" << r.bound;
      if (r.satisfied_condition)
        std::cout << " x_min=" << *vb_xmin << " support condition "
                  << (*r.satisfied_condition ? "satisfied" : "not satisfied");
      std::cout << "\n";
    } else if (*vo) {
      return run_verify_oracle(vo_instances, resolve_seed(vo_seed));
    }
  } catch (const invalid_parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const assumption_violation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
