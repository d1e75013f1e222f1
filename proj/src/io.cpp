#include "onebit/io.hpp"

#include <fstream>
#include <set>

namespace onebit {

namespace {

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const json& a, const char* what) {
  if (!a.is_array()) throw invalid_parameter_error(std::string(what) + ": expected an array");
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw invalid_parameter_error(std::string(what) + ": expected numbers");
    v[static_cast<int>(i)] = a[i].get<double>();
  }
  return v;
}

json model_to_json(const MeasurementModel& m) {
  json j;
  j["kind"] = model_kind(m);
  if (const auto* fl = std::get_if<SignFlip>(&m)) {
    if (fl->p.size() == 1) {
      j["p"] = fl->p[0];
    } else {
      j["p"] = vector_to_json(fl->p);
    }
  } else if (const auto* dt = std::get_if<Dithered>(&m)) {
    j["R"] = dt->R;
  }
  return j;
}

MeasurementModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw invalid_parameter_error("model: expected an object with a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sign") return NoiselessSign{};
  if (kind == "flip") {
    if (!j.contains("p")) throw invalid_parameter_error("model: flip requires \"p\"");
    const json& p = j.at("p");
    if (p.is_number()) {
      Vector pv(1);
      pv[0] = p.get<double>();
      return SignFlip{pv};
    }
    return SignFlip{vector_from_json(p, "model.p")};
  }
  if (kind == "dither") {
    if (!j.contains("R")) throw invalid_parameter_error("model: dither requires \"R\"");
    return Dithered{j.at("R").get<double>()};
  }
  throw invalid_parameter_error("model: unknown kind: " + kind);
}

void reject_unknown_fields(const json& j, const std::set<std::string>& allowed,
                           const char* where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      throw invalid_parameter_error(std::string(where) + ": unknown field \"" + item.key() + "\"");
  }
}

}  // namespace

json to_json(const SignalFile& sf) {
  json entries = json::array();
  for (int i : sf.signal.support) entries.push_back(sf.signal.vec[i]);
  json j;
  j["d"] = static_cast<int>(sf.signal.vec.size());
  j["s"] = sf.signal.s;
  j["support"] = sf.signal.support;
  j["entries"] = entries;
  if (sf.seed) j["seed"] = *sf.seed;
  return j;
}

SignalFile signal_file_from_json(const json& j) {
  SignalFile out;
  try {
    const int d = j.at("d").get<int>();
    const int s = j.at("s").get<int>();
    const auto support = j.at("support").get<IndexSet>();
    const Vector entries = vector_from_json(j.at("entries"), "signal.entries");
    if (d < 1 || s < 1 || s > d) throw invalid_parameter_error("signal: need 1 <= s <= d");
    if (static_cast<int>(support.size()) != s || entries.size() != s)
      throw invalid_parameter_error("signal: support and entries must both have s elements");
    out.signal.vec = Vector::Zero(d);
    out.signal.s = s;
    out.signal.support = support;
    int prev = -1;
    for (int i = 0; i < s; ++i) {
      const int idx = support[i];
      if (idx <= prev || idx >= d)
        throw invalid_parameter_error("signal: support must be strictly increasing in [0, d)");
      if (entries[i] == 0.0) throw invalid_parameter_error("signal: entries must be nonzero");
      out.signal.vec[idx] = entries[i];
      prev = idx;
    }
    if (j.contains("seed")) out.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw invalid_parameter_error(std::string("signal: malformed JSON: ") + e.what());
  }
  return out;
}

json to_json(const MatrixFile& mf) {
  json j;
  j["n"] = mf.n;
  j["d"] = mf.d;
  j["seed"] = mf.seed;
  if (mf.rows) {
    json rows = json::array();
    for (int i = 0; i < mf.n; ++i) {
      json row = json::array();
      for (int c = 0; c < mf.d; ++c) row.push_back((*mf.rows)(i, c));
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
  }
  return j;
}

MatrixFile matrix_file_from_json(const json& j) {
  MatrixFile out;
  try {
    out.n = j.at("n").get<int>();
    out.d = j.at("d").get<int>();
    out.seed = j.at("seed").get<std::uint64_t>();
    if (out.n < 1 || out.d < 1) throw invalid_parameter_error("matrix: need n, d >= 1");
    if (j.contains("rows")) {
      const json& rows = j.at("rows");
      if (!rows.is_array() || static_cast<int>(rows.size()) != out.n)
        throw invalid_parameter_error("matrix: rows must be an n-element array");
      Eigen::MatrixXd m(out.n, out.d);
      for (int i = 0; i < out.n; ++i) {
        const Vector row = vector_from_json(rows[i], "matrix.rows");
        if (row.size() != out.d) throw invalid_parameter_error("matrix: row length must be d");
        m.row(i) = row;
      }
      out.rows = std::move(m);
    }
  } catch (const json::exception& e) {
    throw invalid_parameter_error(std::string("matrix: malformed JSON: ") + e.what());
  }
  return out;
}

MatrixFile matrix_file_of(const SensingMatrix& A) {
  MatrixFile mf;
  mf.n = A.n;
  mf.d = A.d;
  mf.seed = A.seed;
  if (static_cast<long long>(A.n) * A.d <= kMaxStoredEntries) mf.rows = A.rows;
  return mf;
}

SensingMatrix materialize(const MatrixFile& mf) {
  if (!mf.rows) return gaussian_ensemble(mf.n, mf.d, mf.seed);
  SensingMatrix A;
  A.n = mf.n;
  A.d = mf.d;
  A.seed = mf.seed;
  A.rows = *mf.rows;
  return A;
}

json to_json(const MeasurementSet& m) {
  json j;
  j["n"] = static_cast<int>(m.y.size());
  j["seed"] = m.seed;
  j["model"] = model_to_json(m.model);
  json y = json::array();
  for (int i = 0; i < m.y.size(); ++i) y.push_back(m.y[i]);
  j["y"] = std::move(y);
  if (m.dither) {
    j["dither"] = vector_to_json(*m.dither);
    j["norm_bound_warning"] = m.norm_bound_warning;
  }
  return j;
}

MeasurementSet measurements_from_json(const json& j) {
  MeasurementSet out;
  try {
    const int n = j.at("n").get<int>();
    if (n < 1) throw invalid_parameter_error("measurements: need n >= 1");
    out.seed = j.at("seed").get<std::uint64_t>();
    out.model = model_from_json(j.at("model"));
    validate_model(out.model, n);
    const json& y = j.at("y");
    if (!y.is_array() || static_cast<int>(y.size()) != n)
      throw invalid_parameter_error("measurements: y must be an n-element array");
    out.y.resize(n);
    for (int i = 0; i < n; ++i) {
      const int v = y[i].get<int>();
      if (v != 1 && v != -1)
        throw invalid_parameter_error("measurements: y entries must be +1 or -1");
      out.y[i] = v;
    }
    const bool dith = std::holds_alternative<Dithered>(out.model);
    if (dith != j.contains("dither"))
      throw invalid_parameter_error(
          "measurements: dither values must be present exactly for the dither model");
    if (dith) {
      Vector b = vector_from_json(j.at("dither"), "measurements.dither");
      if (b.size() != n) throw invalid_parameter_error("measurements: dither length must be n");
      out.dither = std::move(b);
      out.norm_bound_warning = j.value("norm_bound_warning", false);
    }
  } catch (const json::exception& e) {
    throw invalid_parameter_error(std::string("measurements: malformed JSON: ") + e.what());
  }
  return out;
}

json estimate_to_json(const EstimateResult& est) {
  json j;
  j["direction"] = vector_to_json(est.direction);
  j["support"] = est.support;
  j["k"] = est.k;
  if (est.scaled) j["scaled"] = vector_to_json(*est.scaled);
  if (est.branch) j["branch"] = branch_name(*est.branch);
  json meta;
  meta["variant"] = est.variant;
  if (est.t0) meta["t0"] = *est.t0;
  meta["score_vector"] = vector_to_json(est.score_vector);
  j["meta"] = std::move(meta);
  return j;
}

ExperimentSpec experiment_spec_from_json(const json& j,
                                         std::optional<std::uint64_t> fallback_master_seed) {
  if (!j.is_object()) throw invalid_parameter_error("spec: expected a JSON object");
  reject_unknown_fields(j,
                        {"d_grid", "n_grid", "s", "k", "k_grid", "model", "trials", "master_seed",
                         "experiment_kind", "output_path"},
                        "spec");
  ExperimentSpec spec;
  try {
    spec.d_grid = j.at("d_grid").get<std::vector<int>>();
    spec.n_grid = j.at("n_grid").get<std::vector<int>>();
    spec.s = j.at("s").get<int>();
    if (j.contains("k") == j.contains("k_grid"))
      throw invalid_parameter_error("spec: exactly one of \"k\" and \"k_grid\" is required");
    if (j.contains("k")) {
      spec.k_grid = {j.at("k").get<int>()};
    } else {
      spec.k_grid = j.at("k_grid").get<std::vector<int>>();
    }
    const json& m = j.at("model");
    if (!m.is_object()) throw invalid_parameter_error("spec: model must be an object");
    reject_unknown_fields(m, {"kind", "p", "R_scale"}, "spec.model");
    spec.model.kind = m.at("kind").get<std::string>();
    if (m.contains("p")) spec.model.p = m.at("p").get<double>();
    if (m.contains("R_scale")) spec.model.R_scale = m.at("R_scale").get<double>();
    if (j.contains("trials")) spec.trials = j.at("trials").get<int>();
    spec.kind = experiment_kind_from(j.at("experiment_kind").get<std::string>());
    if (j.contains("output_path")) spec.output_path = j.at("output_path").get<std::string>();
    if (j.contains("master_seed")) {
      spec.master_seed = j.at("master_seed").get<std::uint64_t>();
    } else if (fallback_master_seed) {
      spec.master_seed = *fallback_master_seed;
    } else {
      throw invalid_parameter_error("spec: master_seed is required (or set ONEBIT_SEED)");
    }
  } catch (const json::exception& e) {
    throw invalid_parameter_error(std::string("spec: malformed JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw invalid_parameter_error("cannot open file: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw invalid_parameter_error("failed to parse " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("cannot open output file: " + path);
  f << j.dump(2) << "\n";
  if (!f) throw error("failed to write: " + path);
}

}  // namespace onebit
