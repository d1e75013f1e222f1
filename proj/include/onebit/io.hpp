#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "onebit/estimators.hpp"
#include "onebit/harness.hpp"

namespace onebit {

using json = nlohmann::json;

// All writers emit values that parse back bit-exactly: doubles are printed in
// shortest round-trip form, so write(read(f)) == f byte for byte.

struct SignalFile {
  SparseSignal signal;
  std::optional<std::uint64_t> seed;  // present when the signal was generated
};

json to_json(const SignalFile& sf);
SignalFile signal_file_from_json(const json& j);

// Matrices above kMaxStoredEntries entries are stored as provenance only
// (n, d, seed); materialize() regenerates them entry-exactly from the seed.
struct MatrixFile {
  int n = 0, d = 0;
  std::uint64_t seed = 0;
  std::optional<Eigen::MatrixXd> rows;
};

inline constexpr long long kMaxStoredEntries = 10'000'000;

json to_json(const MatrixFile& mf);
MatrixFile matrix_file_from_json(const json& j);
MatrixFile matrix_file_of(const SensingMatrix& A);
SensingMatrix materialize(const MatrixFile& mf);

json to_json(const MeasurementSet& m);
MeasurementSet measurements_from_json(const json& j);

json estimate_to_json(const EstimateResult& est);

// Strict parse: any unknown field, at top level or inside "model", is an
// error.  "master_seed" may be omitted when a fallback (e.g. from the
// environment) is supplied.
ExperimentSpec experiment_spec_from_json(const json& j,
                                         std::optional<std::uint64_t> fallback_master_seed = {});

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace onebit
