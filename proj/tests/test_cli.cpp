#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "onebit/estimators.hpp"
#include "onebit/harness.hpp"
#include "onebit/io.hpp"

using namespace onebit;
using nlohmann::json;
using testutil::exact_eq;

namespace {

namespace fs = std::filesystem;

const std::string kCli = ONEBIT_CLI_PATH;

fs::path work_dir() {
  const fs::path p = fs::temp_directory_path() / "onebit_cli_test";
  fs::create_directories(p);
  return p;
}

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CmdResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const fs::path out_path = work_dir() / "stdout.tmp";
  const fs::path err_path = work_dir() / "stderr.tmp";
  std::string cmd = env_prefix.empty() ? "" : env_prefix + " ";
  cmd += "\"" + kCli + "\" " + args + " > \"" + out_path.string() + "\" 2> \"" +
         err_path.string() + "\"";
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary);
  f << body;
}

}  // namespace

TEST_CASE("help exits cleanly everywhere") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("recover --help").exit_code == 0);
  CHECK(run_cli("verify concentration --help").exit_code == 0);
}

TEST_CASE("argument errors exit 2 without touching the data stream") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("gen-signal --bogus 3").exit_code == 2);
  const CmdResult missing = run_cli("gen-signal --d 5");
  CHECK(missing.exit_code == 2);
  CHECK(missing.out.empty());
  CHECK(!missing.err.empty());
  CHECK(run_cli("recover --matrix nope.json --measurements nope.json --k 0 -o x.json")
            .exit_code == 2);
}

TEST_CASE("recover solves the worked instance from files") {
  const fs::path dir = work_dir();
  write_file(dir / "m.json", R"({"n":2,"d":3,"seed":0,"rows":[[1,0,2],[0,3,-1]]})");
  write_file(dir / "y.json", R"({"n":2,"seed":0,"model":{"kind":"sign"},"y":[1,-1]})");
  const fs::path est_path = dir / "est.json";
  const CmdResult r = run_cli("recover --matrix \"" + (dir / "m.json").string() +
                              "\" --measurements \"" + (dir / "y.json").string() +
                              "\" --k 2 -o \"" + est_path.string() + "\"");
  REQUIRE(r.exit_code == 0);
  const json est = json::parse(slurp(est_path));
  CHECK(est.at("direction")[0].get<double>() == 0.0);
  CHECK(est.at("direction")[1].get<double>() == doctest::Approx(-0.7071067811865476));
  CHECK(est.at("direction")[2].get<double>() == doctest::Approx(0.7071067811865476));
  CHECK(est.at("support") == json::array({1, 2}));
  CHECK(est.at("k") == 2);
  CHECK(est.at("meta").at("variant") == "unit");
  CHECK(est.at("meta").at("score_vector") == json::array({1.0, -3.0, 3.0}));
}

TEST_CASE("file pipeline reproduces the in-process pipeline exactly") {
  const fs::path dir = work_dir();
  const std::string sig = (dir / "sig.json").string();
  const std::string mat = (dir / "mat.json").string();
  const std::string meas = (dir / "meas.json").string();
  const std::string est = (dir / "est.json").string();

  REQUIRE(run_cli("gen-signal --d 40 --s 4 --seed 7 -o \"" + sig + "\"").exit_code == 0);
  REQUIRE(run_cli("gen-matrix --n 120 --d 40 --seed 3 -o \"" + mat + "\"").exit_code == 0);

  const SensingMatrix A = gaussian_ensemble(120, 40, 3);
  const SparseSignal x = generate_signal(40, 4, 7);

  SUBCASE("noiseless sign model") {
    REQUIRE(run_cli("sense --matrix \"" + mat + "\" --signal \"" + sig +
                    "\" --model sign -o \"" + meas + "\"")
                .exit_code == 0);
    REQUIRE(run_cli("recover --matrix \"" + mat + "\" --measurements \"" + meas +
                    "\" --k 4 -o \"" + est + "\"")
                .exit_code == 0);
    const EstimateResult ref = estimate_direction(A, sign_measure(A, x.vec), 4);
    const json j = json::parse(slurp(est));
    REQUIRE(j.at("direction").size() == 40);
    for (int i = 0; i < 40; ++i) {
      CHECK(j.at("direction")[i].get<double>() == ref.direction[i]);
    }
    CHECK(j.at("support").get<IndexSet>() == ref.support);
  }
  SUBCASE("flip model carries its seed through the file") {
    REQUIRE(run_cli("sense --matrix \"" + mat + "\" --signal \"" + sig +
                    "\" --model flip --p 0.25 --seed 5 -o \"" + meas + "\"")
                .exit_code == 0);
    REQUIRE(run_cli("recover --matrix \"" + mat + "\" --measurements \"" + meas +
                    "\" --k 4 -o \"" + est + "\"")
                .exit_code == 0);
    const EstimateResult ref = estimate_direction(A, flip_noise_measure(A, x.vec, 0.25, 5), 4);
    const json j = json::parse(slurp(est));
    for (int i = 0; i < 40; ++i) {
      CHECK(j.at("direction")[i].get<double>() == ref.direction[i]);
    }
  }
  SUBCASE("dithered model and norm recovery") {
    REQUIRE(run_cli("sense --matrix \"" + mat + "\" --signal \"" + sig +
                    "\" --model dither --R 5000 --seed 5 -o \"" + meas + "\"")
                .exit_code == 0);
    REQUIRE(run_cli("recover --matrix \"" + mat + "\" --measurements \"" + meas +
                    "\" --k 4 --variant norm -o \"" + est + "\"")
                .exit_code == 0);
    const MeasurementSet ms = dithered_measure(A, x.vec, 5000.0, 5);
    const EstimateResult ref = estimate_with_norm(A, ms, *ms.dither, 5000.0, 4);
    const json j = json::parse(slurp(est));
    REQUIRE(j.contains("scaled"));
    for (int i = 0; i < 40; ++i) {
      CHECK(j.at("scaled")[i].get<double>() == (*ref.scaled)[i]);
    }
    CHECK(j.at("branch").get<std::string>() == branch_name(*ref.branch));
  }
}

TEST_CASE("model and variant mismatches are argument errors") {
  const fs::path dir = work_dir();
  const std::string sig = (dir / "sig2.json").string();
  const std::string mat = (dir / "mat2.json").string();
  const std::string meas = (dir / "meas2.json").string();
  REQUIRE(run_cli("gen-signal --d 20 --s 2 --seed 1 -o \"" + sig + "\"").exit_code == 0);
  REQUIRE(run_cli("gen-matrix --n 30 --d 20 --seed 1 -o \"" + mat + "\"").exit_code == 0);

  CHECK(run_cli("sense --matrix \"" + mat + "\" --signal \"" + sig +
                "\" --model flip --p 0.6 --seed 1 -o \"" + meas + "\"")
            .exit_code == 2);
  CHECK(run_cli("sense --matrix \"" + mat + "\" --signal \"" + sig +
                "\" --model dither --seed 1 -o \"" + meas + "\"")
            .exit_code == 2);
  CHECK(run_cli("gen-signal --d 20 --s 2 --seed 1 --min-magnitude 1000 -o \"" + sig + "\"")
            .exit_code == 2);

  REQUIRE(run_cli("sense --matrix \"" + mat + "\" --signal \"" + sig +
                  "\" --model sign -o \"" + meas + "\"")
              .exit_code == 0);
  const fs::path est_path = dir / "est2.json";
  const CmdResult norm_on_sign =
      run_cli("recover --matrix \"" + mat + "\" --measurements \"" + meas +
              "\" --k 2 --variant norm -o \"" + est_path.string() + "\"");
  CHECK(norm_on_sign.exit_code == 2);
  CHECK(norm_on_sign.out.empty());
  CHECK(!fs::exists(est_path));
}

TEST_CASE("verify oracle matches enumeration from the command line") {
  const CmdResult r = run_cli("verify oracle --instances 50 --seed 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("oracle") != std::string::npos);
}

TEST_CASE("experiment runs are byte-identical and reject unknown fields") {
  const fs::path dir = work_dir();
  const fs::path csv = dir / "exp.csv";
  json spec;
  spec["d_grid"] = {30};
  spec["n_grid"] = {100, 200};
  spec["s"] = 3;
  spec["k"] = 3;
  spec["model"] = {{"kind", "sign"}};
  spec["trials"] = 4;
  spec["master_seed"] = 9;
  spec["experiment_kind"] = "sparse_approx";
  spec["output_path"] = csv.string();
  write_file(dir / "spec.json", spec.dump(2));

  REQUIRE(run_cli("experiment --spec \"" + (dir / "spec.json").string() + "\"").exit_code == 0);
  const std::string first = slurp(csv);
  const std::string first_agg = slurp(aggregate_path_for(csv.string()));
  CHECK(first.find("30,100,3,3,sign,0,") != std::string::npos);

  REQUIRE(run_cli("experiment --spec \"" + (dir / "spec.json").string() + "\" --threads 3")
              .exit_code == 0);
  CHECK(slurp(csv) == first);
  CHECK(slurp(aggregate_path_for(csv.string())) == first_agg);

  json bad = spec;
  bad["plot_style"] = "solid";
  write_file(dir / "bad.json", bad.dump(2));
  const CmdResult rb = run_cli("experiment --spec \"" + (dir / "bad.json").string() + "\"");
  CHECK(rb.exit_code == 2);
  CHECK(rb.err.find("plot_style") != std::string::npos);

  json noseed = spec;
  noseed.erase("master_seed");
  write_file(dir / "noseed.json", noseed.dump(2));
  CHECK(run_cli("experiment --spec \"" + (dir / "noseed.json").string() + "\"", "ONEBIT_SEED=")
            .exit_code == 2);
  // the environment variable stands in for the missing field
  REQUIRE(run_cli("experiment --spec \"" + (dir / "noseed.json").string() + "\"",
                  "ONEBIT_SEED=9")
              .exit_code == 0);
  CHECK(slurp(csv) == first);
}

TEST_CASE("ONEBIT_SEED supplies the default seed for generation") {
  const fs::path dir = work_dir();
  const std::string a = (dir / "env_a.json").string();
  const std::string b = (dir / "env_b.json").string();
  REQUIRE(run_cli("gen-signal --d 30 --s 3 -o \"" + a + "\"", "ONEBIT_SEED=42").exit_code == 0);
  REQUIRE(run_cli("gen-signal --d 30 --s 3 --seed 42 -o \"" + b + "\"").exit_code == 0);
  CHECK(slurp(a) == slurp(b));

  const CmdResult noseed = run_cli("gen-signal --d 30 --s 3 -o \"" + a + "\"", "ONEBIT_SEED=");
  CHECK(noseed.exit_code == 2);
}

TEST_CASE("verify mean and bounds subcommands") {
  const CmdResult mean =
      run_cli("verify mean --model flip --p 0.25 --d 20 --n 50000 --seed 1 --tol 0.05");
  CHECK(mean.exit_code == 0);
  CHECK(mean.out.find("PASS") != std::string::npos);

  const CmdResult fail = run_cli("verify mean --model sign --d 20 --n 10 --seed 1 --tol 0.001");
  CHECK(fail.exit_code == 1);
  CHECK(fail.out.find("FAIL") != std::string::npos);

  const CmdResult bounds =
      run_cli("verify bounds --k 10 --d 1000 --n 4000 --x-min 0.31 --model sign");
  CHECK(bounds.exit_code == 0);
  CHECK(bounds.out.find("bound=") != std::string::npos);
  CHECK(bounds.out.find("support condition") != std::string::npos);
}
