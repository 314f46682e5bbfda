#include "doctest.h"
#include "oracles.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "grj/cli/commands.hpp"
#include "grj/error.hpp"

using namespace grj;
using namespace grj::cli;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "grj");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "grj_test_cli";
  fs::create_directories(dir);
  return dir;
}

std::string write_model(const std::string& name, const Json& j) {
  const fs::path file = scratch_dir() / name;
  write_text(file.string(), dump(j));
  return file.string();
}

bool bitwise_equal(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a.data()[i] != b.data()[i]) return false;
  }
  return true;
}

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value) {
      setenv("GRJ_DEFAULT_TOL", value, 1);
    } else {
      unsetenv("GRJ_DEFAULT_TOL");
    }
  }
  ~EnvGuard() { unsetenv("GRJ_DEFAULT_TOL"); }
};

}  // namespace

TEST_CASE("model files round-trip bitwise") {
  for (const auto& id : builtin_ids()) {
    CAPTURE(id);
    const BuiltinModel m = builtin_model(id);
    const ModelFile f{id, m.ar, m.cov};
    const std::string text = dump(model_to_json(f));
    const ModelFile back = model_from_json(Json::parse(text));
    CHECK(back.id == id);
    CHECK(back.ar.p == m.ar.p);
    CHECK(back.ar.norm == m.ar.norm);
    for (std::size_t j = 0; j < m.ar.p; ++j) CHECK(bitwise_equal(back.ar.coeffs[j], m.ar.coeffs[j]));
    CHECK(bitwise_equal(back.cov, m.cov));
    CHECK(dump(model_to_json(back)) == text);
  }
}

TEST_CASE("awkward doubles survive the JSON round trip") {
  OperatorMatrix m(2, 2);
  m << Scalar(0.1, -1e-300), Scalar(1.0 / 3.0, 5e-324), Scalar(-2.2250738585072014e-308, 1e308), Scalar(0.0, -0.0);
  CHECK(bitwise_equal(matrix_from_json(Json::parse(dump(matrix_to_json(m)))), m));
}

TEST_CASE("model files reject unknown keys and malformed shapes") {
  Json j = model_to_json({"", fixture_oblique_ar1(), identity(2)});
  Json extra = j;
  extra["lag"] = 2;
  CHECK_THROWS_AS(model_from_json(extra), Error);
  Json bad_p = j;
  bad_p["p"] = 2;
  CHECK_THROWS_AS(model_from_json(bad_p), Error);
  Json bad_norm = j;
  bad_norm["norm"] = "frobenius";
  CHECK_THROWS_AS(model_from_json(bad_norm), Error);
  Json no_cov = j;
  no_cov.erase("cov");
  CHECK(bitwise_equal(model_from_json(no_cov).cov, identity(2)));
  Json bad_entries = j;
  bad_entries["coeffs"][0]["entries"].erase(0);
  CHECK_THROWS_AS(model_from_json(bad_entries), Error);
  try {
    model_from_json(extra);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
  const Run r = run({"analyze", "--model", write_model("extra.json", extra)});
  CHECK(r.code == kExitInput);
}

TEST_CASE("path CSV round-trips bitwise") {
  const BuiltinModel m = builtin_model("fx-ar3-i1");
  const SamplePath p = simulate_ar(m.ar, m.cov, 300, 17);
  const std::string csv = path_to_csv(p);
  CHECK(csv.rfind("t,coord_0,coord_1", 0) == 0);
  const RealMatrix back = states_from_csv(csv);
  REQUIRE(back.rows() == p.states.rows());
  REQUIRE(back.cols() == p.states.cols());
  CHECK((back.array() == p.states.array()).all());
  CHECK_THROWS_AS(states_from_csv("t,coord_0\n1,abc\n"), Error);
  CHECK_THROWS_AS(states_from_csv("t,coord_0\n1,2,3\n"), Error);
}

TEST_CASE("analyze verdicts on the built-in examples") {
  const Run c0 = run({"analyze", "--model", "ex-c0", "--n", "8"});
  REQUIRE(c0.code == kExitOk);
  const Json a = Json::parse(c0.out);
  CHECK(a["verdict"] == "pole order 2, I(1) fails, I(2) holds");
  CHECK(a["pole_order"]["order"] == 2);
  const Run eo = run({"analyze", "--model", "ex-evenodd", "--n", "16"});
  REQUIRE(eo.code == kExitOk);
  CHECK(Json::parse(eo.out)["verdict"] == "simple pole, I(1) holds, P = A_1");
  CHECK(Json::parse(eo.out)["p_minus_a1"].get<double>() <= 1e-8);
  const Run vo = run({"analyze", "--model", "ex-volterra", "--sweep", "4,8,16"});
  REQUIRE(vo.code == kExitOk);
  CHECK(Json::parse(vo.out)["essential_flag"] == true);
}

TEST_CASE("exit codes") {
  CHECK(run({"analyze", "--model", write_model("stable.json", model_to_json({"", ar1(0.5 * identity(2)), identity(2)}))})
            .code == kExitNoUnitRoot);
  const Run r3 = run({"represent", "--model", "ex-volterra", "--n", "4"});
  CHECK(r3.code == kExitNotIntegrated);
  CHECK(r3.err.find("neither I(1) nor I(2)") != std::string::npos);
  CHECK(run({"analyze", "--model", "no-such-model"}).code == kExitInput);
  CHECK(run({"analyze", "--model", (scratch_dir() / "missing.json").string()}).code == kExitInput);
  CHECK(run({"analyze", "--model", "ex-c0", "--bogus"}).code == kExitInput);
  CHECK(run({"frobnicate"}).code == kExitInput);
  CHECK(run({"sweep", "--model", "ex-volterra"}).code == kExitInput);
  const fs::path junk = scratch_dir() / "junk.json";
  write_text(junk.string(), "{\"p\": 1,");
  CHECK(run({"analyze", "--model", junk.string()}).code == kExitInput);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("represent on the random walk and the c0 model") {
  const Run rw = run({"represent", "--model", "fx-random-walk"});
  REQUIRE(rw.code == kExitOk);
  const Json j = Json::parse(rw.out);
  CHECK(bitwise_equal(matrix_from_json(j["long_run"]), identity(2)));
  CHECK(j["cointegration"]["dims"]["cointegrating"] == 0);
  CHECK(j["cross_check_residual"].get<double>() <= 1e-7);
  const Run c0 = run({"represent", "--model", "ex-c0"});
  REQUIRE(c0.code == kExitOk);
  const Json k = Json::parse(c0.out);
  CHECK(k["class"] == "I(2)");
  CHECK(k["n_minus2_rank"] == 1);
  CHECK(k["cross_check_residual"].get<double>() <= 1e-6);
}

TEST_CASE("GRJ_DEFAULT_TOL supplies the default rank tolerance") {
  {
    EnvGuard env("1e-9");
    const Json j = Json::parse(run({"analyze", "--model", "fx-oblique-ar1"}).out);
    CHECK(j["tolerance"]["rank_rel"].get<double>() == 1e-9);
    const Json k = Json::parse(run({"analyze", "--model", "fx-oblique-ar1", "--tol", "1e-11"}).out);
    CHECK(k["tolerance"]["rank_rel"].get<double>() == 1e-11);
  }
  {
    EnvGuard env("tiny");
    CHECK(run({"analyze", "--model", "fx-oblique-ar1"}).code == kExitInput);
  }
  {
    EnvGuard env("1e-9x");
    CHECK(run({"analyze", "--model", "fx-oblique-ar1"}).code == kExitInput);
  }
  {
    EnvGuard env(nullptr);
    const Json j = Json::parse(run({"analyze", "--model", "fx-oblique-ar1"}).out);
    CHECK(j["tolerance"]["rank_rel"].get<double>() == Tolerance{}.rank_rel);
  }
}

TEST_CASE("repeated runs are byte-identical") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"analyze", "--model", "ex-c0"},
        std::vector<std::string>{"represent", "--model", "fx-ar2-i1"},
        std::vector<std::string>{"simulate", "--model", "fx-ar3-i1", "--seed", "5", "--horizon", "200"},
        std::vector<std::string>{"simulate", "--model", "fx-oblique-ar1", "--replications", "8", "--threads", "3"},
        std::vector<std::string>{"verify", "--model", "fx-jordan-i2"},
        std::vector<std::string>{"examples"}, std::vector<std::string>{"examples", "ex-c0"},
        std::vector<std::string>{"sweep", "--model", "ex-volterra", "--dims", "4,8"}}) {
    CAPTURE(args.front());
    const Run a = run(args);
    const Run b = run(args);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
}

TEST_CASE("ensemble summaries do not depend on the thread count") {
  const Run a = run({"simulate", "--model", "fx-ar2-i1", "--replications", "12", "--threads", "1"});
  const Run b = run({"simulate", "--model", "fx-ar2-i1", "--replications", "12", "--threads", "4"});
  CHECK(a.out == b.out);
}

TEST_CASE("examples emits loadable model files") {
  const Json list = Json::parse(run({"examples"}).out);
  CHECK(list["examples"].size() == builtin_ids().size());
  const Run one = run({"examples", "--model", "fx-oblique-ar1"});
  REQUIRE(one.code == kExitOk);
  const fs::path file = scratch_dir() / "oblique.json";
  write_text(file.string(), one.out);
  const Run a = run({"analyze", "--model", file.string()});
  const Run b = run({"analyze", "--model", "fx-oblique-ar1"});
  REQUIRE(a.code == kExitOk);
  CHECK(Json::parse(a.out)["pole_order"] == Json::parse(b.out)["pole_order"]);
}

TEST_CASE("--out writes the report to a file") {
  const fs::path file = scratch_dir() / "analyze.json";
  const Run r = run({"analyze", "--model", "ex-c0", "--out", file.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.empty());
  CHECK(read_text(file.string()) == run({"analyze", "--model", "ex-c0"}).out);
}

TEST_CASE("verify passes on clean inputs and names injected faults") {
  const fs::path report = scratch_dir() / "report.json";
  REQUIRE(run({"represent", "--model", "fx-oblique-ar1", "--out", report.string()}).code == kExitOk);
  CHECK(run({"verify", "--model", "fx-oblique-ar1", "--report", report.string()}).code == kExitOk);
  Json j = Json::parse(read_text(report.string()));
  j["h_coeffs"][3]["entries"][0][0] = j["h_coeffs"][3]["entries"][0][0].get<double>() + 1e-3;
  const fs::path corrupt = scratch_dir() / "corrupt.json";
  write_text(corrupt.string(), dump(j));
  const Run bad = run({"verify", "--model", "fx-oblique-ar1", "--report", corrupt.string()});
  CHECK(bad.code == kExitInvariant);
  CHECK(bad.err.find("invariant failed: h-coefficient cross-check") != std::string::npos);
  CHECK(Json::parse(bad.out)["failed"] == Json::array({"h-coefficient cross-check"}));

  const fs::path path = scratch_dir() / "path.csv";
  REQUIRE(run({"simulate", "--model", "fx-oblique-ar1", "--seed", "1", "--out", path.string()}).code == kExitOk);
  CHECK(run({"verify", "--model", "fx-oblique-ar1", "--seed", "1", "--path", path.string()}).code == kExitOk);
  const Run mismatch = run({"verify", "--model", "fx-oblique-ar1", "--seed", "2", "--path", path.string()});
  CHECK(mismatch.code == kExitInvariant);
  CHECK(mismatch.err.find("invariant failed: determinism") != std::string::npos);
}
