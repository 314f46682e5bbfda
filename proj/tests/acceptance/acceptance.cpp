#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "grj/cli/commands.hpp"
#include "oracles.hpp"

using namespace grj;

namespace {

const Tolerance kTol{};

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      out_.pass = false;
      if (failures_++ < 4) failed_ += (failed_.empty() ? "" : "; ") + what;
    }
  }
  void track(double value, double& worst) { worst = std::max(worst, value); }
  Outcome finish(const std::string& summary) {
    out_.detail = out_.pass ? summary : "failed: " + failed_ + (failures_ > 4 ? " (+more)" : "") + "; " + summary;
    return out_;
  }

 private:
  Outcome out_;
  std::string failed_;
  int failures_ = 0;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::vector<cli::Json> analyze(const std::vector<cli::RunConfig>& cfgs) {
  std::vector<cli::Json> out;
  for (const auto& cfg : cfgs) {
    int code = 0;
    out.push_back(cli::cmd_analyze(cfg, code));
    out.back()["exit"] = code;
  }
  return out;
}

cli::RunConfig analyze_cfg(const std::string& model, std::size_t n, std::vector<std::size_t> sweep = {}) {
  cli::RunConfig cfg;
  cfg.command = "analyze";
  cfg.model = model;
  cfg.n = n;
  cfg.sweep = std::move(sweep);
  return cfg;
}

Outcome criterion1() {
  Checker c;
  const auto r = analyze({analyze_cfg("ex-c0", 8), analyze_cfg("ex-evenodd", 16), analyze_cfg("ex-selfadjoint", 0),
                          analyze_cfg("ex-volterra", 8, {4, 8, 16})});
  c.expect(r[0]["exit"] == 0 && r[0]["pole_order"]["order"] == 2 && r[0]["i1"]["holds"] == false &&
               r[0]["i2"]["holds"] == true,
           "ex-c0 verdict");
  const double pa = r[1]["p_minus_a1"].get<double>();
  c.expect(r[1]["pole_order"]["order"] == 1 && pa <= 1e-8, "ex-evenodd ||P - A_1|| = " + sci(pa));
  c.expect(r[2]["pole_order"]["order"] == 1, "ex-selfadjoint simple pole");
  bool orders = true;
  for (const auto& pt : r[3]["sweep"]["points"]) orders = orders && pt["order"] == pt["dim"];
  c.expect(orders && r[3]["sweep"]["points"].size() == 3, "ex-volterra sweep orders equal n");
  c.expect(r[3]["essential_flag"] == true, "ex-volterra essential_flag");
  return c.finish("c0 '" + r[0]["verdict"].get<std::string>() + "', evenodd ||P - A_1|| = " + sci(pa) +
                  ", selfadjoint order 1, volterra orders 4/8/16 flagged");
}

Outcome criterion2() {
  Checker c;
  int agree = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const JordanModel jm = build_jordan(random_jordan_spec(seed));
    const CompanionPencil cp = linearize(ar1(jm.a1));
    const PoleOrder po = pole_order(cp, kTol);
    const bool i1 = check_i1(cp, kTol).holds;
    const bool i2 = check_i2(cp, kTol).holds;
    const bool ok = po.order == jm.max_block && i1 == (jm.max_block == 1) && i2 == (jm.max_block == 2);
    c.expect(ok, "seed " + std::to_string(seed));
    agree += ok ? 1 : 0;
  }
  return c.finish(std::to_string(agree) + "/200 orders and I(1)/I(2) verdicts match the planted blocks");
}

std::vector<Complements> complement_choices(const CompanionPencil& cp, std::uint64_t seed) {
  const OperatorMatrix m = identity(cp.big_dim) - cp.a1;
  const std::size_t r = range_basis(m, kTol).dim();
  const std::size_t k = kernel_basis(m, kTol).dim();
  return {Complements{},
          Complements{test::random_subspace(seed, cp.big_dim, cp.big_dim - r, kTol), std::nullopt},
          Complements{std::nullopt, test::random_subspace(seed + 1, cp.big_dim, cp.big_dim - k, kTol)},
          Complements{test::random_subspace(seed + 2, cp.big_dim, cp.big_dim - r, kTol),
                      test::random_subspace(seed + 3, cp.big_dim, cp.big_dim - k, kTol)}};
}

Outcome criterion3() {
  Checker c;
  double worst_p = 0.0;
  double worst_h = 0.0;
  std::size_t i1_models = 0;
  for (const char* id : {"fx-random-walk", "fx-oblique-ar1", "fx-ar2-i1", "fx-ar3-i1", "ex-evenodd", "ex-selfadjoint"}) {
    const I1Report rep = i1_components(linearize(builtin_model(id).ar), 20, kTol);
    c.expect(rep.cross_check_residual <= 1e-7, std::string(id) + " P");
    c.expect(rep.h_cross_check_residual <= 1e-6, std::string(id) + " h");
    c.track(rep.cross_check_residual, worst_p);
    c.track(rep.h_cross_check_residual, worst_h);
    ++i1_models;
  }
  std::vector<std::pair<std::string, CompanionPencil>> i2;
  for (const char* id : {"ex-c0", "fx-ar2-i2", "fx-jordan-i2"}) i2.emplace_back(id, linearize(builtin_model(id).ar));
  JordanSpec s;
  s.unit_blocks = {2, 1};
  s.stable = {0.4, -0.3};
  s.cond = 30.0;
  s.seed = 17;
  i2.emplace_back("jordan {2,1}", linearize(ar1(build_jordan(s).a1)));
  double worst_n = 0.0;
  std::uint64_t seed = 100;
  std::size_t min_choices = 100;
  for (const auto& [name, cp] : i2) {
    std::size_t choices = 0;
    for (const Complements& comps : complement_choices(cp, seed += 10)) {
      const I2Report rep = i2_components(cp, 20, kTol, comps);
      c.expect(rep.cross_check_residual <= 1e-6, name + " N_{-2}, N_{-1}");
      c.track(rep.cross_check_residual, worst_n);
      ++choices;
    }
    min_choices = std::min(min_choices, choices);
  }
  c.expect(min_choices >= 3, "complement choices");
  return c.finish(std::to_string(i1_models) + " I(1) models: max ||P - N_{-1}|| = " + sci(worst_p) +
                  ", max h = " + sci(worst_h) + "; " + std::to_string(i2.size()) + " I(2) models x " +
                  std::to_string(min_choices) + " complements: max = " + sci(worst_n));
}

Outcome criterion4() {
  Checker c;
  double worst = 0.0;
  std::size_t models = 0;
  for (const auto& id : builtin_ids()) {
    const CompanionPencil cp = linearize(builtin_model(id).ar);
    const LaurentExpansion ex = expansion(cp, 3, kTol);
    const AlgebraResiduals a = laurent_algebra(cp, ex, kTol, 10);
    double m = a.max();
    if (ex.pole_order == 1) m = std::max(m, a.n_minus1_idempotency);
    c.expect(m <= 1e-7, id + " " + sci(m));
    c.track(m, worst);
    ++models;
  }
  return c.finish(std::to_string(models) + " models, max residual " + sci(worst));
}

Outcome criterion5() {
  Checker c;
  double worst = 0.0;
  double tau1_min = 1e300;
  for (const char* id : {"fx-random-walk", "fx-oblique-ar1", "fx-ar2-i1", "ex-c0", "fx-jordan-i2"}) {
    const BuiltinModel m = builtin_model(id, BuiltinParams{id == std::string("ex-c0") ? 8u : 0u, 0.5, 1});
    const CompanionPencil cp = linearize(m.ar);
    std::vector<RealVector> init;
    const RealMatrix g = test::gaussian_matrix(8, static_cast<Eigen::Index>(m.ar.dim), static_cast<Eigen::Index>(m.ar.p));
    for (Eigen::Index j = 0; j < g.cols(); ++j) init.push_back(3.0 * g.col(j));
    const SamplePath path = simulate_ar(m.ar, m.cov, 500, 21, init);
    const bool is_i1 = classify(cp, kTol).cls == IntegrationClass::i1;
    const RepresentationCheck rc = is_i1 ? verify_representation(cp, path, i1_components(cp, 20, kTol), 20, kTol)
                                         : verify_representation(cp, path, i2_components(cp, 20, kTol), 20, kTol);
    const double rel = rc.max_residual / (1.0 + rc.max_state_norm);
    c.expect(rc.passes && rel <= 1e-6, std::string(id) + " residual " + sci(rel));
    c.track(rel, worst);
    if (!is_i1) {
      c.expect(rc.cls == RepresentationClass::i2, std::string(id) + " affine fit");
      c.expect(rc.tau1.norm() > 0.0, std::string(id) + " tau1");
      tau1_min = std::min(tau1_min, rc.tau1.norm());
    }
  }
  return c.finish("max residual / (1 + max ||X_t||) = " + sci(worst) + ", I(2) fits min ||tau1|| = " + sci(tau1_min));
}

Outcome criterion6() {
  Checker c;
  double worst = 0.0;
  std::size_t stat = 0;
  std::size_t loaded = 0;
  for (const char* id : {"fx-oblique-ar1", "fx-ar2-i1", "fx-ar3-i1"}) {
    const BuiltinModel m = builtin_model(id);
    const I1Report rep = i1_components(linearize(m.ar), 40, kTol);
    const CointegrationReport cr = cointegration_report(ma_from_i1(rep, m.cov, kTol), kTol);
    const auto paths = simulate_ensemble(m.ar, m.cov, 2000, 1, 200, 4);
    const CointegrationProbe probe = cointegration_probe(paths, cr, kTol);
    c.expect(!probe.cointegrating.empty(), std::string(id) + " cointegrating space");
    for (const auto& item : probe.cointegrating) {
      c.expect(item.result.stationary, std::string(id) + " basis functional stationary");
      ++stat;
    }
    for (const auto& item : probe.loaded) {
      c.expect(!item.result.stationary && item.relative_error <= 0.15,
               std::string(id) + " loaded slope error " + sci(item.relative_error));
      c.track(item.relative_error, worst);
      ++loaded;
    }
  }
  const BuiltinModel c0 = builtin_model("ex-c0");
  const I2Report rep = i2_components(linearize(c0.ar), 20, kTol);
  const PolynomialProbe pp = polynomial_cointegration_probe(simulate_ensemble(c0.ar, c0.cov, 2000, 1, 200, 4), rep, kTol);
  c.expect(pp.two_tier, "ex-c0 two-tier");
  return c.finish(std::to_string(stat) + " cointegrating functionals stationary, " + std::to_string(loaded) +
                  " loaded functionals with max slope error " + std::to_string(worst * 100.0).substr(0, 4) +
                  "%, ex-c0 two-tier " + (pp.two_tier ? "confirmed" : "not confirmed"));
}

Outcome criterion7() {
  Checker c;
  std::string detail;
  for (const char* id : {"fx-ar2-i1", "fx-ar3-i1", "fx-ar2-i2"}) {
    const ArPencil ar = builtin_model(id).ar;
    const std::size_t big = pole_order(linearize(ar), kTol).order;
    const std::size_t small = poly_pole_order(ar, kTol).order;
    c.expect(big == small, std::string(id));
    detail += (detail.empty() ? "" : ", ") + std::string(id) + " " + std::to_string(big) + "/" + std::to_string(small);
  }
  return c.finish("companion/n x n pole orders: " + detail);
}

Outcome criterion8() {
  Checker c;
  const std::vector<std::vector<std::string>> runs = {
      {"simulate", "--model", "fx-ar3-i1", "--seed", "5", "--horizon", "300"},
      {"simulate", "--model", "ex-c0", "--replications", "16", "--threads", "4"},
      {"analyze", "--model", "ex-c0"},
      {"represent", "--model", "fx-ar2-i1"},
      {"verify", "--model", "fx-oblique-ar1"},
      {"sweep", "--model", "ex-volterra", "--dims", "4,8"}};
  for (const auto& args : runs) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<const char*> argv{"grj"};
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out;
      std::ostringstream err;
      const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
      c.expect(code == 0, args[0] + " exit " + std::to_string(code));
      if (rep == 0) {
        first = out.str();
      } else {
        c.expect(out.str() == first && !first.empty(), args[0] + " " + args[2] + " output differs");
      }
    }
  }
  const BuiltinModel m = builtin_model("fx-ar2-i1");
  const auto a = simulate_ensemble(m.ar, m.cov, 200, 3, 8, 1);
  const auto b = simulate_ensemble(m.ar, m.cov, 200, 3, 8, 3);
  for (std::size_t r = 0; r < a.size(); ++r) c.expect(identical_paths(a[r], b[r]), "ensemble thread count");
  return c.finish(std::to_string(runs.size()) + " CLI runs byte-identical, ensembles identical across thread counts");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double budget;  // seconds, 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {{1, 5.0, criterion1},  {2, 30.0, criterion2}, {3, 0.0, criterion3},
                                           {4, 0.0, criterion4},  {5, 0.0, criterion5},  {6, 60.0, criterion6},
                                           {7, 0.0, criterion7},  {8, 0.0, criterion8}};
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.budget > 0.0 && secs > cr.budget) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(cr.budget)) + " s budget";
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, " (%.1f s)", secs);
    std::printf("criterion %d: %s: %s%s\n", cr.id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), timing);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
