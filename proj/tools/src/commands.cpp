#include "grj/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "grj/error.hpp"
#include "grj/rng.hpp"

namespace grj::cli {

namespace {

constexpr double kPCrossCheck = 1e-7;
constexpr double kHCrossCheck = 1e-6;
constexpr double kI2CrossCheck = 1e-6;
constexpr double kAlgebra = 1e-7;
constexpr double kSchur = 1e-8;
constexpr double kSlopeAccuracy = 0.15;
constexpr double kPEqualsA1 = 1e-8;
constexpr std::size_t kSchurSamples = 20;

double op2(const OperatorMatrix& m) { return operator_norm(m, NormKind::two); }

Json tolerance_json(const Tolerance& tol) {
  return Json{{"rank_rel", number(tol.rank_rel)}, {"residual_abs", number(tol.residual_abs)}};
}

Json header(const RunConfig& cfg, const LoadedModel& m, const Tolerance& tol) {
  return Json{{"command", cfg.command},
              {"model", m.id},
              {"p", m.ar.p},
              {"dim", m.ar.dim},
              {"tolerance", tolerance_json(tol)}};
}

SpectrumReport gate(const CompanionPencil& cp, const Tolerance& tol) {
  SpectrumReport spec = spectrum_report(cp, kDefaultEta, tol);
  if (!spec.has_unit_root) throw Error(ErrorKind::NoUnitRoot, "1 is not in the spectrum of the model");
  return spec;
}

std::string verdict(const PoleOrder& po, const I1Report& i1, const I2Report& i2, double p_minus_a1,
                    const std::optional<SweepResult>& sweep) {
  std::string v = po.order == 1 ? "simple pole" : "pole order " + std::to_string(po.order);
  v += i1.holds ? ", I(1) holds" : ", I(1) fails";
  if (!i1.holds) v += i2.holds ? ", I(2) holds" : ", I(2) fails";
  if (i1.holds && p_minus_a1 <= kPEqualsA1) v += ", P = A_1";
  if (sweep && sweep->essential_flag) v += ", essential singularity suspected";
  return v;
}

SweepResult run_sweep(const RunConfig& cfg, const LoadedModel& m, const Tolerance& tol) {
  if (!m.builtin) throw Error(ErrorKind::InvalidInput, "--sweep needs a built-in model with a truncation size");
  if (cfg.sweep.empty()) throw Error(ErrorKind::InvalidInput, "--sweep needs at least one dimension");
  const std::string id = m.id;
  const BuiltinParams base{cfg.n, cfg.lambda, cfg.model_seed};
  auto builder = [&](std::size_t d) {
    BuiltinParams p = base;
    p.n = d;
    return linearize(builtin_model(id, p).ar);
  };
  return truncation_sweep(builder, cfg.sweep, tol, resolve_contour(cfg));
}

struct Invariant {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

class InvariantSuite {
 public:
  void at_most(const std::string& name, double value, double threshold, std::string detail = {}) {
    items_.push_back({name, std::isfinite(value) && value <= threshold, value, threshold, std::move(detail)});
  }
  void require(const std::string& name, bool ok, std::string detail = {}) {
    items_.push_back({name, ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)});
  }
  bool passed() const {
    return std::all_of(items_.begin(), items_.end(), [](const Invariant& i) { return i.passed; });
  }
  Json to_json() const {
    Json list = Json::array();
    for (const auto& i : items_) {
      Json j{{"name", i.name}, {"passed", i.passed}, {"value", number(i.value)}, {"threshold", number(i.threshold)}};
      if (!i.detail.empty()) j["detail"] = i.detail;
      list.push_back(j);
    }
    return list;
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& i : items_) {
      if (!i.passed) out.push_back(i.name);
    }
    return out;
  }

 private:
  std::vector<Invariant> items_;
};

/// Worst relative gap between the leading block of (I - z A_1)^{-1} and A(z)^{-1}.
double schur_residual(const ArPencil& ar, const CompanionPencil& cp, const SpectrumReport& spec, const Tolerance& tol) {
  const double r = default_contour_radius(spec);
  const CounterRng rng(1, 0x5c);
  const auto n = static_cast<Eigen::Index>(ar.dim);
  double worst = 0.0;
  for (std::size_t s = 0; s < kSchurSamples; ++s) {
    const double rad = r * (0.5 + 0.4 * rng.uniform(2 * s));
    const Scalar z = Scalar(1.0, 0.0) + std::polar(rad, 2.0 * std::numbers::pi * rng.uniform(2 * s + 1));
    const OperatorMatrix big = resolvent(cp, z, tol);
    const OperatorMatrix small = poly_resolvent(ar, z, tol);
    const OperatorMatrix block = big.topLeftCorner(n, n);
    worst = std::max(worst, op2(block - small) / std::max(1.0, op2(small)));
  }
  return worst;
}

/// Compares a stored represent output's h_coeffs with recomputed ones.
double report_h_gap(const std::string& path, const std::vector<OperatorMatrix>& h) {
  const Json j = Json::parse(read_text(path));
  if (!j.contains("h_coeffs")) throw Error(ErrorKind::InvalidInput, "report '" + path + "' has no h_coeffs");
  const std::vector<OperatorMatrix> stored = matrices_from_json(j.at("h_coeffs"));
  if (stored.empty() || stored.size() > h.size()) {
    throw Error(ErrorKind::InvalidInput, "report '" + path + "' has an unexpected number of h_coeffs");
  }
  double gap = 0.0;
  for (std::size_t k = 0; k < stored.size(); ++k) {
    if (stored[k].rows() != h[k].rows() || stored[k].cols() != h[k].cols()) return INFINITY;
    gap = std::max(gap, op2(stored[k] - h[k]));
  }
  return gap;
}

bool path_matches(const std::string& csv_path, const SamplePath& path) {
  const RealMatrix stored = states_from_csv(read_text(csv_path));
  if (stored.rows() != path.states.rows() || stored.cols() != path.states.cols()) return false;
  for (Eigen::Index t = 0; t < stored.rows(); ++t) {
    for (Eigen::Index i = 0; i < stored.cols(); ++i) {
      if (stored(t, i) != path.states(t, i)) return false;
    }
  }
  return true;
}

void check_simulation(const RunConfig& cfg, const LoadedModel& m, const RepresentationCheck& rc, const SamplePath& path, InvariantSuite& suite) {
  suite.at_most("representation exactness", rc.max_residual, rc.threshold, to_string(rc.cls));
  const SamplePath again = simulate_ar(m.ar, m.cov, cfg.horizon, cfg.seed, {}, 0, m.id);
  bool same = identical_paths(path, again) && path_to_csv(path) == path_to_csv(again);
  std::string detail = "repeated simulation";
  if (!cfg.path.empty()) {
    same = same && path_matches(cfg.path, path);
    detail = "stored path " + cfg.path;
  }
  suite.require("determinism", same, detail);
}

std::vector<SamplePath> ensemble(const RunConfig& cfg, const LoadedModel& m) {
  return simulate_ensemble(m.ar, m.cov, cfg.mc_horizon, cfg.seed, cfg.replications, cfg.threads, {}, m.id);
}

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v == nullptr ? std::string() : std::string(v);
}

double parse_tol(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidInput, what + " must be a positive number, got '" + text + "'");
  }
  return v;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoUnitRoot:
      return kExitNoUnitRoot;
    case ErrorKind::NotI1:
    case ErrorKind::NotI2:
      return kExitNotIntegrated;
    case ErrorKind::InvariantViolation:
      return kExitInvariant;
    default:
      return kExitInput;
  }
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty() || cfg.out == "-") {
    out << text;
    out.flush();
  } else {
    write_text(cfg.out, text);
  }
}

}  // namespace

Tolerance resolve_tolerance(const RunConfig& cfg) {
  Tolerance tol = default_tolerance();
  const std::string env = env_or_empty("GRJ_DEFAULT_TOL");
  if (!env.empty()) tol.rank_rel = parse_tol(env, "GRJ_DEFAULT_TOL");
  if (cfg.tol) tol.rank_rel = parse_tol(format_double(*cfg.tol), "--tol");
  tol.validate();
  return tol;
}

ContourOptions resolve_contour(const RunConfig& cfg) {
  ContourOptions opts;
  if (cfg.radius) {
    if (!(*cfg.radius > 0.0)) throw Error(ErrorKind::InvalidInput, "--radius must be positive");
    opts.radius = *cfg.radius;
  }
  if (cfg.nodes) {
    if (*cfg.nodes < 16) throw Error(ErrorKind::InvalidInput, "--nodes must be at least 16");
    opts.nodes = *cfg.nodes;
    opts.max_nodes = std::max(opts.max_nodes, *cfg.nodes);
  }
  opts.threads = std::max(1u, cfg.threads);
  return opts;
}

LoadedModel load_model(const RunConfig& cfg) {
  if (cfg.model.empty()) throw Error(ErrorKind::InvalidInput, "--model is required");
  LoadedModel m;
  if (is_builtin(cfg.model)) {
    BuiltinModel b = builtin_model(cfg.model, BuiltinParams{cfg.n, cfg.lambda, cfg.model_seed});
    m.id = b.id;
    m.builtin = true;
    m.ar = std::move(b.ar);
    m.cov = std::move(b.cov);
    return m;
  }
  Json j;
  try {
    j = Json::parse(read_text(cfg.model));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidInput, "model file '" + cfg.model + "' is not valid JSON: " + e.what());
  }
  ModelFile f = model_from_json(j);
  m.id = f.id.empty() ? cfg.model : f.id;
  m.ar = std::move(f.ar);
  m.cov = std::move(f.cov);
  return m;
}

Json cmd_analyze(const RunConfig& cfg, int& code) {
  const Tolerance tol = resolve_tolerance(cfg);
  const ContourOptions opts = resolve_contour(cfg);
  const LoadedModel m = load_model(cfg);
  const CompanionPencil cp = linearize(m.ar);
  Json out = header(cfg, m, tol);
  const SpectrumReport spec = spectrum_report(cp, kDefaultEta, tol);
  out["spectrum"] = spectrum_to_json(spec);
  if (!spec.has_unit_root) {
    out["verdict"] = "no unit root";
    code = kExitNoUnitRoot;
    return out;
  }
  const PoleOrder po = pole_order(cp, tol, opts);
  const I1Report i1 = check_i1(cp, tol, opts);
  const I2Report i2 = check_i2(cp, tol);
  double p_minus_a1 = INFINITY;
  if (i1.holds && m.ar.p == 1) p_minus_a1 = op2(i1.p_operator - cp.a1);
  std::optional<SweepResult> sweep;
  if (!cfg.sweep.empty()) sweep = run_sweep(cfg, m, tol);

  out["pole_order"] = pole_order_to_json(po);
  out["i1"] = Json{{"holds", i1.holds},
                   {"ker_dim", i1.ker_dim},
                   {"ran_dim", i1.ran_dim},
                   {"defect", i1.defect},
                   {"ker", subspace_to_json(i1.ker)},
                   {"ran", subspace_to_json(i1.ran)},
                   {"cross_check_residual", i1.holds ? number(i1.cross_check_residual) : Json(nullptr)}};
  out["i2"] = Json{{"holds", i2.holds},
                   {"diagnostic", i2.diagnostic},
                   {"k_space", subspace_to_json(i2.k_space)},
                   {"w_space", subspace_to_json(i2.w_space)},
                   {"defect", i2.defect}};
  out["p_minus_a1"] = number(p_minus_a1);
  if (sweep) out["sweep"] = sweep_to_json(*sweep);
  out["essential_flag"] = sweep ? sweep->essential_flag : po.essential_flag;
  out["verdict"] = verdict(po, i1, i2, p_minus_a1, sweep);
  code = kExitOk;
  return out;
}

Json cmd_represent(const RunConfig& cfg, int& code) {
  const Tolerance tol = resolve_tolerance(cfg);
  const ContourOptions opts = resolve_contour(cfg);
  const LoadedModel m = load_model(cfg);
  const CompanionPencil cp = linearize(m.ar);
  gate(cp, tol);
  if (cfg.j_max < 0) throw Error(ErrorKind::InvalidInput, "--jmax must be non-negative");
  const Classification cls = classify(cp, tol, opts);
  Json out = header(cfg, m, tol);
  out["class"] = to_string(cls.cls);
  out["pole_order"] = cls.pole_order;
  if (cls.cls == IntegrationClass::i1) {
    const I1Report rep = i1_components(cp, cfg.j_max, tol, opts);
    const MaRepresentation ma = ma_from_i1(rep, m.cov, tol);
    const CointegrationReport coint = cointegration_report(ma, tol);
    out["p_operator"] = matrix_to_json(rep.p_operator);
    out["long_run"] = matrix_to_json(rep.long_run);
    out["h_coeffs"] = Json::array();
    for (const auto& h : rep.h_coeffs) out["h_coeffs"].push_back(matrix_to_json(h));
    out["h_decay"] = Json{{"c", number(rep.h_decay.c)}, {"rho", number(rep.h_decay.rho)}};
    out["cross_check_residual"] = number(rep.cross_check_residual);
    out["h_cross_check_residual"] = number(rep.h_cross_check_residual);
    out["cointegration"] = cointegration_to_json(coint);
    out["beveridge_nelson"] = beveridge_nelson_to_json(beveridge_nelson(ma));
    code = kExitOk;
    return out;
  }
  if (cls.cls == IntegrationClass::i2) {
    const I2Report rep = i2_components(cp, cfg.j_max, tol, {}, opts);
    out["n_minus2"] = matrix_to_json(rep.n_minus2);
    out["p_op"] = matrix_to_json(rep.p_op);
    out["long_run2"] = matrix_to_json(rep.long_run2);
    out["long_run1"] = matrix_to_json(rep.long_run1);
    out["n_minus2_rank"] = numerical_rank(rep.n_minus2, tol);
    out["h_coeffs"] = Json::array();
    for (const auto& h : rep.h_coeffs) out["h_coeffs"].push_back(matrix_to_json(h));
    out["h_decay"] = Json{{"c", number(rep.h_decay.c)}, {"rho", number(rep.h_decay.rho)}};
    out["cross_check_residual"] = number(rep.cross_check_residual);
    out["h_cross_check_residual"] = number(rep.h_cross_check_residual);
    const auto n = rep.long_run2.rows();
    OperatorMatrix both(n, 2 * n);
    both << rep.long_run2, rep.long_run1 - rep.long_run2;
    out["cointegrating_tier1"] = real_matrix_to_json(left_null_rows(rep.long_run2, tol));
    out["cointegrating_tier0"] = real_matrix_to_json(left_null_rows(both, tol));
    out["complement_rules"] = Json{{"w_c", rep.w_c_rule}, {"k_c", rep.k_c_rule}};
    code = kExitOk;
    return out;
  }
  out["message"] = cls.message;
  code = kExitNotIntegrated;
  return out;
}

std::string cmd_simulate(const RunConfig& cfg) {
  resolve_tolerance(cfg);
  const LoadedModel m = load_model(cfg);
  if (cfg.horizon == 0) throw Error(ErrorKind::InvalidInput, "--horizon must be positive");
  if (cfg.replications <= 1) return path_to_csv(simulate_ar(m.ar, m.cov, cfg.horizon, cfg.seed, {}, 0, m.id));

  const std::vector<SamplePath> paths =
      simulate_ensemble(m.ar, m.cov, cfg.horizon, cfg.seed, cfg.replications, cfg.threads, {}, m.id);
  const auto n = static_cast<Eigen::Index>(m.ar.dim);
  RealVector mean = RealVector::Zero(n);
  RealVector second = RealVector::Zero(n);
  for (const auto& p : paths) {
    const RealVector x = p.state(cfg.horizon);
    mean += x;
    second += x.cwiseProduct(x);
  }
  const double r = static_cast<double>(paths.size());
  mean /= r;
  RealVector var = (second / r - mean.cwiseProduct(mean)) * (r / (r - 1.0));
  Json mean_j = Json::array();
  Json var_j = Json::array();
  for (Eigen::Index i = 0; i < n; ++i) {
    mean_j.push_back(number(mean[i]));
    var_j.push_back(number(var[i]));
  }
  Json out{{"command", cfg.command},
           {"model", m.id},
           {"seed", cfg.seed},
           {"horizon", cfg.horizon},
           {"replications", cfg.replications},
           {"final_mean", mean_j},
           {"final_variance", var_j}};
  return dump(out);
}

Json cmd_verify(const RunConfig& cfg, int& code) {
  const Tolerance tol = resolve_tolerance(cfg);
  const ContourOptions opts = resolve_contour(cfg);
  const LoadedModel m = load_model(cfg);
  const CompanionPencil cp = linearize(m.ar);
  const SpectrumReport spec = gate(cp, tol);
  const SlopeMethod method = parse_slope_method(cfg.slope_method);
  const int j_max = std::max(cfg.j_max, 3);
  InvariantSuite suite;

  const Classification cls = classify(cp, tol, opts);
  suite.require("classification consistency", cls.consistent, cls.message);

  try {
    const LaurentExpansion ex = expansion(cp, j_max, tol, opts);
    const AlgebraResiduals alg = laurent_algebra(cp, ex, tol);
    suite.at_most("laurent reconstruction", ex.reconstruction_error, kAlgebra);
    suite.at_most("coefficient products", alg.products, kAlgebra);
    suite.at_most("identity expansions", std::max(alg.identity_left, alg.identity_right), kAlgebra);
    suite.at_most("resolvent equation", alg.resolvent_equation, kAlgebra);
    suite.at_most("projection idempotency", alg.idempotency, kAlgebra);
    suite.at_most("projection commutation", alg.commutation, kAlgebra);
    if (ex.pole_order == 1) suite.at_most("N_{-1} idempotency", alg.n_minus1_idempotency, kAlgebra);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvariantViolation) throw;
    suite.require("laurent expansion", false, e.what());
  }

  suite.at_most("schur identity", schur_residual(m.ar, cp, spec, tol), kSchur);
  const PoleOrder po = pole_order(cp, tol, opts);
  const PolyPoleOrder ppo = poly_pole_order(m.ar, tol, opts);
  suite.require("schur pole order", ppo.order == po.order,
                std::to_string(ppo.order) + " vs " + std::to_string(po.order));

  Json extra = Json::object();
  if (cls.cls == IntegrationClass::i1) {
    const I1Report rep = i1_components(cp, cfg.j_max, tol, opts);
    suite.at_most("P cross-check", rep.cross_check_residual, kPCrossCheck);
    double h_gap = rep.h_cross_check_residual;
    if (!cfg.report.empty()) h_gap = std::max(h_gap, report_h_gap(cfg.report, rep.h_coeffs));
    suite.at_most("h-coefficient cross-check", h_gap, kHCrossCheck);
    suite.require("h-coefficient decay", rep.h_decay.decays());
    suite.at_most("I(1) resolvent identity", i1_identity_residual(cp, rep, tol), kAlgebra);
    const MaRepresentation ma = ma_from_i1(rep, m.cov, tol);
    suite.at_most("Beveridge-Nelson reconstruction", beveridge_nelson(ma).reconstruction_residual,
                  tol.residual_abs);
    const SamplePath path = simulate_ar(m.ar, m.cov, cfg.horizon, cfg.seed, {}, 0, m.id);
    const RepresentationCheck rc = verify_representation(cp, path, rep, cfg.j_max, tol, opts);
    check_simulation(cfg, m, rc, path, suite);
    if (cfg.replications > 0) {
      const CointegrationReport coint = cointegration_report(ma, tol);
      const CointegrationProbe probe = cointegration_probe(ensemble(cfg, m), coint, tol, method);
      bool stationary = true;
      bool loaded_ok = true;
      double worst = 0.0;
      for (const auto& i : probe.cointegrating) stationary = stationary && i.result.stationary;
      for (const auto& i : probe.loaded) {
        loaded_ok = loaded_ok && !i.result.stationary;
        worst = std::max(worst, i.relative_error);
      }
      suite.require("cointegrating stationarity", stationary);
      suite.require("loaded nonstationarity", loaded_ok);
      suite.at_most("slope accuracy", worst, kSlopeAccuracy);
      extra["cointegration_probe"] = cointegration_probe_to_json(probe);
    }
  } else if (cls.cls == IntegrationClass::i2) {
    const I2Report rep = i2_components(cp, cfg.j_max, tol, {}, opts);
    suite.at_most("N_{-2} cross-check", rep.cross_check_residual, kI2CrossCheck);
    double h_gap = rep.h_cross_check_residual;
    if (!cfg.report.empty()) h_gap = std::max(h_gap, report_h_gap(cfg.report, rep.h_coeffs));
    suite.at_most("h-coefficient cross-check", h_gap, kHCrossCheck);
    suite.require("h-coefficient decay", rep.h_decay.decays());
    suite.at_most("I(2) identities", i2_identities(cp, rep).max(), kAlgebra);
    const SamplePath path = simulate_ar(m.ar, m.cov, cfg.horizon, cfg.seed, {}, 0, m.id);
    const RepresentationCheck rc = verify_representation(cp, path, rep, cfg.j_max, tol, opts);
    check_simulation(cfg, m, rc, path, suite);
    if (cfg.replications > 0) {
      const PolynomialProbe probe = polynomial_cointegration_probe(ensemble(cfg, m), rep, tol, method);
      suite.require("polynomial cointegration", probe.two_tier);
      extra["polynomial_probe"] = probe_to_json(probe);
    }
  }

  Json out = header(cfg, m, tol);
  out["class"] = to_string(cls.cls);
  out["pole_order"] = cls.pole_order;
  out["seed"] = cfg.seed;
  out["horizon"] = cfg.horizon;
  out["invariants"] = suite.to_json();
  out["failed"] = suite.failures();
  out["passed"] = suite.passed();
  for (const auto& [k, v] : extra.items()) out[k] = v;
  code = suite.passed() ? kExitOk : kExitInvariant;
  return out;
}

Json cmd_examples(const RunConfig& cfg) {
  if (cfg.model.empty()) {
    Json list = Json::array();
    for (const auto& id : builtin_ids()) {
      const BuiltinModel b = builtin_model(id);
      list.push_back(Json{{"id", b.id}, {"description", b.description}, {"p", b.ar.p}, {"dim", b.ar.dim}});
    }
    return Json{{"examples", list}};
  }
  if (!is_builtin(cfg.model)) throw Error(ErrorKind::InvalidInput, "unknown built-in model '" + cfg.model + "'");
  BuiltinModel b = builtin_model(cfg.model, BuiltinParams{cfg.n, cfg.lambda, cfg.model_seed});
  return model_to_json(ModelFile{b.id, b.ar, b.cov});
}

Json cmd_sweep(const RunConfig& cfg) {
  const Tolerance tol = resolve_tolerance(cfg);
  const LoadedModel m = load_model(cfg);
  Json out = header(cfg, m, tol);
  out["sweep"] = sweep_to_json(run_sweep(cfg, m, tol));
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unit-root analysis and Granger-Johansen representations of operator AR models", "grj"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto model_opts = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "Model file path or built-in id");
    sub->add_option("--n", cfg.n, "Truncation size of a built-in model");
    sub->add_option("--lambda", cfg.lambda, "lambda of ex-c0");
    sub->add_option("--model-seed", cfg.model_seed, "Seed of seeded built-in models");
    sub->add_option("--out", cfg.out, "Output file, - for stdout");
  };
  auto numeric_opts = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "Relative rank tolerance");
    sub->add_option("--radius", cfg.radius, "Contour radius");
    sub->add_option("--nodes", cfg.nodes, "Contour nodes");
    sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto sim_opts = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Simulation seed");
    sub->add_option("--horizon", cfg.horizon, "Simulation horizon T");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Spectrum, pole order and I(1)/I(2) verdicts");
  model_opts(analyze);
  numeric_opts(analyze);
  analyze->add_option("--sweep", cfg.sweep, "Truncation sizes for the essential-singularity sweep")->delimiter(',');

  CLI::App* represent = app.add_subcommand("represent", "Closed-form representation components");
  model_opts(represent);
  numeric_opts(represent);
  represent->add_option("--jmax", cfg.j_max, "Number of h coefficients minus one");

  CLI::App* simulate = app.add_subcommand("simulate", "Seeded sample path (CSV) or ensemble summary (JSON)");
  model_opts(simulate);
  numeric_opts(simulate);
  sim_opts(simulate);
  simulate->add_option("--replications", cfg.replications, "Ensemble size; above 1 prints a JSON summary");

  CLI::App* verify = app.add_subcommand("verify", "Full invariant suite with a JSON summary");
  model_opts(verify);
  numeric_opts(verify);
  sim_opts(verify);
  verify->add_option("--jmax", cfg.j_max, "Starting truncation of the stationary sum");
  verify->add_option("--replications", cfg.replications, "Monte Carlo replications for the stationarity probes");
  verify->add_option("--mc-horizon", cfg.mc_horizon, "Monte Carlo horizon");
  verify->add_option("--slope-method", cfg.slope_method, "variogram or endpoints");
  verify->add_option("--path", cfg.path, "Stored path CSV to compare against");
  verify->add_option("--report", cfg.report, "Stored represent output to compare against");

  CLI::App* examples = app.add_subcommand("examples", "List built-in models or print one as a model file");
  examples->add_option("id", cfg.model, "Built-in id");
  model_opts(examples);

  CLI::App* sweep = app.add_subcommand("sweep", "Pole order across truncation sizes");
  model_opts(sweep);
  numeric_opts(sweep);
  sweep->add_option("--dims", cfg.sweep, "Truncation sizes")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitInput;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    int code = kExitOk;
    if (cfg.command == "simulate") {
      emit(cfg, cmd_simulate(cfg), out);
      return kExitOk;
    }
    Json result;
    if (cfg.command == "analyze") {
      result = cmd_analyze(cfg, code);
    } else if (cfg.command == "represent") {
      result = cmd_represent(cfg, code);
    } else if (cfg.command == "verify") {
      result = cmd_verify(cfg, code);
    } else if (cfg.command == "examples") {
      result = cmd_examples(cfg);
    } else {
      result = cmd_sweep(cfg);
    }
    emit(cfg, dump(result), out);
    if (code == kExitNoUnitRoot) err << "error: 1 is not in the spectrum\n";
    if (code == kExitNotIntegrated) err << "error: the model is neither I(1) nor I(2)\n";
    if (code == kExitInvariant) {
      for (const auto& name : result.at("failed")) err << "invariant failed: " << name.get<std::string>() << "\n";
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const Json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace grj::cli
