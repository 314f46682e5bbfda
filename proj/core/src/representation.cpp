#include "grj/representation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "grj/error.hpp"
#include "grj/rng.hpp"

namespace grj {

namespace {

double op2(const OperatorMatrix& m) { return operator_norm(m, NormKind::two); }

OperatorMatrix zeros(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return OperatorMatrix::Zero(k, k);
}

bool complements_within(const Subspace& a, const Subspace& b, const Subspace& whole, const Tolerance& tol) {
  if (a.dim() + b.dim() != whole.dim()) return false;
  OperatorMatrix cat(static_cast<Eigen::Index>(whole.ambient_dim()), a.basis().cols() + b.basis().cols());
  cat << a.basis(), b.basis();
  return numerical_rank(cat, tol) == whole.dim() && whole.membership_residual(b.basis()) <= tol.residual_abs;
}

void require_unit_root(const SpectrumReport& spec) {
  if (!spec.has_unit_root) throw Error(ErrorKind::NoUnitRoot, "1 is not in the spectrum");
}

double max_h_difference(const CompanionPencil& cp, const std::vector<OperatorMatrix>& closed,
                        const std::vector<OperatorMatrix>& taylor) {
  double worst = 0.0;
  for (std::size_t j = 0; j < closed.size() && j < taylor.size(); ++j) {
    worst = std::max(worst, op2(closed[j] - cp.pi_p * taylor[j] * cp.pi_p_star));
  }
  return worst;
}

GeometricDecay decay_of(const std::vector<OperatorMatrix>& hs) {
  std::vector<double> norms;
  for (const auto& h : hs) norms.push_back(op2(h));
  return fit_geometric_decay(norms);
}

bool i1_condition(const CompanionPencil& cp, const Tolerance& tol) {
  const OperatorMatrix m = identity(cp.big_dim) - cp.a1;
  return direct_sum_check(range_basis(m, tol), kernel_basis(m, tol), tol).holds;
}

}  // namespace

GeometricDecay fit_geometric_decay(const std::vector<double>& norms) {
  GeometricDecay out;
  double peak = 0.0;
  for (double v : norms) peak = std::max(peak, v);
  if (peak == 0.0) return out;
  const double floor = kDecayNoiseFloor * std::max(1.0, peak);
  std::vector<double> js;
  std::vector<double> logs;
  for (std::size_t j = 0; j < norms.size(); ++j) {
    if (norms[j] > floor) {
      js.push_back(static_cast<double>(j));
      logs.push_back(std::log(norms[j]));
    }
  }
  if (js.size() < 2) {
    out.rho = 0.0;
    out.c = peak;
    return out;
  }
  double mj = 0.0;
  double ml = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    mj += js[i];
    ml += logs[i];
  }
  mj /= static_cast<double>(js.size());
  ml /= static_cast<double>(js.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    sxy += (js[i] - mj) * (logs[i] - ml);
    sxx += (js[i] - mj) * (js[i] - mj);
  }
  out.rho = std::exp(sxy / sxx);
  out.c = 0.0;
  for (std::size_t j = 0; j < norms.size(); ++j) {
    if (norms[j] > floor) out.c = std::max(out.c, norms[j] / std::pow(out.rho, static_cast<double>(j)));
  }
  return out;
}

std::vector<OperatorMatrix> stationary_coefficients(const CompanionPencil& cp, const OperatorMatrix& p_operator,
                                                    int j_max) {
  std::vector<OperatorMatrix> out;
  OperatorMatrix right = (identity(cp.big_dim) - p_operator) * cp.pi_p_star;
  for (int j = 0; j <= j_max; ++j) {
    out.push_back(cp.pi_p * right);
    right = cp.a1 * right;
  }
  return out;
}

I1Report check_i1(const CompanionPencil& cp, const Tolerance& tol, const ContourOptions& opts) {
  const SpectrumReport spec = spectrum_report(cp, opts.eta, tol);
  require_unit_root(spec);
  I1Report rep;
  rep.unit_root_ok = spec.unit_root_ok;
  const OperatorMatrix m = identity(cp.big_dim) - cp.a1;
  rep.ker = kernel_basis(m, tol);
  rep.ran = range_basis(m, tol);
  rep.ker_dim = rep.ker.dim();
  rep.ran_dim = rep.ran.dim();
  const DirectSumCheck dsc = direct_sum_check(rep.ran, rep.ker, tol);
  rep.holds = dsc.holds;
  rep.defect = dsc.defect;
  if (!rep.holds) return rep;
  rep.p_operator = oblique_projection(rep.ker, rep.ran, tol);
  rep.long_run = cp.pi_p * rep.p_operator * cp.pi_p_star;
  rep.attractor_proper = numerical_rank(rep.long_run, tol) < cp.dim;
  const PoleOrder po = pole_order(cp, tol, opts);
  rep.cross_check_residual = op2(rep.p_operator - po.n_minus1);
  return rep;
}

I1Report i1_components(const CompanionPencil& cp, int j_max, const Tolerance& tol, const ContourOptions& opts) {
  if (j_max < 0) throw Error(ErrorKind::InvalidInput, "j_max must be non-negative");
  I1Report rep = check_i1(cp, tol, opts);
  if (!rep.holds) {
    throw Error(ErrorKind::NotI1, "ran(I - A_1) and ker(I - A_1) do not form a direct sum (defect " +
                                      std::to_string(rep.defect) + ")");
  }
  rep.h_coeffs = stationary_coefficients(cp, rep.p_operator, j_max);
  rep.h_decay = decay_of(rep.h_coeffs);
  const LaurentExpansion ex = expansion(cp, 1, tol, opts);
  const auto taylor = holomorphic_taylor(cp, ex, j_max, tol, opts);
  rep.h_cross_check_residual = max_h_difference(cp, rep.h_coeffs, taylor);
  return rep;
}

I2Report check_i2(const CompanionPencil& cp, const Tolerance& tol, const Complements& comps) {
  const SpectrumReport spec = spectrum_report(cp, kDefaultEta, tol);
  require_unit_root(spec);
  const std::size_t d = cp.big_dim;
  const OperatorMatrix id = identity(d);
  const OperatorMatrix m = id - cp.a1;

  I2Report rep;
  rep.unit_root_ok = spec.unit_root_ok;
  rep.ker = kernel_basis(m, tol);
  rep.ran = range_basis(m, tol);
  rep.ran_c = comps.ran_c ? *comps.ran_c : orthogonal_complement(rep.ran, tol);
  rep.ker_c = comps.ker_c ? *comps.ker_c : orthogonal_complement(rep.ker, tol);
  if (rep.ran_c.ambient_dim() != d || rep.ker_c.ambient_dim() != d) {
    throw Error(ErrorKind::InvalidInput, "complements must live in the companion space");
  }
  if (!direct_sum_check(rep.ran, rep.ran_c, tol).holds) {
    throw Error(ErrorKind::NotComplementary, "supplied subspace does not complement ran(I - A_1)");
  }
  if (!direct_sum_check(rep.ker, rep.ker_c, tol).holds) {
    throw Error(ErrorKind::NotComplementary, "supplied subspace does not complement ker(I - A_1)");
  }

  rep.p_ran = oblique_projection(rep.ran, rep.ran_c, tol);
  const OperatorMatrix p_ker = oblique_projection(rep.ker, rep.ker_c, tol);
  rep.k_space = intersection(rep.ran, rep.ker, tol);
  const OperatorMatrix comp_ran = id - rep.p_ran;
  const double comp_norm = operator_norm(comp_ran, NormKind::two);
  rep.w_space = Subspace::span(comp_ran * rep.ker.basis(), tol, comp_norm);
  rep.gen_inverse = relative_generalized_inverse(m, rep.ker_c, rep.ran_c, tol);
  rep.q = (id - rep.p_ran) * p_ker;

  const Subspace k_candidate = intersection(rep.ker, rep.ran_c, tol);
  if (complements_within(rep.k_space, k_candidate, rep.ker, tol)) {
    rep.k_c = k_candidate;
    rep.k_c_rule = "induced";
  } else {
    rep.k_c = complement_within(rep.k_space, rep.ker, tol);
    rep.k_c_rule = "orthogonal";
  }
  const Subspace w_candidate = Subspace::span(comp_ran * rep.ker_c.basis(), tol, comp_norm);
  if (complements_within(rep.w_space, w_candidate, rep.ran_c, tol)) {
    rep.w_c = w_candidate;
    rep.w_c_rule = "induced";
  } else {
    rep.w_c = complement_within(rep.w_space, rep.ran_c, tol);
    rep.w_c_rule = "orthogonal";
  }

  if (rep.k_space.is_zero()) {
    rep.diagnostic = "ran(I - A_1) and ker(I - A_1) intersect trivially";
    return rep;
  }
  const Subspace sum = subspace_sum(rep.ran, rep.ker, tol);
  const Subspace gk = Subspace::span(rep.gen_inverse * rep.k_space.basis(), tol,
                                        operator_norm(rep.gen_inverse, NormKind::two));
  const DirectSumCheck dsc = direct_sum_check(sum, gk, tol);
  rep.defect = dsc.defect;
  if (!dsc.holds) {
    rep.diagnostic = "(ran + ker) and (I - A_1)^g K do not form a direct sum";
    return rep;
  }

  rep.p_wc = oblique_projection(rep.w_c, subspace_sum(rep.ran, rep.w_space, tol), tol);
  if (rep.w_c.dim() != rep.k_space.dim()) {
    rep.diagnostic = "dim W_C = " + std::to_string(rep.w_c.dim()) + " differs from dim K = " +
                     std::to_string(rep.k_space.dim());
    return rep;
  }
  const OperatorMatrix& kb = rep.k_space.basis();
  const OperatorMatrix& wcb = rep.w_c.basis();
  const OperatorMatrix tm = wcb.adjoint() * rep.p_wc * rep.gen_inverse * kb;
  Eigen::FullPivLU<OperatorMatrix> lu(tm);
  lu.setThreshold(tol.rank_rel);
  if (!lu.isInvertible()) {
    rep.diagnostic = "P_{W_C} (I - A_1)^g restricted to K is not invertible";
    return rep;
  }
  rep.holds = true;
  rep.n_minus2 = kb * lu.inverse() * wcb.adjoint() * rep.p_wc;
  rep.gamma_l = rep.gen_inverse * rep.n_minus2;
  rep.gamma_r = rep.n_minus2 * rep.gen_inverse;

  if (rep.w_space.is_zero()) {
    rep.q_g = zeros(d);
  } else {
    const OperatorMatrix p_w = oblique_projection(rep.w_space, subspace_sum(rep.w_c, rep.ran, tol), tol);
    const OperatorMatrix qk = rep.q * rep.k_c.basis();
    rep.q_g = rep.k_c.basis() * qk.colPivHouseholderQr().solve(p_w);
  }
  // Sum of the pieces P P_ran, P P_W (I - P_ran) and P P_WC.
  rep.p_op = rep.gamma_r + (id - rep.gamma_r) * (rep.gamma_l + rep.q_g * (id - rep.p_ran) * (id - rep.gamma_l));
  rep.long_run2 = cp.pi_p * rep.n_minus2 * cp.pi_p_star;
  rep.long_run1 = cp.pi_p * (rep.n_minus2 + rep.p_op) * cp.pi_p_star;
  OperatorMatrix both(static_cast<Eigen::Index>(cp.dim), static_cast<Eigen::Index>(2 * cp.dim));
  both << rep.long_run2, rep.long_run1;
  rep.attractor_proper = numerical_rank(both, tol) < cp.dim;
  return rep;
}

I2Report i2_components(const CompanionPencil& cp, int j_max, const Tolerance& tol, const Complements& comps,
                       const ContourOptions& opts) {
  if (j_max < 0) throw Error(ErrorKind::InvalidInput, "j_max must be non-negative");
  I2Report rep = check_i2(cp, tol, comps);
  if (!rep.holds) throw Error(ErrorKind::NotI2, rep.diagnostic);
  const LaurentExpansion ex = expansion(cp, 1, tol, opts);
  const OperatorMatrix n2c = ex.has_coeff(-2) ? ex.coeff(-2) : zeros(cp.big_dim);
  rep.cross_check_residual = std::max(op2(rep.n_minus2 - n2c), op2(rep.n_minus2 + rep.p_op - ex.coeff(-1)));
  rep.h_coeffs = stationary_coefficients(cp, rep.p_op, j_max);
  rep.h_decay = decay_of(rep.h_coeffs);
  const auto taylor = holomorphic_taylor(cp, ex, j_max, tol, opts);
  rep.h_cross_check_residual = max_h_difference(cp, rep.h_coeffs, taylor);
  return rep;
}

const char* to_string(IntegrationClass c) noexcept {
  switch (c) {
    case IntegrationClass::holomorphic: return "holomorphic";
    case IntegrationClass::i1: return "I(1)";
    case IntegrationClass::i2: return "I(2)";
    case IntegrationClass::higher: return "higher";
  }
  return "unknown";
}

Classification classify(const CompanionPencil& cp, const Tolerance& tol, const ContourOptions& opts) {
  Classification out;
  PoleOrder po;
  try {
    po = pole_order(cp, tol, opts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoUnitRoot) throw;
    out.cls = IntegrationClass::holomorphic;
    out.consistent = true;
    out.message = "holomorphic at 1";
    return out;
  }
  out.pole_order = po.order;
  out.i1 = i1_condition(cp, tol);
  out.i2 = !out.i1 && check_i2(cp, tol).holds;
  out.cls = out.i1 ? IntegrationClass::i1 : out.i2 ? IntegrationClass::i2 : IntegrationClass::higher;
  const std::size_t expected = out.cls == IntegrationClass::i1 ? 1 : out.cls == IntegrationClass::i2 ? 2 : 0;
  out.consistent = expected != 0 ? po.order == expected : po.order >= 3;
  if (out.cls == IntegrationClass::higher) {
    out.message = "pole of order " + std::to_string(po.order) + "; no representation is constructed beyond I(2)";
  } else {
    out.message = std::string(to_string(out.cls)) + " with pole order " + std::to_string(po.order);
  }
  return out;
}

double i1_identity_residual(const CompanionPencil& cp, const I1Report& rep, const Tolerance& tol,
                            std::size_t samples, std::uint64_t seed) {
  if (!rep.holds) throw Error(ErrorKind::NotI1, "the I(1) condition does not hold");
  const double r = default_contour_radius(spectrum_report(cp, kDefaultEta, tol));
  const OperatorMatrix id = identity(cp.big_dim);
  const CounterRng rng(seed, 0x1d);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double rad = r * (0.2 + 0.6 * rng.uniform(2 * s));
    const Scalar z = Scalar(1.0, 0.0) + std::polar(rad, 2.0 * std::numbers::pi * rng.uniform(2 * s + 1));
    const OperatorMatrix h = resolvent(cp, z, tol) + rep.p_operator / (z - 1.0);
    worst = std::max(worst, operator_norm((id - z * cp.a1) * h - (id - rep.p_operator), NormKind::two));
  }
  return worst;
}

double I2Identities::max() const { return std::max({annihilation, commutation, kernel_identity}); }

I2Identities i2_identities(const CompanionPencil& cp, const I2Report& rep) {
  if (!rep.holds) throw Error(ErrorKind::NotI2, "the I(2) condition does not hold");
  const OperatorMatrix id = identity(cp.big_dim);
  const OperatorMatrix b = id - cp.a1;
  const OperatorMatrix& n2 = rep.n_minus2;
  I2Identities out;
  out.annihilation = std::max(op2(b * n2), op2(n2 * b));
  out.commutation = std::max(op2(n2 * cp.a1 - n2), op2(cp.a1 * n2 - n2));
  const OperatorMatrix& k = rep.k_space.basis();
  out.kernel_identity = op2((n2 + rep.p_op) * k - k);
  return out;
}

}  // namespace grj
