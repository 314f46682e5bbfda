#include "grj/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "grj/error.hpp"
#include "grj/rng.hpp"

namespace grj {

CircleQuadrature::CircleQuadrature(Integrand f, Scalar center, double radius, int j_lo, int j_hi, unsigned threads)
    : f_(std::move(f)), center_(center), radius_(radius), j_lo_(j_lo), j_hi_(j_hi), threads_(std::max(1u, threads)) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidInput, "contour radius must be positive");
  if (j_hi < j_lo) throw Error(ErrorKind::InvalidInput, "empty coefficient range");
}

void CircleQuadrature::run(std::size_t nodes) {
  if (nodes < 1) throw Error(ErrorKind::InvalidInput, "quadrature needs at least one node");
  sums_.clear();
  nodes_ = 0;
  accumulate(nodes, 0, 1, nodes);
  nodes_ = nodes;
}

void CircleQuadrature::double_nodes() {
  if (nodes_ == 0) throw Error(ErrorKind::InvalidInput, "run() must precede double_nodes()");
  accumulate(nodes_, 1, 2, 2 * nodes_);
  nodes_ *= 2;
}

void CircleQuadrature::accumulate(std::size_t count, std::size_t offset, std::size_t stride, std::size_t denom) {
  const double two_pi = 2.0 * std::numbers::pi;
  const std::size_t chunk = std::max<std::size_t>(16, 4 * threads_);
  std::vector<OperatorMatrix> values(chunk);
  std::vector<double> thetas(chunk);
  for (std::size_t start = 0; start < count; start += chunk) {
    const std::size_t len = std::min(chunk, count - start);
    for (std::size_t i = 0; i < len; ++i) {
      thetas[i] = two_pi * static_cast<double>(offset + stride * (start + i)) / static_cast<double>(denom);
    }
    auto eval = [&](std::size_t i) { values[i] = f_(center_ + std::polar(radius_, thetas[i])); };
    if (threads_ == 1 || len == 1) {
      for (std::size_t i = 0; i < len; ++i) eval(i);
    } else {
      std::vector<std::exception_ptr> errors(threads_);
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads_; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (std::size_t i = t; i < len; i += threads_) eval(i);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    if (sums_.empty()) {
      sums_.assign(static_cast<std::size_t>(j_hi_ - j_lo_ + 1),
                   OperatorMatrix::Zero(values[0].rows(), values[0].cols()));
    }
    // Reduction in node order keeps the sums independent of the thread count.
    for (std::size_t i = 0; i < len; ++i) {
      for (int j = j_lo_; j <= j_hi_; ++j) {
        sums_[static_cast<std::size_t>(j - j_lo_)] += std::polar(1.0, -static_cast<double>(j) * thetas[i]) * values[i];
      }
    }
  }
}

OperatorMatrix CircleQuadrature::coefficient(int j) const {
  if (j < j_lo_ || j > j_hi_ || sums_.empty()) {
    throw Error(ErrorKind::InvalidInput, "coefficient index outside the quadrature range");
  }
  const double scale = std::pow(radius_, -static_cast<double>(j)) / static_cast<double>(nodes_);
  return scale * sums_[static_cast<std::size_t>(j - j_lo_)];
}

namespace {

double scaled_change(const CircleQuadrature& q, const std::vector<OperatorMatrix>& prev) {
  double diff = 0.0;
  double size = 0.0;
  for (int j = q.j_lo(); j <= q.j_hi(); ++j) {
    const double w = std::pow(q.radius(), static_cast<double>(j));
    const OperatorMatrix c = q.coefficient(j);
    diff = std::max(diff, w * operator_norm(c - prev[static_cast<std::size_t>(j - q.j_lo())], NormKind::two));
    size = std::max(size, w * operator_norm(c, NormKind::two));
  }
  return size > 0.0 ? diff / size : diff;
}

std::vector<OperatorMatrix> snapshot(const CircleQuadrature& q) {
  std::vector<OperatorMatrix> out;
  for (int j = q.j_lo(); j <= q.j_hi(); ++j) out.push_back(q.coefficient(j));
  return out;
}

// Runs the quadrature, doubling until the scaled coefficients settle.
ContourInfo converge(CircleQuadrature& q, const ContourOptions& opts, Scalar center) {
  ContourInfo info;
  info.center = center;
  info.radius = q.radius();
  q.run(opts.nodes);
  if (opts.adaptive) {
    while (q.nodes() < opts.max_nodes) {
      const auto prev = snapshot(q);
      q.double_nodes();
      info.last_change = scaled_change(q, prev);
      if (info.last_change <= opts.convergence) break;
    }
  }
  info.nodes = q.nodes();
  return info;
}

CircleQuadrature::Integrand resolvent_integrand(const CompanionPencil& cp, const Tolerance& tol) {
  return [&cp, tol](Scalar z) { return resolvent(cp, z, tol); };
}

double checked_radius(const CompanionPencil& cp, const SpectrumReport& spec, double requested) {
  const double r = requested > 0.0 ? requested : default_contour_radius(spec);
  if (spec.nearest_other_distance <= kContourSafety * r) {
    throw Error(ErrorKind::ContourTooWide, "another spectrum point lies within " +
                                               std::to_string(kContourSafety) + " radii of 1");
  }
  (void)cp;
  return r;
}

double op2(const OperatorMatrix& m) { return operator_norm(m, NormKind::two); }

}  // namespace

double default_contour_radius(const SpectrumReport& spec) {
  return std::min(0.5, 0.4 * spec.nearest_other_distance);
}

OperatorMatrix contour_coefficient(const CompanionPencil& cp, int j, double radius, std::size_t nodes,
                                   const Tolerance& tol) {
  if (nodes < 16) throw Error(ErrorKind::InvalidInput, "contour quadrature needs at least 16 nodes");
  const SpectrumReport spec = spectrum_report(cp, kDefaultEta, tol);
  const double r = checked_radius(cp, spec, radius);
  CircleQuadrature q(resolvent_integrand(cp, tol), Scalar(1.0, 0.0), r, j, j);
  q.run(nodes);
  return -q.coefficient(j);
}

PoleOrder pole_order(const CompanionPencil& cp, const Tolerance& tol, const ContourOptions& opts) {
  const SpectrumReport spec = spectrum_report(cp, opts.eta, tol);
  if (!spec.has_unit_root) throw Error(ErrorKind::NoUnitRoot, "1 is not in the spectrum");
  const double r = checked_radius(cp, spec, opts.radius);

  CircleQuadrature q(resolvent_integrand(cp, tol), Scalar(1.0, 0.0), r, -1, -1, opts.threads);
  PoleOrder out;
  out.contour = converge(q, opts, Scalar(1.0, 0.0));
  out.n_minus1 = -q.coefficient(-1);
  out.p_operator = out.n_minus1 * cp.a1;
  const double p_norm = op2(out.p_operator);
  if (!(p_norm > tol.residual_abs)) throw Error(ErrorKind::NoUnitRoot, "the projection at 1 vanishes");

  // G^k = (I - A_1)^k P. The power is formed first so exact structure
  // (e.g. nilpotent triangular parts) survives; the test is relative.
  const std::size_t d = cp.big_dim;
  const OperatorMatrix b = identity(d) - cp.a1;
  const Eigen::MatrixXd abs_b = b.cwiseAbs();
  const double eps = std::numeric_limits<double>::epsilon();
  OperatorMatrix bk = identity(d);
  Eigen::MatrixXd abs_bk = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  out.nilpotency_index = d;
  for (std::size_t k = 1; k <= d; ++k) {
    bk = bk * b;
    abs_bk = abs_bk * abs_b;
    const double bk_norm = op2(bk);
    const OperatorMatrix gk = bk * out.p_operator;
    const double gk_norm = op2(gk);
    bool zero = (bk_norm == 0.0 || gk_norm == 0.0);
    double ratio = 0.0;
    if (!zero) {
      ratio = gk_norm / (bk_norm * p_norm);
      const double abs_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(abs_bk).singularValues()[0];
      const double floor = 10.0 * static_cast<double>(k * d) * eps * abs_norm / bk_norm;
      zero = ratio <= std::max(kNilpotencyFactor * tol.rank_rel, floor);
    }
    out.nilpotency_ratios.push_back(ratio);
    if (zero) {
      out.nilpotency_index = k;
      break;
    }
  }
  out.order = out.nilpotency_index;
  out.ascent = ascent_at_one(cp.a1, tol);
  out.ascent_agrees = out.ascent == out.order;
  return out;
}

PolyPoleOrder poly_pole_order(const ArPencil& ar, const Tolerance& tol, const ContourOptions& opts) {
  const CompanionPencil cp = linearize(ar);
  const SpectrumReport spec = spectrum_report(cp, opts.eta, tol);
  if (!spec.has_unit_root) throw Error(ErrorKind::NoUnitRoot, "1 is not in the spectrum");
  const double r = checked_radius(cp, spec, opts.radius);
  const int k_max = static_cast<int>(cp.big_dim);
  auto f = [&ar, tol](Scalar z) { return poly_resolvent(ar, z, tol); };
  CircleQuadrature q(f, Scalar(1.0, 0.0), r, -k_max, -1, opts.threads);
  PolyPoleOrder out;
  out.contour = converge(q, opts, Scalar(1.0, 0.0));
  double peak = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    out.coeff_norms.push_back(op2(q.coefficient(-k)));
    peak = std::max(peak, out.coeff_norms.back());
  }
  for (std::size_t k = out.coeff_norms.size(); k >= 1; --k) {
    if (out.coeff_norms[k - 1] > kPolyCoeffRel * peak) {
      out.order = k;
      break;
    }
  }
  return out;
}

const OperatorMatrix& LaurentExpansion::coeff(int j) const {
  const auto it = coeffs.find(j);
  if (it == coeffs.end()) throw Error(ErrorKind::InvalidInput, "coefficient " + std::to_string(j) + " not stored");
  return it->second;
}

OperatorMatrix LaurentExpansion::evaluate(Scalar z) const {
  const Scalar w = z - 1.0;
  OperatorMatrix out = OperatorMatrix::Zero(coeffs.begin()->second.rows(), coeffs.begin()->second.cols());
  for (const auto& [j, n] : coeffs) out -= std::pow(w, j) * n;
  return out;
}

OperatorMatrix LaurentExpansion::principal_part(Scalar z) const {
  const Scalar w = z - 1.0;
  OperatorMatrix out = OperatorMatrix::Zero(coeffs.begin()->second.rows(), coeffs.begin()->second.cols());
  for (const auto& [j, n] : coeffs) {
    if (j < 0) out -= std::pow(w, j) * n;
  }
  return out;
}

LaurentExpansion expansion(const CompanionPencil& cp, int j_max, const Tolerance& tol, const ContourOptions& opts) {
  if (j_max < 0) throw Error(ErrorKind::InvalidInput, "j_max must be non-negative");
  const PoleOrder po = pole_order(cp, tol, opts);
  const int order = static_cast<int>(po.order);
  const int j_internal = std::max(j_max, 40);

  ContourOptions local = opts;
  local.radius = po.contour.radius;
  CircleQuadrature q(resolvent_integrand(cp, tol), Scalar(1.0, 0.0), po.contour.radius, -order, j_internal,
                     opts.threads);
  LaurentExpansion ex;
  ex.contour = converge(q, local, Scalar(1.0, 0.0));
  ex.pole_order = po.order;
  ex.nilpotency_index = po.nilpotency_index;
  ex.ascent = po.ascent;
  ex.essential_flag = po.essential_flag;
  ex.j_max = j_max;

  std::map<int, OperatorMatrix> all;
  for (int j = -order; j <= j_internal; ++j) all[j] = -q.coefficient(j);
  ex.coeffs = all;

  const std::size_t d = cp.big_dim;
  ex.p_operator = ex.coeff(-1) * cp.a1;
  ex.g_operator = (identity(d) - cp.a1) * ex.p_operator;

  const int probes = 8;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int m = 0; m < probes; ++m) {
    const Scalar z = 1.0 + std::polar(0.5 * ex.contour.radius, two_pi * (m + 0.3) / probes);
    const OperatorMatrix direct = resolvent(cp, z, tol);
    const double err = op2(direct - ex.evaluate(z)) / std::max(1.0, op2(direct));
    ex.reconstruction_error = std::max(ex.reconstruction_error, err);
  }
  for (auto it = ex.coeffs.begin(); it != ex.coeffs.end();) {
    it = it->first > j_max ? ex.coeffs.erase(it) : std::next(it);
  }

  const double pn = std::max(1.0, op2(ex.p_operator));
  const double an = std::max(1.0, op2(cp.a1));
  ex.idempotency_residual = op2(ex.p_operator * ex.p_operator - ex.p_operator);
  ex.commutation_residual = op2(ex.p_operator * cp.a1 - cp.a1 * ex.p_operator);
  if (!(ex.reconstruction_error <= tol.residual_abs)) {
    throw Error(ErrorKind::InvariantViolation, "Laurent reconstruction error " + std::to_string(ex.reconstruction_error));
  }
  if (!(ex.idempotency_residual <= tol.residual_abs * pn * pn)) {
    throw Error(ErrorKind::InvariantViolation, "projection idempotency residual " +
                                                   std::to_string(ex.idempotency_residual));
  }
  if (!(ex.commutation_residual <= tol.residual_abs * pn * an)) {
    throw Error(ErrorKind::InvariantViolation, "projection commutation residual " +
                                                   std::to_string(ex.commutation_residual));
  }
  return ex;
}

std::vector<OperatorMatrix> holomorphic_taylor(const CompanionPencil& cp, const LaurentExpansion& ex, int j_max,
                                               const Tolerance& tol, const ContourOptions& opts) {
  if (j_max < 0) throw Error(ErrorKind::InvalidInput, "j_max must be non-negative");
  const SpectrumReport spec = spectrum_report(cp, opts.eta, tol);
  double min_mu = std::numeric_limits<double>::infinity();
  for (const auto& mu : spec.others) min_mu = std::min(min_mu, std::abs(mu));
  const double rho = std::min(0.75, 0.75 * min_mu);
  auto f = [&cp, &ex, tol](Scalar z) { return OperatorMatrix(resolvent(cp, z, tol) - ex.principal_part(z)); };
  CircleQuadrature q(f, Scalar(0.0, 0.0), rho, 0, j_max, opts.threads);
  ContourOptions local = opts;
  converge(q, local, Scalar(0.0, 0.0));
  std::vector<OperatorMatrix> out;
  for (int j = 0; j <= j_max; ++j) out.push_back(q.coefficient(j));
  return out;
}

double AlgebraResiduals::max() const {
  return std::max({products, identity_left, identity_right, resolvent_equation, idempotency, commutation});
}

AlgebraResiduals laurent_algebra(const CompanionPencil& cp, const LaurentExpansion& ex, const Tolerance& tol,
                                 std::size_t samples, std::uint64_t seed) {
  if (ex.j_max < 3) throw Error(ErrorKind::InvalidInput, "the coefficient identities need j_max >= 3");
  const std::size_t d = cp.big_dim;
  const OperatorMatrix id = identity(d);
  const OperatorMatrix zero = OperatorMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const int lowest = -static_cast<int>(ex.pole_order);
  auto n = [&](int j) -> const OperatorMatrix& { return j < lowest ? zero : ex.coeff(j); };
  auto eta = [](int j) { return j >= 0 ? 1.0 : 0.0; };
  AlgebraResiduals out;
  for (int j = -2; j <= 1; ++j) {
    for (int k = -2; k <= 1; ++k) {
      const OperatorMatrix lhs = n(j) * cp.a1 * n(k);
      const double r = op2(lhs - (1.0 - eta(j) - eta(k)) * n(j + k + 1));
      out.products = std::max(out.products, r);
    }
  }
  for (int j = -2; j <= 0; ++j) {
    const OperatorMatrix target = j == 0 ? id : zero;
    out.identity_left = std::max(out.identity_left, op2(n(j - 1) * cp.a1 - n(j) * (id - cp.a1) - target));
    out.identity_right = std::max(out.identity_right, op2(cp.a1 * n(j - 1) - (id - cp.a1) * n(j) - target));
  }

  const CounterRng rng(seed, 0x5eed);
  const double r = ex.contour.radius;
  for (std::size_t s = 0; s < samples; ++s) {
    auto pick = [&](std::uint64_t c) {
      const double rad = r * (0.25 + 0.65 * rng.uniform(2 * c));
      return Scalar(1.0, 0.0) + std::polar(rad, 2.0 * std::numbers::pi * rng.uniform(2 * c + 1));
    };
    const Scalar z = pick(2 * s);
    const Scalar l = pick(2 * s + 1);
    const OperatorMatrix rz = resolvent(cp, z, tol);
    const OperatorMatrix rl = resolvent(cp, l, tol);
    const double size = std::max(1.0, op2(rz) * op2(rl) * std::abs(z - l) * op2(cp.a1));
    out.resolvent_equation = std::max(out.resolvent_equation, op2(rz - rl - (z - l) * rz * cp.a1 * rl) / size);
  }
  out.idempotency = ex.idempotency_residual;
  out.commutation = ex.commutation_residual;
  out.n_minus1_idempotency = op2(n(-1) * n(-1) - n(-1));
  return out;
}

SweepResult truncation_sweep(const std::function<CompanionPencil(std::size_t)>& builder,
                             const std::vector<std::size_t>& dims, const Tolerance& tol,
                             const ContourOptions& opts) {
  SweepResult out;
  for (std::size_t n : dims) {
    const CompanionPencil cp = builder(n);
    const PoleOrder po = pole_order(cp, tol, opts);
    out.points.push_back({n, po.order, po.nilpotency_index});
  }
  if (out.points.size() < 2) return out;
  bool growing = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    const auto& pt = out.points[i];
    if (i > 0 && !(pt.dim > out.points[i - 1].dim && pt.nilpotency_index > out.points[i - 1].nilpotency_index)) {
      growing = false;
    }
    const double ratio = static_cast<double>(pt.nilpotency_index) / static_cast<double>(pt.dim);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  out.essential_flag = growing && hi <= 1.25 * lo;
  return out;
}

std::vector<double> cesaro_sequence(const OperatorMatrix& g, std::size_t l, std::size_t n_max) {
  const auto d = static_cast<std::size_t>(g.rows());
  OperatorMatrix gl = identity(d);
  for (std::size_t i = 0; i < l; ++i) gl = gl * g;
  const OperatorMatrix step = identity(d) - g;
  std::vector<double> out;
  OperatorMatrix acc = gl;
  for (std::size_t n = 1; n <= n_max; ++n) {
    acc = acc * step;
    out.push_back(op2(acc) / static_cast<double>(n));
  }
  return out;
}

}  // namespace grj
