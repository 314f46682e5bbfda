#include "grj/simkit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "grj/error.hpp"
#include "grj/rng.hpp"

namespace grj {

namespace {

constexpr std::int64_t kTimeOffset = std::int64_t{1} << 32;
constexpr std::size_t kMaxLag = 10000;
constexpr std::size_t kLagDivisor = 32;

double row_norm(const RealVector& v) { return v.norm(); }

// Least-squares slope of ys on xs, returned as weights w with slope = sum w_k y_k.
std::vector<double> slope_weights(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double sxx = 0.0;
  for (double x : xs) sxx += (x - mean) * (x - mean);
  std::vector<double> w;
  for (double x : xs) w.push_back((x - mean) / sxx);
  return w;
}

SlopeResult summarise(const std::vector<double>& q, SlopeMethod method) {
  SlopeResult out;
  out.method = method;
  const double r = static_cast<double>(q.size());
  double mean = 0.0;
  for (double v : q) mean += v;
  mean /= r;
  double ss = 0.0;
  for (double v : q) ss += (v - mean) * (v - mean);
  out.slope = mean;
  out.std_error = std::sqrt(ss / (r - 1.0) / r);
  out.stationary = std::abs(out.slope) <= kSlopeSigmas * out.std_error;
  return out;
}

struct ClassData {
  RepresentationClass cls;
  OperatorMatrix p;
};

RepresentationCheck verify_impl(const CompanionPencil& cp, const SamplePath& path, const ClassData& data,
                                std::size_t j_max, const Tolerance& tol, const ContourOptions& opts) {
  const std::size_t n = cp.dim;
  const std::size_t p = cp.p;
  const std::size_t d = cp.big_dim;
  if (path.dim() != n) throw Error(ErrorKind::InvalidInput, "path dimension differs from the model");
  if (path.initial.size() != p) throw Error(ErrorKind::InvalidInput, "path carries the wrong number of initial values");
  if (path.horizon == 0) throw Error(ErrorKind::InvalidInput, "path horizon must be positive");

  const std::size_t order = pole_order(cp, tol, opts).order;
  const std::size_t expected = data.cls == RepresentationClass::i1 ? 1 : 2;
  if (order != expected) {
    throw Error(ErrorKind::ClassMismatch, std::string("report is ") + to_string(data.cls) +
                                              " but the contour pole order is " + std::to_string(order));
  }

  RepresentationCheck out;
  out.cls = data.cls;
  const OperatorMatrix id = identity(d);
  const OperatorMatrix& e = data.p;
  const OperatorMatrix g =
      data.cls == RepresentationClass::i2 ? OperatorMatrix((id - cp.a1) * e) : OperatorMatrix::Zero(d, d);

  // Companion coefficients C_j = A_1^j (I - P) Pi_p^*, extended until the tail is negligible.
  std::vector<OperatorMatrix> c;
  c.push_back((id - e) * cp.pi_p_star);
  const std::size_t j_fit = std::max<std::size_t>(j_max, 8);
  std::vector<double> norms;
  for (std::size_t j = 0; j <= j_fit; ++j) {
    if (j > 0) c.push_back(cp.a1 * c.back());
    norms.push_back(operator_norm(c.back(), NormKind::two));
  }
  const GeometricDecay decay = fit_geometric_decay(norms);
  std::size_t j_used = j_max;
  if (decay.c > 0.0 && decay.rho > 0.0) {
    if (!decay.decays()) throw Error(ErrorKind::InvariantViolation, "stationary coefficients do not decay");
    const double need = std::ceil(std::log(kTailTarget / decay.c) / std::log(decay.rho));
    if (need > static_cast<double>(j_used)) j_used = static_cast<std::size_t>(std::min(need, double(kMaxLag)));
  }
  while (c.size() <= j_used) c.push_back(cp.a1 * c.back());
  c.resize(j_used + 1);
  out.j_used = j_used;
  out.tail_bound = decay.c * std::pow(decay.rho, static_cast<double>(j_used));

  const auto horizon = static_cast<std::int64_t>(path.horizon);
  const auto jj = static_cast<std::int64_t>(j_used);
  std::vector<Vector> eps(static_cast<std::size_t>(horizon + jj + 1));
  for (std::int64_t t = -jj; t <= horizon; ++t) eps[static_cast<std::size_t>(t + jj)] = path.innovation(t).cast<Scalar>();
  auto eps_at = [&](std::int64_t t) -> const Vector& { return eps[static_cast<std::size_t>(t + jj)]; };

  Vector y0(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < p; ++k) {
    y0.segment(static_cast<Eigen::Index>(k * n), static_cast<Eigen::Index>(n)) = path.initial[k].cast<Scalar>();
  }

  auto nu = [&](std::int64_t t) {
    Vector acc = Vector::Zero(static_cast<Eigen::Index>(d));
    for (std::int64_t j = 0; j <= jj; ++j) acc += c[static_cast<std::size_t>(j)] * eps_at(t - j);
    return acc;
  };

  const OperatorMatrix lr_e = cp.pi_p * e * cp.pi_p_star;
  const OperatorMatrix lr_g = cp.pi_p * g * cp.pi_p_star;
  Vector transient = (id - e) * y0 - nu(0);
  Vector s1 = Vector::Zero(static_cast<Eigen::Index>(n));
  Vector s2 = Vector::Zero(static_cast<Eigen::Index>(n));
  std::vector<RealVector> resid;
  std::vector<RealVector> formula;
  resid.reserve(path.horizon + 1);
  for (std::int64_t t = 0; t <= horizon; ++t) {
    if (t > 0) {
      s2 += s1;
      s1 += eps_at(t);
    }
    const Vector f = lr_e * s1 - lr_g * s2 + cp.pi_p * (nu(t) + transient);
    transient = cp.a1 * transient;
    const RealVector x = path.state(static_cast<std::size_t>(t));
    out.max_state_norm = std::max(out.max_state_norm, row_norm(x));
    formula.push_back(f.real());
    resid.push_back(x - f.real());
  }

  // tau fit on the first max(p, 3) points.
  const std::size_t k_fit = std::min<std::size_t>(std::max<std::size_t>(p, 3), resid.size());
  out.tau0 = RealVector::Zero(static_cast<Eigen::Index>(n));
  out.tau1 = RealVector::Zero(static_cast<Eigen::Index>(n));
  if (data.cls == RepresentationClass::i1 || k_fit < 2) {
    for (std::size_t t = 0; t < k_fit; ++t) out.tau0 += resid[t];
    out.tau0 /= static_cast<double>(k_fit);
  } else {
    RealMatrix design(static_cast<Eigen::Index>(k_fit), 2);
    RealMatrix rhs(static_cast<Eigen::Index>(k_fit), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < k_fit; ++t) {
      design(static_cast<Eigen::Index>(t), 0) = 1.0;
      design(static_cast<Eigen::Index>(t), 1) = static_cast<double>(t);
      rhs.row(static_cast<Eigen::Index>(t)) = resid[t].transpose();
    }
    const RealMatrix coef = design.colPivHouseholderQr().solve(rhs);
    out.tau0 = coef.row(0).transpose();
    out.tau1 = coef.row(1).transpose();
  }
  for (std::size_t t = 0; t < resid.size(); ++t) {
    const RealVector r = resid[t] - out.tau0 - static_cast<double>(t) * out.tau1;
    out.max_residual = std::max(out.max_residual, r.norm());
  }
  out.tau0_exact = (cp.pi_p * e * y0).real();
  out.tau1_exact = -(cp.pi_p * g * y0).real();
  out.threshold = kRepresentationRel * (1.0 + out.max_state_norm);
  out.passes = out.max_residual <= out.threshold;

  // A(L) applied to the formula-built path.
  const std::vector<RealMatrix> a = real_coefficients(delinearize(cp));
  for (std::size_t t = p; t < formula.size(); ++t) {
    auto z = [&](std::size_t s) { return RealVector(formula[s] + out.tau0 + static_cast<double>(s) * out.tau1); };
    RealVector v = z(t);
    for (std::size_t j = 1; j <= p; ++j) v -= a[j - 1] * z(t - j);
    out.filter_residual = std::max(out.filter_residual, (v - path.innovation(static_cast<std::int64_t>(t))).norm());
  }
  return out;
}

}  // namespace

RealVector SamplePath::state(std::size_t t) const {
  if (t == 0) return initial.at(0);
  if (t > horizon) throw Error(ErrorKind::InvalidInput, "time index beyond the horizon");
  return states.row(static_cast<Eigen::Index>(t - 1)).transpose();
}

RealVector SamplePath::innovation(std::int64_t t) const {
  if (t >= 1 && t <= static_cast<std::int64_t>(horizon)) {
    return innovations.row(static_cast<Eigen::Index>(t - 1)).transpose();
  }
  return cov_factor * standard_innovation(seed, stream, t, dim());
}

RealMatrix covariance_factor(const OperatorMatrix& cov, const Tolerance& tol) {
  if (cov.rows() == 0 || cov.rows() != cov.cols()) throw Error(ErrorKind::InvalidInput, "covariance must be square");
  const DefiniteCheck dc = definiteness(cov, tol);
  const double scale = std::max(1.0, dc.max_eigenvalue);
  if (dc.asymmetry > tol.residual_abs * scale || dc.min_eigenvalue < -tol.residual_abs * scale) {
    throw Error(ErrorKind::InvalidInput, "covariance must be symmetric positive semidefinite");
  }
  const RealMatrix sym = 0.5 * (cov.real() + cov.real().transpose());
  if (dc.positive_definite) {
    Eigen::LLT<RealMatrix> llt(sym);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);
  const RealVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

RealVector standard_innovation(std::uint64_t seed, std::uint64_t stream, std::int64_t t, std::size_t n) {
  const CounterRng rng(seed, stream);
  const auto base = static_cast<std::uint64_t>(t + kTimeOffset) * static_cast<std::uint64_t>(n);
  RealVector z(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) z[static_cast<Eigen::Index>(i)] = rng.gaussian(base + i);
  return z;
}

std::vector<RealMatrix> real_coefficients(const ArPencil& ar) {
  std::vector<RealMatrix> out;
  for (const auto& a : ar.coeffs) {
    if (a.imag().norm() > 1e-14 * std::max(1.0, a.real().norm())) {
      throw Error(ErrorKind::InvalidInput, "simulation needs real AR coefficients");
    }
    out.push_back(a.real());
  }
  return out;
}

SamplePath simulate_ar(const ArPencil& ar, const OperatorMatrix& cov, std::size_t horizon, std::uint64_t seed,
                       const std::vector<RealVector>& initial, std::uint64_t stream, const std::string& model_id) {
  ar.validate();
  if (horizon == 0) throw Error(ErrorKind::InvalidInput, "horizon must be at least 1");
  const std::size_t n = ar.dim;
  const std::size_t p = ar.p;
  if (static_cast<std::size_t>(cov.rows()) != n) throw Error(ErrorKind::InvalidInput, "covariance dimension differs");
  const std::vector<RealMatrix> a = real_coefficients(ar);

  SamplePath path;
  path.model_id = model_id;
  path.seed = seed;
  path.stream = stream;
  path.horizon = horizon;
  path.cov_factor = covariance_factor(cov, default_tolerance());
  if (initial.empty()) {
    path.initial.assign(p, RealVector::Zero(static_cast<Eigen::Index>(n)));
  } else {
    if (initial.size() != p) throw Error(ErrorKind::InvalidInput, "need exactly p initial vectors");
    for (const auto& v : initial) {
      if (static_cast<std::size_t>(v.size()) != n || !v.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "initial vector has the wrong length or is not finite");
      }
    }
    path.initial = initial;
  }
  const auto rows = static_cast<Eigen::Index>(horizon);
  const auto cols = static_cast<Eigen::Index>(n);
  path.states.resize(rows, cols);
  path.innovations.resize(rows, cols);

  std::vector<RealVector> hist = path.initial;  // hist[j] = X_{t-1-j}
  for (std::size_t t = 1; t <= horizon; ++t) {
    const RealVector e = path.cov_factor * standard_innovation(seed, stream, static_cast<std::int64_t>(t), n);
    RealVector x = e;
    for (std::size_t j = 0; j < p; ++j) x += a[j] * hist[j];
    path.innovations.row(static_cast<Eigen::Index>(t - 1)) = e.transpose();
    path.states.row(static_cast<Eigen::Index>(t - 1)) = x.transpose();
    for (std::size_t j = p; j-- > 1;) hist[j] = hist[j - 1];
    hist[0] = x;
  }
  return path;
}

std::vector<SamplePath> simulate_ensemble(const ArPencil& ar, const OperatorMatrix& cov, std::size_t horizon,
                                          std::uint64_t seed, std::size_t replications, unsigned threads,
                                          const std::vector<RealVector>& initial, const std::string& model_id) {
  std::vector<SamplePath> out(replications);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    for (std::size_t r = next++; r < replications; r = next++) {
      try {
        out[r] = simulate_ar(ar, cov, horizon, seed, initial, r, model_id);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned k = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(replications, 1))));
  if (k == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < k; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

bool identical_paths(const SamplePath& a, const SamplePath& b) {
  if (a.horizon != b.horizon || a.dim() != b.dim() || a.initial.size() != b.initial.size()) return false;
  if (a.states.rows() != b.states.rows() || a.states.cols() != b.states.cols()) return false;
  if (!(a.states.array() == b.states.array()).all()) return false;
  if (!(a.innovations.array() == b.innovations.array()).all()) return false;
  for (std::size_t k = 0; k < a.initial.size(); ++k) {
    if (!(a.initial[k].array() == b.initial[k].array()).all()) return false;
  }
  return true;
}

const char* to_string(RepresentationClass c) noexcept { return c == RepresentationClass::i1 ? "I(1)" : "I(2)"; }

RepresentationCheck verify_representation(const CompanionPencil& cp, const SamplePath& path, const I1Report& rep,
                                          std::size_t j_max, const Tolerance& tol, const ContourOptions& opts) {
  if (!rep.holds) throw Error(ErrorKind::NotI1, "the I(1) condition does not hold");
  return verify_impl(cp, path, {RepresentationClass::i1, rep.p_operator}, j_max, tol, opts);
}

RepresentationCheck verify_representation(const CompanionPencil& cp, const SamplePath& path, const I2Report& rep,
                                          std::size_t j_max, const Tolerance& tol, const ContourOptions& opts) {
  if (!rep.holds) throw Error(ErrorKind::NotI2, "the I(2) condition does not hold");
  return verify_impl(cp, path, {RepresentationClass::i2, rep.p_op}, j_max, tol, opts);
}

const char* to_string(SlopeMethod m) noexcept { return m == SlopeMethod::variogram ? "variogram" : "endpoints"; }

SlopeMethod parse_slope_method(const std::string& text) {
  if (text == "variogram") return SlopeMethod::variogram;
  if (text == "endpoints") return SlopeMethod::endpoints;
  throw Error(ErrorKind::InvalidInput, "unknown slope method '" + text + "'");
}

SlopeResult stationarity_slope(const std::vector<std::vector<double>>& series, SlopeMethod method) {
  if (series.size() < kMinReplications) {
    throw Error(ErrorKind::InvalidInput, "stationarity_slope needs at least " + std::to_string(kMinReplications) +
                                             " replications");
  }
  const std::size_t len = series.front().size();
  for (const auto& s : series) {
    if (s.size() != len) throw Error(ErrorKind::InvalidInput, "replications have different lengths");
  }
  if (len < 17) throw Error(ErrorKind::InvalidInput, "series too short for the slope test");
  const std::size_t horizon = len - 1;
  const std::size_t reps = series.size();
  std::vector<double> q(reps, 0.0);

  if (method == SlopeMethod::endpoints) {
    std::vector<std::size_t> times;
    for (std::size_t k = 1; k <= 4; ++k) times.push_back(k * horizon / 4);
    std::vector<double> xs(times.begin(), times.end());
    const std::vector<double> w = slope_weights(xs);
    const double bessel = static_cast<double>(reps) / static_cast<double>(reps - 1);
    for (std::size_t k = 0; k < times.size(); ++k) {
      double mean = 0.0;
      for (const auto& s : series) mean += s[times[k]];
      mean /= static_cast<double>(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        const double dev = series[r][times[k]] - mean;
        q[r] += w[k] * dev * dev * bessel;
      }
    }
  } else {
    std::vector<std::size_t> lags;
    for (std::size_t k = 1; k <= 4; ++k) lags.push_back(std::max<std::size_t>(1, k * horizon / kLagDivisor));
    std::vector<double> xs(lags.begin(), lags.end());
    const std::vector<double> w = slope_weights(xs);
    const std::size_t start = horizon / 4;
    for (std::size_t k = 0; k < lags.size(); ++k) {
      const std::size_t h = lags[k];
      const std::size_t count = horizon - h - start + 1;
      for (std::size_t r = 0; r < reps; ++r) {
        double acc = 0.0;
        for (std::size_t t = start; t + h <= horizon; ++t) {
          const double dx = series[r][t + h] - series[r][t];
          acc += dx * dx;
        }
        q[r] += w[k] * acc / static_cast<double>(count);
      }
    }
  }
  return summarise(q, method);
}

std::vector<std::vector<double>> functional_series(const std::vector<SamplePath>& paths, const RealVector& f,
                                                   bool difference) {
  std::vector<std::vector<double>> out;
  out.reserve(paths.size());
  for (const auto& path : paths) {
    if (static_cast<std::size_t>(f.size()) != path.dim()) {
      throw Error(ErrorKind::InvalidInput, "functional length differs from the path dimension");
    }
    std::vector<double> s;
    s.reserve(path.horizon + 1);
    double prev = f.dot(path.state(0));
    if (!difference) s.push_back(prev);
    for (std::size_t t = 1; t <= path.horizon; ++t) {
      const double v = f.dot(path.states.row(static_cast<Eigen::Index>(t - 1)).transpose());
      s.push_back(difference ? v - prev : v);
      prev = v;
    }
    out.push_back(std::move(s));
  }
  return out;
}

CointegrationProbe cointegration_probe(const std::vector<SamplePath>& paths, const CointegrationReport& rep,
                                       const Tolerance& tol, SlopeMethod method) {
  CointegrationProbe out;
  const OperatorMatrix& omega = rep.long_run_cov;
  const Eigen::Index n = omega.rows();
  const double scale = std::max(1.0, operator_norm(omega, NormKind::two));
  const RealMatrix coint = real_form(rep.cointegrating, tol).basis().real();
  for (Eigen::Index j = 0; j < coint.cols(); ++j) {
    ProbeItem item;
    item.functional = coint.col(j);
    item.result = stationarity_slope(functional_series(paths, item.functional), method);
    out.cointegrating.push_back(std::move(item));
  }
  std::vector<RealVector> loaded;
  const RealMatrix comp = real_form(orthogonal_complement(rep.cointegrating, tol), tol).basis().real();
  for (Eigen::Index j = 0; j < comp.cols(); ++j) loaded.push_back(comp.col(j));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (omega(i, i).real() > tol.rank_rel * scale) loaded.push_back(RealVector::Unit(n, i));
  }
  for (auto& f : loaded) {
    LoadedItem item;
    item.expected = (f.transpose() * omega.real() * f)(0, 0);
    item.result = stationarity_slope(functional_series(paths, f), method);
    item.relative_error = std::abs(item.result.slope - item.expected) / item.expected;
    item.functional = std::move(f);
    out.loaded.push_back(std::move(item));
  }
  return out;
}

RealMatrix left_null_rows(const OperatorMatrix& m, const Tolerance& tol) {
  const Subspace k = real_form(kernel_basis(m.transpose(), tol), tol);
  return k.basis().real().transpose();
}

PolynomialProbe polynomial_cointegration_probe(const std::vector<SamplePath>& paths, const I2Report& rep,
                                               const Tolerance& tol, SlopeMethod method) {
  if (!rep.holds) throw Error(ErrorKind::NotI2, "the I(2) condition does not hold");
  const OperatorMatrix& lr2 = rep.long_run2;
  const OperatorMatrix lr_p = rep.long_run1 - rep.long_run2;  // Pi_p P Pi_p^*
  const auto n = lr2.rows();
  OperatorMatrix both(n, 2 * n);
  both << lr2, lr_p;

  const Subspace t1 = real_form(kernel_basis(lr2.transpose(), tol), tol);
  const Subspace t0 = real_form(kernel_basis(both.transpose(), tol), tol);
  const Subspace only = real_form(complement_within(t0, t1, tol), tol);
  const Subspace outside = real_form(orthogonal_complement(t1, tol), tol);

  PolynomialProbe out;
  out.tier1 = t1.basis().real().transpose();
  out.tier0 = t0.basis().real().transpose();
  auto run = [&](const Subspace& s, bool difference) {
    std::vector<ProbeItem> items;
    for (Eigen::Index j = 0; j < s.basis().cols(); ++j) {
      ProbeItem item;
      item.functional = s.basis().col(j).real();
      item.result = stationarity_slope(functional_series(paths, item.functional, difference), method);
      items.push_back(std::move(item));
    }
    return items;
  };
  out.differences_tier1 = run(t1, true);
  out.levels_tier0 = run(t0, false);
  out.levels_tier1_only = run(only, false);
  out.differences_outside = run(outside, true);

  auto all = [](const std::vector<ProbeItem>& v, bool stationary) {
    return std::all_of(v.begin(), v.end(), [&](const ProbeItem& i) { return i.result.stationary == stationary; });
  };
  out.two_tier = all(out.differences_tier1, true) && all(out.levels_tier0, true) &&
                 all(out.levels_tier1_only, false) && all(out.differences_outside, false);
  return out;
}

}  // namespace grj
