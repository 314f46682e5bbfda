#include "grj/models.hpp"

#include <algorithm>
#include <cmath>

#include "grj/error.hpp"
#include "grj/rng.hpp"

namespace grj {

namespace {

Eigen::MatrixXd gaussian_matrix(const CounterRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  std::uint64_t c = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.gaussian(c++);
  }
  return m;
}

Eigen::MatrixXd random_orthogonal(const CounterRng& rng, Eigen::Index n) {
  const Eigen::MatrixXd g = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  // Sign fix makes the draw Haar-distributed and independent of the QR variant.
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

void require_dim(std::size_t n, std::size_t min, const char* what) {
  if (n < min) throw Error(ErrorKind::InvalidInput, std::string(what) + ": truncation size too small");
}

// Unit root, I(1) direct sum, and all other eigenvalues inside |lambda| <= 0.8.
bool well_posed_i1(const ArPencil& ar, std::size_t expected_unit) {
  const Tolerance tol;
  const CompanionPencil cp = linearize(ar);
  const SpectrumReport rep = spectrum_report(cp, kDefaultEta, tol);
  if (!rep.unit_root_ok || rep.unit_multiplicity != expected_unit) return false;
  for (const auto& z : rep.others) {
    if (std::abs(z) < 1.25) return false;
  }
  const OperatorMatrix m = identity(cp.big_dim) - cp.a1;
  return direct_sum_check(range_basis(m, tol), kernel_basis(m, tol), tol).holds;
}

}  // namespace

ArPencil model_c0(std::size_t n, double lambda) {
  require_dim(n, 3, "ex-c0");
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidInput, "ex-c0: lambda must lie in (0, 1)");
  const auto k = static_cast<Eigen::Index>(n);
  OperatorMatrix a = OperatorMatrix::Zero(k, k);
  a(0, 0) = 1.0;
  a(1, 0) = 1.0;
  a(1, 1) = 1.0;
  for (Eigen::Index j = 2; j < k; ++j) a(j, j) = std::pow(lambda, static_cast<double>(j - 1));
  return ar1(a, NormKind::sup);
}

ArPencil model_volterra(std::size_t n) {
  require_dim(n, 1, "ex-volterra");
  const auto k = static_cast<Eigen::Index>(n);
  const double h = 1.0 / static_cast<double>(n);
  OperatorMatrix v = OperatorMatrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) v(i, j) = h;
  }
  return ar1(identity(n) - v, NormKind::two);
}

ArPencil model_selfadjoint(std::size_t n, std::size_t unit_dim, std::uint64_t seed) {
  require_dim(n, 2, "ex-selfadjoint");
  if (unit_dim < 1 || unit_dim >= n) throw Error(ErrorKind::InvalidInput, "ex-selfadjoint: need 1 <= unit_dim < n");
  const auto k = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd q = random_orthogonal(CounterRng(seed, 0x5e1fU), k);
  Eigen::VectorXd d(k);
  const std::size_t rest = n - unit_dim;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < unit_dim) {
      d[static_cast<Eigen::Index>(i)] = 1.0;
    } else {
      const double t = rest == 1 ? 0.5 : static_cast<double>(i - unit_dim) / static_cast<double>(rest - 1);
      d[static_cast<Eigen::Index>(i)] = -0.6 + 1.2 * t;
    }
  }
  Eigen::MatrixXd a = q * d.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose());
  return ar1(a.cast<Scalar>(), NormKind::two);
}

ArPencil model_evenodd(std::size_t n) {
  require_dim(n, 2, "ex-evenodd");
  const auto k = static_cast<Eigen::Index>(n);
  OperatorMatrix a = OperatorMatrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    a(i, i) += 0.5;
    a(i, k - 1 - i) += 0.5;
  }
  return ar1(a, NormKind::two);
}

JordanModel build_jordan(const JordanSpec& spec) {
  if (!(spec.cond >= 1.0)) throw Error(ErrorKind::InvalidInput, "jordan: condition number must be >= 1");
  std::size_t n = spec.stable.size();
  for (std::size_t b : spec.unit_blocks) {
    if (b < 1) throw Error(ErrorKind::InvalidInput, "jordan: block sizes must be positive");
    n += b;
  }
  require_dim(n, 1, "jordan");
  const auto k = static_cast<Eigen::Index>(n);
  JordanModel out;
  out.spec = spec;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(k, k);
  Eigen::Index pos = 0;
  for (std::size_t b : spec.unit_blocks) {
    for (std::size_t i = 0; i < b; ++i) {
      j(pos + static_cast<Eigen::Index>(i), pos + static_cast<Eigen::Index>(i)) = 1.0;
      if (i + 1 < b) j(pos + static_cast<Eigen::Index>(i), pos + static_cast<Eigen::Index>(i) + 1) = 1.0;
    }
    pos += static_cast<Eigen::Index>(b);
    out.max_block = std::max(out.max_block, b);
    out.unit_dim += b;
  }
  for (double lam : spec.stable) {
    j(pos, pos) = lam;
    ++pos;
  }
  const Eigen::MatrixXd u = random_orthogonal(CounterRng(spec.seed, 1), k);
  const Eigen::MatrixXd v = random_orthogonal(CounterRng(spec.seed, 2), k);
  Eigen::VectorXd sigma(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double t = k == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(k - 1);
    sigma[i] = std::pow(spec.cond, t);
  }
  const Eigen::MatrixXd s = u * sigma.asDiagonal() * v.transpose();
  const Eigen::MatrixXd s_inv = v * sigma.cwiseInverse().asDiagonal() * u.transpose();
  out.s = s.cast<Scalar>();
  out.s_inv = s_inv.cast<Scalar>();
  out.jordan = j.cast<Scalar>();
  out.a1 = (s * j * s_inv).cast<Scalar>();
  return out;
}

JordanSpec random_jordan_spec(std::uint64_t seed) {
  const CounterRng rng(seed, 0x1048dU);
  std::uint64_t c = 0;
  auto pick = [&](std::size_t lo, std::size_t hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    return lo + std::min(hi - lo, static_cast<std::size_t>(rng.uniform(c++) * span));
  };
  JordanSpec spec;
  spec.seed = seed;
  const std::size_t blocks = pick(1, 3);
  for (std::size_t i = 0; i < blocks; ++i) spec.unit_blocks.push_back(pick(1, 3));
  const std::size_t stable = pick(1, 4);
  for (std::size_t i = 0; i < stable; ++i) spec.stable.push_back(-0.8 + 1.6 * rng.uniform(c++));
  spec.cond = std::pow(10.0, 3.0 * rng.uniform(c++));
  return spec;
}

ArPencil fixture_random_walk(std::size_t n) { return ar1(identity(n), NormKind::two); }

ArPencil fixture_oblique_ar1() {
  OperatorMatrix a(2, 2);
  a << 1.0, 0.0, 1.0, 0.0;
  return ar1(a, NormKind::two);
}

ArPencil fixture_ar2_i1(std::uint64_t seed) {
  const Eigen::Index n = 3;
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    const CounterRng rng(seed, 0xa2000U + attempt);
    const Eigen::MatrixXd g = gaussian_matrix(rng, n, 2 * n + 2);
    const Eigen::MatrixXd alpha = 0.5 * g.col(0);
    const Eigen::MatrixXd beta = 0.5 * g.col(1);
    const Eigen::MatrixXd gamma = 0.3 * g.middleCols(2, n);
    const Eigen::MatrixXd a1 = Eigen::MatrixXd::Identity(n, n) + alpha * beta.transpose() + gamma;
    const Eigen::MatrixXd a2 = -gamma;
    ArPencil ar = make_ar_pencil({a1.cast<Scalar>(), a2.cast<Scalar>()}, NormKind::two);
    if (well_posed_i1(ar, static_cast<std::size_t>(n - 1))) return ar;
  }
  throw Error(ErrorKind::InvalidInput, "fx-ar2-i1: no admissible draw for this seed");
}

ArPencil fixture_ar3_i1(std::uint64_t seed) {
  const Eigen::Index n = 2;
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    const CounterRng rng(seed, 0xa3000U + attempt);
    const Eigen::MatrixXd g = gaussian_matrix(rng, n, 3 * n + 2);
    const Eigen::MatrixXd alpha = 0.5 * g.col(0);
    const Eigen::MatrixXd beta = 0.5 * g.col(1);
    const Eigen::MatrixXd g1 = 0.3 * g.middleCols(2, n);
    const Eigen::MatrixXd g2 = 0.2 * g.middleCols(2 + n, n);
    const Eigen::MatrixXd a1 = Eigen::MatrixXd::Identity(n, n) + alpha * beta.transpose() + g1;
    const Eigen::MatrixXd a2 = g2 - g1;
    const Eigen::MatrixXd a3 = -g2;
    ArPencil ar = make_ar_pencil({a1.cast<Scalar>(), a2.cast<Scalar>(), a3.cast<Scalar>()}, NormKind::two);
    if (well_posed_i1(ar, static_cast<std::size_t>(n - 1))) return ar;
  }
  throw Error(ErrorKind::InvalidInput, "fx-ar3-i1: no admissible draw for this seed");
}

ArPencil fixture_ar2_i2() {
  OperatorMatrix a1(1, 1);
  OperatorMatrix a2(1, 1);
  a1(0, 0) = 2.0;
  a2(0, 0) = -1.0;
  return make_ar_pencil({a1, a2}, NormKind::two);
}

JordanModel fixture_jordan_i2(std::uint64_t seed) {
  JordanSpec spec;
  spec.unit_blocks = {2};
  spec.stable = {0.5};
  spec.cond = 5.0;
  spec.seed = seed;
  return build_jordan(spec);
}

std::vector<std::string> builtin_ids() {
  return {"ex-c0",          "ex-volterra",     "ex-selfadjoint", "ex-evenodd",   "ex-jordan",    "fx-random-walk",
          "fx-oblique-ar1", "fx-ar2-i1",       "fx-ar3-i1",      "fx-ar2-i2",    "fx-jordan-i2"};
}

bool is_builtin(const std::string& id) {
  const auto ids = builtin_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

BuiltinModel builtin_model(const std::string& id, const BuiltinParams& params) {
  BuiltinModel m;
  m.id = id;
  auto n_or = [&](std::size_t def) { return params.n == 0 ? def : params.n; };
  if (id == "ex-c0") {
    m.ar = model_c0(n_or(8), params.lambda);
    m.description = "c0 sequence operator with a second-order pole at 1";
  } else if (id == "ex-volterra") {
    m.ar = model_volterra(n_or(8));
    m.description = "identity minus discretised Volterra integration";
  } else if (id == "ex-selfadjoint") {
    m.ar = model_selfadjoint(n_or(8), 2, params.seed);
    m.description = "symmetric operator with isolated unit eigenvalue";
  } else if (id == "ex-evenodd") {
    m.ar = model_evenodd(n_or(16));
    m.description = "reflection averaging onto even functions";
  } else if (id == "ex-jordan") {
    m.ar = ar1(build_jordan(random_jordan_spec(params.seed)).a1, NormKind::two);
    m.description = "seeded planted Jordan structure at 1";
  } else if (id == "fx-random-walk") {
    m.ar = fixture_random_walk(n_or(2));
    m.description = "multivariate random walk";
  } else if (id == "fx-oblique-ar1") {
    m.ar = fixture_oblique_ar1();
    m.description = "AR(1) with an oblique idempotent coefficient";
  } else if (id == "fx-ar2-i1") {
    m.ar = fixture_ar2_i1(params.seed == 1 ? 11 : params.seed);
    m.description = "seeded cointegrated AR(2), one cointegrating relation";
  } else if (id == "fx-ar3-i1") {
    m.ar = fixture_ar3_i1(params.seed == 1 ? 13 : params.seed);
    m.description = "seeded cointegrated AR(3)";
  } else if (id == "fx-ar2-i2") {
    m.ar = fixture_ar2_i2();
    m.description = "scalar doubly integrated AR(2)";
  } else if (id == "fx-jordan-i2") {
    m.ar = ar1(fixture_jordan_i2(params.seed == 1 ? 5 : params.seed).a1, NormKind::two);
    m.description = "one J_2(1) block plus a stable eigenvalue";
  } else {
    throw Error(ErrorKind::InvalidInput, "unknown built-in model '" + id + "'");
  }
  const auto n = static_cast<Eigen::Index>(m.ar.dim);
  m.cov = OperatorMatrix::Identity(n, n);
  if (id == "fx-ar2-i1") {
    m.cov(0, 1) = m.cov(1, 0) = 0.3;
    m.cov(1, 2) = m.cov(2, 1) = 0.2;
  }
  return m;
}

}  // namespace grj
