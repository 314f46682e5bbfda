#include "grj/numfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "grj/error.hpp"

namespace grj {

namespace {

std::mutex g_tol_mutex;
Tolerance g_default_tol{};

Eigen::VectorXd singular_values(const OperatorMatrix& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<OperatorMatrix> svd(m);
  return svd.singularValues();
}

std::size_t count_above(const Eigen::VectorXd& sv, double cutoff) {
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++r;
  }
  return r;
}

double rel_cutoff(const Eigen::VectorXd& sv, const Tolerance& tol) {
  if (sv.size() == 0) return 0.0;
  return tol.rank_rel * sv[0];
}

// Two passes of modified Gram-Schmidt; columns are assumed independent.
OperatorMatrix gram_schmidt(const OperatorMatrix& cols) {
  OperatorMatrix q = cols;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const Scalar c = q.col(i).dot(q.col(j));
        q.col(j) -= c * q.col(i);
      }
    }
    q.col(j) /= q.col(j).norm();
  }
  return q;
}

void require_same_ambient(const Subspace& u, const Subspace& w) {
  if (u.ambient_dim() != w.ambient_dim()) {
    throw Error(ErrorKind::InvalidInput, "subspaces live in different ambient spaces");
  }
}

// Rank of B^k with a rounding floor derived from |B|^k.
std::size_t power_rank(const OperatorMatrix& bk, const Eigen::MatrixXd& abs_bk, std::size_t k,
                       const Tolerance& tol) {
  const Eigen::VectorXd sv = singular_values(bk);
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  const double n = static_cast<double>(bk.rows());
  const double eps = std::numeric_limits<double>::epsilon();
  const double abs_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(abs_bk).singularValues()[0];
  const double floor = 10.0 * static_cast<double>(k) * n * eps * abs_norm;
  return count_above(sv, std::max(rel_cutoff(sv, tol), floor));
}

}  // namespace

void Tolerance::validate() const {
  if (!(rank_rel > 0.0) || !(rank_rel < 1.0) || !std::isfinite(rank_rel)) {
    throw Error(ErrorKind::InvalidInput, "rank_rel must lie in (0, 1)");
  }
  if (!(residual_abs > 0.0) || !std::isfinite(residual_abs)) {
    throw Error(ErrorKind::InvalidInput, "residual_abs must be positive");
  }
}

Tolerance default_tolerance() {
  std::lock_guard<std::mutex> lock(g_tol_mutex);
  return g_default_tol;
}

void set_default_tolerance(const Tolerance& tol) {
  tol.validate();
  std::lock_guard<std::mutex> lock(g_tol_mutex);
  g_default_tol = tol;
}

NormKind parse_norm_kind(std::string_view text) {
  if (text == "one") return NormKind::one;
  if (text == "two") return NormKind::two;
  if (text == "sup") return NormKind::sup;
  throw Error(ErrorKind::InvalidInput, "unknown norm '" + std::string(text) + "'");
}

std::string_view to_string(NormKind kind) noexcept {
  switch (kind) {
    case NormKind::one: return "one";
    case NormKind::two: return "two";
    case NormKind::sup: return "sup";
  }
  return "two";
}

Subspace Subspace::span(const OperatorMatrix& columns, const Tolerance& tol, double reference) {
  const auto n = static_cast<std::size_t>(columns.rows());
  if (columns.cols() == 0) return zero(n);
  require_finite(columns, "subspace spanning set");
  Eigen::JacobiSVD<OperatorMatrix> svd(columns, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv[0] == 0.0) return zero(n);
  const std::size_t r = count_above(sv, std::max(rel_cutoff(sv, tol), tol.rank_rel * reference));
  if (r == static_cast<std::size_t>(columns.cols())) return Subspace(n, gram_schmidt(columns));
  return Subspace(n, svd.matrixU().leftCols(static_cast<Eigen::Index>(r)));
}

Subspace Subspace::zero(std::size_t ambient) {
  return Subspace(ambient, OperatorMatrix(static_cast<Eigen::Index>(ambient), 0));
}

Subspace Subspace::full(std::size_t ambient) { return Subspace(ambient, identity(ambient)); }

Subspace Subspace::from_orthonormal(OperatorMatrix orthonormal) {
  const auto n = static_cast<std::size_t>(orthonormal.rows());
  return Subspace(n, std::move(orthonormal));
}

OperatorMatrix Subspace::orthogonal_projector() const { return basis_ * basis_.adjoint(); }

double Subspace::membership_residual(const OperatorMatrix& columns) const {
  if (columns.cols() == 0) return 0.0;
  const OperatorMatrix r = columns - basis_ * (basis_.adjoint() * columns);
  return r.colwise().norm().maxCoeff();
}

OperatorMatrix identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return OperatorMatrix::Identity(k, k);
}

bool all_finite(const OperatorMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

void require_finite(const OperatorMatrix& m, std::string_view what) {
  if (!all_finite(m)) throw Error(ErrorKind::InvalidInput, std::string(what) + " has non-finite entries");
}

double vector_norm(const Vector& x, NormKind norm) {
  if (x.size() == 0) return 0.0;
  switch (norm) {
    case NormKind::one: return x.cwiseAbs().sum();
    case NormKind::two: return x.norm();
    case NormKind::sup: return x.cwiseAbs().maxCoeff();
  }
  return x.norm();
}

double operator_norm(const OperatorMatrix& m, NormKind norm) {
  if (m.size() == 0) return 0.0;
  switch (norm) {
    case NormKind::one: return m.cwiseAbs().colwise().sum().maxCoeff();
    case NormKind::sup: return m.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::two: return singular_values(m)[0];
  }
  return singular_values(m)[0];
}

double dual_norm(const RowFunctional& f, NormKind norm) {
  if (f.size() == 0) return 0.0;
  switch (norm) {
    case NormKind::one: return f.cwiseAbs().maxCoeff();
    case NormKind::two: return f.norm();
    case NormKind::sup: return f.cwiseAbs().sum();
  }
  return f.norm();
}

std::size_t numerical_rank(const OperatorMatrix& m, const Tolerance& tol) {
  const Eigen::VectorXd sv = singular_values(m);
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  return count_above(sv, rel_cutoff(sv, tol));
}

Subspace kernel_basis(const OperatorMatrix& m, const Tolerance& tol) {
  const auto n = static_cast<std::size_t>(m.cols());
  if (m.rows() == 0) return Subspace::full(n);
  require_finite(m, "matrix");
  Eigen::JacobiSVD<OperatorMatrix> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return Subspace::full(n);
  const std::size_t r = count_above(sv, rel_cutoff(sv, tol));
  return Subspace::from_orthonormal(svd.matrixV().rightCols(static_cast<Eigen::Index>(n - r)));
}

Subspace range_basis(const OperatorMatrix& m, const Tolerance& tol) {
  const auto n = static_cast<std::size_t>(m.rows());
  if (m.cols() == 0) return Subspace::zero(n);
  require_finite(m, "matrix");
  Eigen::JacobiSVD<OperatorMatrix> svd(m, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv[0] == 0.0) return Subspace::zero(n);
  const std::size_t r = count_above(sv, rel_cutoff(sv, tol));
  return Subspace::from_orthonormal(svd.matrixU().leftCols(static_cast<Eigen::Index>(r)));
}

Subspace subspace_sum(const Subspace& u, const Subspace& w, const Tolerance& tol) {
  require_same_ambient(u, w);
  OperatorMatrix cat(static_cast<Eigen::Index>(u.ambient_dim()), u.basis().cols() + w.basis().cols());
  cat << u.basis(), w.basis();
  return Subspace::span(cat, tol, 1.0);
}

Subspace intersection(const Subspace& u, const Subspace& w, const Tolerance& tol) {
  require_same_ambient(u, w);
  const std::size_t n = u.ambient_dim();
  if (u.is_zero() || w.is_zero()) return Subspace::zero(n);
  OperatorMatrix cat(static_cast<Eigen::Index>(n), u.basis().cols() + w.basis().cols());
  cat << u.basis(), -w.basis();
  const Subspace coeffs = kernel_basis(cat, tol);
  if (coeffs.is_zero()) return Subspace::zero(n);
  return Subspace::span(u.basis() * coeffs.basis().topRows(u.basis().cols()), tol, 1.0);
}

Subspace orthogonal_complement(const Subspace& u, const Tolerance& tol) {
  if (u.is_zero()) return Subspace::full(u.ambient_dim());
  return kernel_basis(u.basis().adjoint(), tol);
}

Subspace complement_within(const Subspace& inner, const Subspace& outer, const Tolerance& tol) {
  require_same_ambient(inner, outer);
  if (outer.is_zero()) return outer;
  const OperatorMatrix rest = outer.basis() - inner.basis() * (inner.basis().adjoint() * outer.basis());
  const Eigen::VectorXd sv = singular_values(rest);
  const std::size_t r = count_above(sv, tol.rank_rel);
  const std::size_t expected = outer.dim() >= inner.dim() ? outer.dim() - inner.dim() : 0;
  if (r == 0) return Subspace::zero(outer.ambient_dim());
  Eigen::JacobiSVD<OperatorMatrix> svd(rest, Eigen::ComputeThinU);
  return Subspace::from_orthonormal(svd.matrixU().leftCols(static_cast<Eigen::Index>(std::min(r, std::max(expected, std::size_t{1})))));
}

bool same_subspace(const Subspace& u, const Subspace& w, const Tolerance& tol) {
  if (u.ambient_dim() != w.ambient_dim() || u.dim() != w.dim()) return false;
  return u.membership_residual(w.basis()) <= tol.residual_abs &&
         w.membership_residual(u.basis()) <= tol.residual_abs;
}

Subspace real_form(const Subspace& u, const Tolerance& tol) {
  if (u.is_zero()) return u;
  const OperatorMatrix& b = u.basis();
  Eigen::MatrixXd parts(b.rows(), 2 * b.cols());
  parts << b.real(), b.imag();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(parts, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const std::size_t r = count_above(sv, tol.rank_rel * std::max(1.0, sv[0]));
  if (r != u.dim()) return u;
  return Subspace::from_orthonormal(svd.matrixU().leftCols(static_cast<Eigen::Index>(r)).cast<Scalar>());
}

DirectSumCheck direct_sum_check(const Subspace& u, const Subspace& w, const Tolerance& tol) {
  require_same_ambient(u, w);
  const std::size_t n = u.ambient_dim();
  OperatorMatrix cat(static_cast<Eigen::Index>(n), u.basis().cols() + w.basis().cols());
  cat << u.basis(), w.basis();
  const std::size_t r = numerical_rank(cat, tol);
  DirectSumCheck out;
  out.defect = n - std::min(r, n);
  out.holds = (u.dim() + w.dim() == n) && r == n;
  return out;
}

OperatorMatrix oblique_projection(const Subspace& onto, const Subspace& along, const Tolerance& tol) {
  if (!direct_sum_check(onto, along, tol).holds) {
    throw Error(ErrorKind::NotComplementary, "projection target and kernel do not form a direct sum");
  }
  const std::size_t n = onto.ambient_dim();
  if (onto.is_zero()) return OperatorMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (along.is_zero()) return identity(n);
  OperatorMatrix b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  b << onto.basis(), along.basis();
  const OperatorMatrix binv = b.partialPivLu().inverse();
  return onto.basis() * binv.topRows(onto.basis().cols());
}

OperatorMatrix relative_generalized_inverse(const OperatorMatrix& m, const Subspace& ker_complement,
                                            const Subspace& ran_complement, const Tolerance& tol) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidInput, "generalized inverse needs a square matrix");
  const Subspace ker = kernel_basis(m, tol);
  const Subspace ran = range_basis(m, tol);
  if (!direct_sum_check(ker_complement, ker, tol).holds) {
    throw Error(ErrorKind::NotComplementary, "kernel complement does not complement ker M");
  }
  const OperatorMatrix p_ran = oblique_projection(ran, ran_complement, tol);
  const auto n = m.rows();
  if (ker_complement.is_zero()) return OperatorMatrix::Zero(n, n);
  const OperatorMatrix mk = m * ker_complement.basis();
  const OperatorMatrix coords = mk.colPivHouseholderQr().solve(p_ran);
  return ker_complement.basis() * coords;
}

Eigen::MatrixXd abs_power(const OperatorMatrix& b, std::size_t k) {
  const Eigen::MatrixXd a = b.cwiseAbs();
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (std::size_t i = 0; i < k; ++i) out = out * a;
  return out;
}

AscentProfile ascent_profile_at_one(const OperatorMatrix& m, const Tolerance& tol) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidInput, "ascent needs a square matrix");
  const auto n = static_cast<std::size_t>(m.rows());
  const OperatorMatrix b = identity(n) - m;
  const Eigen::MatrixXd abs_b = b.cwiseAbs();
  AscentProfile out;
  OperatorMatrix bk = b;
  Eigen::MatrixXd abs_bk = abs_b;
  std::size_t prev = n - power_rank(bk, abs_bk, 1, tol);
  if (prev == 0) return out;
  out.kernel_dims.push_back(prev);
  for (std::size_t k = 2; k <= n + 1; ++k) {
    bk = bk * b;
    abs_bk = abs_bk * abs_b;
    const std::size_t d = n - power_rank(bk, abs_bk, k, tol);
    if (d <= prev) {
      out.ascent = k - 1;
      return out;
    }
    out.kernel_dims.push_back(d);
    prev = d;
  }
  out.ascent = n;
  return out;
}

std::size_t ascent_at_one(const OperatorMatrix& m, const Tolerance& tol) {
  return ascent_profile_at_one(m, tol).ascent;
}

}  // namespace grj
