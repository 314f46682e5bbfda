#include "grj/cointegration.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "grj/error.hpp"

namespace grj {

namespace {

Eigen::MatrixXd symmetrised_real(const OperatorMatrix& c) {
  const Eigen::MatrixXd re = c.real();
  return 0.5 * (re + re.transpose());
}

double op2(const OperatorMatrix& m) { return operator_norm(m, NormKind::two); }

}  // namespace

void MaRepresentation::validate(const Tolerance& tol) const {
  if (innovation_cov.rows() == 0 || innovation_cov.rows() != innovation_cov.cols()) {
    throw Error(ErrorKind::InvalidInput, "innovation covariance must be square and nonempty");
  }
  require_finite(innovation_cov, "innovation covariance");
  const auto n = innovation_cov.rows();
  if (coeffs.empty()) throw Error(ErrorKind::InvalidInput, "MA representation needs at least one coefficient");
  for (const auto& a : coeffs) {
    if (a.rows() != n || a.cols() != n) throw Error(ErrorKind::InvalidInput, "MA coefficient has the wrong shape");
    require_finite(a, "MA coefficient");
  }
  const DefiniteCheck dc = definiteness(innovation_cov, tol);
  const double scale = std::max(1.0, dc.max_eigenvalue);
  if (dc.asymmetry > tol.residual_abs * scale || innovation_cov.imag().norm() > tol.residual_abs * scale) {
    throw Error(ErrorKind::InvalidInput, "innovation covariance is not real symmetric");
  }
  if (dc.min_eigenvalue < -tol.residual_abs * scale) {
    throw Error(ErrorKind::InvalidInput, "innovation covariance is not positive semidefinite");
  }
}

GeometricDecay MaRepresentation::tail_decay() const {
  std::vector<double> norms;
  norms.reserve(coeffs.size());
  for (const auto& a : coeffs) norms.push_back(op2(a));
  return fit_geometric_decay(norms);
}

MaRepresentation make_ma(std::vector<OperatorMatrix> coeffs, OperatorMatrix cov, const Tolerance& tol) {
  MaRepresentation ma;
  ma.coeffs = std::move(coeffs);
  ma.innovation_cov = std::move(cov);
  ma.validate(tol);
  ma.sum_operator = OperatorMatrix::Zero(ma.innovation_cov.rows(), ma.innovation_cov.cols());
  for (const auto& a : ma.coeffs) ma.sum_operator += a;
  return ma;
}

MaRepresentation ma_from_i1(const I1Report& rep, const OperatorMatrix& cov, const Tolerance& tol) {
  if (rep.h_coeffs.empty()) throw Error(ErrorKind::InvalidInput, "I(1) report carries no h coefficients");
  std::vector<OperatorMatrix> coeffs;
  coeffs.push_back(rep.long_run + rep.h_coeffs[0]);
  for (std::size_t k = 1; k < rep.h_coeffs.size(); ++k) coeffs.push_back(rep.h_coeffs[k] - rep.h_coeffs[k - 1]);
  // Differencing the truncated sum leaves -h_J at lag J + 1, so sum_k A_k is the long-run operator.
  coeffs.push_back(-rep.h_coeffs.back());
  return make_ma(std::move(coeffs), cov, tol);
}

DefiniteCheck definiteness(const OperatorMatrix& c, const Tolerance& tol) {
  (void)tol;
  if (c.rows() != c.cols()) throw Error(ErrorKind::InvalidInput, "covariance must be square");
  DefiniteCheck out;
  if (c.rows() == 0) return out;
  const Eigen::MatrixXd re = c.real();
  out.asymmetry = operator_norm((re - re.transpose()).cast<Scalar>(), NormKind::two);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrised_real(c), Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.max_eigenvalue = es.eigenvalues().maxCoeff();
  out.positive_definite = out.max_eigenvalue > 0.0 && out.min_eigenvalue > tol.rank_rel * out.max_eigenvalue;
  return out;
}

bool positive_definite_check(const OperatorMatrix& c, const Tolerance& tol) {
  return definiteness(c, tol).positive_definite;
}

CointegrationReport cointegration_report(const MaRepresentation& ma, const Tolerance& tol) {
  CointegrationReport rep;
  const OperatorMatrix& a = ma.sum_operator;
  const std::size_t n = ma.dim();
  rep.attractor = real_form(range_basis(a, tol), tol);
  // Bilinear pairing: f A = 0 iff A^T f^T = 0.
  rep.cointegrating = real_form(kernel_basis(a.transpose(), tol), tol);
  rep.dim_attractor = rep.attractor.dim();
  rep.dim_cointegrating = rep.cointegrating.dim();
  const std::size_t total = rep.dim_attractor + rep.dim_cointegrating;
  rep.defect = total > n ? total - n : n - total;
  rep.long_run_cov = a * ma.innovation_cov * a.transpose();
  rep.assumption_ok = positive_definite_check(ma.innovation_cov, tol);
  if (!rep.assumption_ok) rep.note = "assumption violated: innovation covariance is not positive definite";
  return rep;
}

RowFunctional restriction(const RowFunctional& f, const Subspace& v) {
  if (static_cast<std::size_t>(f.cols()) != v.ambient_dim()) {
    throw Error(ErrorKind::InvalidInput, "functional and subspace dimensions differ");
  }
  return f * v.basis();
}

const char* to_string(IsometryStatus s) noexcept {
  switch (s) {
    case IsometryStatus::holds:
      return "holds";
    case IsometryStatus::fails:
      return "fails";
    case IsometryStatus::untested:
      return "untested";
  }
  return "untested";
}

Extension extend_functional(const RowFunctional& f_on_v, const Subspace& v, const OperatorMatrix& p_v,
                            const Tolerance& tol, NormKind norm) {
  const auto n = static_cast<Eigen::Index>(v.ambient_dim());
  if (p_v.rows() != n || p_v.cols() != n) throw Error(ErrorKind::InvalidInput, "P_V has the wrong shape");
  if (static_cast<std::size_t>(f_on_v.cols()) != v.dim()) {
    throw Error(ErrorKind::InvalidInput, "functional length must equal dim V");
  }
  require_finite(p_v, "P_V");
  const double pn = op2(p_v);
  if (op2(p_v * p_v - p_v) > tol.residual_abs * std::max(1.0, pn * pn)) {
    throw Error(ErrorKind::NotProjection, "P_V is not idempotent");
  }
  if (!same_subspace(range_basis(p_v, tol), v, tol)) {
    throw Error(ErrorKind::NotProjection, "the range of P_V is not V");
  }

  Extension out;
  // The coordinates of P_V x in the orthonormal basis of V are V^* P_V x.
  out.functional = f_on_v * v.basis().adjoint() * p_v;
  out.projection_norm = operator_norm(p_v, norm);
  out.extended_norm = dual_norm(out.functional, norm);

  bool closed_form = true;
  if (v.dim() == 0 || f_on_v.cols() == 0) {
    out.restricted_norm = 0.0;
  } else if (norm == NormKind::two) {
    out.restricted_norm = f_on_v.norm();
  } else if (v.dim() == 1) {
    out.restricted_norm = std::abs(f_on_v(0, 0)) / vector_norm(v.basis().col(0), norm);
  } else {
    closed_form = false;
  }
  if (!closed_form) {
    out.note = "no closed form for ||f|_V|| in this norm";
  } else if (out.projection_norm > 1.0 + tol.rank_rel) {
    out.note = "||P_V|| exceeds 1";
  } else {
    const double scale = std::max(1.0, out.restricted_norm);
    out.isometry = std::abs(out.extended_norm - out.restricted_norm) <= tol.residual_abs * scale
                       ? IsometryStatus::holds
                       : IsometryStatus::fails;
  }
  return out;
}

BeveridgeNelson beveridge_nelson(const MaRepresentation& ma) {
  BeveridgeNelson bn;
  const std::size_t k = ma.coeffs.size();
  const auto n = static_cast<Eigen::Index>(ma.dim());
  bn.tilde.assign(k, OperatorMatrix::Zero(n, n));
  OperatorMatrix tail = OperatorMatrix::Zero(n, n);
  for (std::size_t j = k; j-- > 0;) {
    bn.tilde[j] = -tail;
    tail += ma.coeffs[j];
  }
  bn.a = tail;
  double res = op2(ma.coeffs[0] - bn.a - bn.tilde[0]);
  for (std::size_t j = 1; j < k; ++j) res = std::max(res, op2(ma.coeffs[j] - bn.tilde[j] + bn.tilde[j - 1]));
  bn.reconstruction_residual = res;
  return bn;
}

I0Verdict classify_integration(const MaRepresentation& ma, const Tolerance& tol) {
  I0Verdict v;
  const OperatorMatrix& a = ma.sum_operator;
  v.long_run_norm = op2(a * ma.innovation_cov * a.transpose());
  v.i0 = v.long_run_norm > tol.residual_abs;
  v.reason = v.i0 ? "nonzero long-run covariance" : "long-run covariance vanishes";
  return v;
}

}  // namespace grj
