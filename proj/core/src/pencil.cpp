#include "grj/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "grj/error.hpp"

namespace grj {

void ArPencil::validate() const {
  if (p < 1) throw Error(ErrorKind::InvalidInput, "lag order must be at least 1");
  if (dim < 1) throw Error(ErrorKind::InvalidInput, "state dimension must be at least 1");
  if (coeffs.size() != p) throw Error(ErrorKind::InvalidInput, "expected p coefficient matrices");
  for (const auto& a : coeffs) {
    if (a.rows() != static_cast<Eigen::Index>(dim) || a.cols() != static_cast<Eigen::Index>(dim)) {
      throw Error(ErrorKind::InvalidInput, "coefficient matrices must be dim x dim");
    }
    require_finite(a, "coefficient matrix");
  }
}

ArPencil make_ar_pencil(std::vector<OperatorMatrix> coeffs, NormKind norm) {
  ArPencil ar;
  ar.p = coeffs.size();
  ar.dim = coeffs.empty() ? 0 : static_cast<std::size_t>(coeffs.front().rows());
  ar.coeffs = std::move(coeffs);
  ar.norm = norm;
  ar.validate();
  return ar;
}

ArPencil ar1(const OperatorMatrix& a1, NormKind norm) { return make_ar_pencil({a1}, norm); }

CompanionPencil linearize(const ArPencil& ar) {
  ar.validate();
  const auto n = static_cast<Eigen::Index>(ar.dim);
  const auto p = static_cast<Eigen::Index>(ar.p);
  CompanionPencil cp;
  cp.p = ar.p;
  cp.dim = ar.dim;
  cp.big_dim = ar.p * ar.dim;
  cp.norm = ar.norm;
  cp.a1 = OperatorMatrix::Zero(n * p, n * p);
  for (Eigen::Index j = 0; j < p; ++j) cp.a1.block(0, j * n, n, n) = ar.coeffs[static_cast<std::size_t>(j)];
  for (Eigen::Index j = 1; j < p; ++j) cp.a1.block(j * n, (j - 1) * n, n, n) = OperatorMatrix::Identity(n, n);
  cp.pi_p = OperatorMatrix::Zero(n, n * p);
  cp.pi_p.leftCols(n) = OperatorMatrix::Identity(n, n);
  cp.pi_p_star = cp.pi_p.transpose();
  return cp;
}

ArPencil delinearize(const CompanionPencil& cp) {
  const auto n = static_cast<Eigen::Index>(cp.dim);
  std::vector<OperatorMatrix> coeffs;
  for (std::size_t j = 0; j < cp.p; ++j) coeffs.push_back(cp.a1.block(0, static_cast<Eigen::Index>(j) * n, n, n));
  return make_ar_pencil(std::move(coeffs), cp.norm);
}

OperatorMatrix eval_poly(const ArPencil& ar, Scalar z) {
  OperatorMatrix out = identity(ar.dim);
  Scalar zj = 1.0;
  for (const auto& a : ar.coeffs) {
    zj *= z;
    out -= zj * a;
  }
  return out;
}

namespace {

OperatorMatrix checked_inverse(const OperatorMatrix& m, Scalar z, const Tolerance& tol) {
  const OperatorMatrix x = m.partialPivLu().inverse();
  const bool finite = all_finite(x);
  const double residual = finite ? operator_norm(m * x - OperatorMatrix::Identity(m.rows(), m.cols()), NormKind::two)
                                 : std::numeric_limits<double>::infinity();
  if (!finite || !(residual <= tol.residual_abs)) {
    throw Error(ErrorKind::SingularAt, "resolvent is singular at z = (" + std::to_string(z.real()) + ", " +
                                           std::to_string(z.imag()) + ")");
  }
  return x;
}

}  // namespace

OperatorMatrix resolvent(const CompanionPencil& cp, Scalar z, const Tolerance& tol) {
  return checked_inverse(identity(cp.big_dim) - z * cp.a1, z, tol);
}

OperatorMatrix poly_resolvent(const ArPencil& ar, Scalar z, const Tolerance& tol) {
  return checked_inverse(eval_poly(ar, z), z, tol);
}

double product_norm(const CompanionPencil& cp, const Vector& x) {
  double total = 0.0;
  const auto n = static_cast<Eigen::Index>(cp.dim);
  for (std::size_t j = 0; j < cp.p; ++j) total += vector_norm(x.segment(static_cast<Eigen::Index>(j) * n, n), cp.norm);
  return total;
}

SpectrumReport spectrum_report(const CompanionPencil& cp, double eta, const Tolerance& tol, double cluster_tol) {
  if (!(eta > 0.0)) throw Error(ErrorKind::InvalidInput, "eta must be positive");
  SpectrumReport rep;
  rep.eta = eta;
  Eigen::ComplexEigenSolver<OperatorMatrix> es(cp.a1, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) rep.eigenvalues.push_back(ev[i]);
  for (const auto& lam : rep.eigenvalues) {
    if (lam != Scalar(0.0, 0.0)) rep.pencil_spectrum.push_back(Scalar(1.0, 0.0) / lam);
  }

  // Defective eigenvalues at 1 scatter far beyond the merge radius, so the
  // cluster size comes from the rank profile and only its mean is tested.
  const std::size_t alg = ascent_profile_at_one(cp.a1, tol).algebraic_multiplicity();
  std::vector<std::size_t> order(rep.eigenvalues.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(rep.eigenvalues[a] - 1.0) < std::abs(rep.eigenvalues[b] - 1.0);
  });
  std::size_t near = 0;
  for (const auto& lam : rep.eigenvalues) {
    if (std::abs(lam - 1.0) <= cluster_tol) ++near;
  }
  std::size_t m = std::max(alg, near);
  Scalar center{0.0, 0.0};
  if (m > 0) {
    for (std::size_t i = 0; i < m; ++i) center += rep.eigenvalues[order[i]];
    center /= static_cast<double>(m);
    if (std::abs(center - 1.0) > cluster_tol) m = near;
    if (m > 0 && m != std::max(alg, near)) {
      center = 0.0;
      for (std::size_t i = 0; i < m; ++i) center += rep.eigenvalues[order[i]];
      center /= static_cast<double>(m);
    }
  }
  rep.unit_multiplicity = m;
  rep.unit_cluster_center = center;
  rep.has_unit_root = m > 0;

  rep.nearest_other_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = m; i < order.size(); ++i) {
    const Scalar lam = rep.eigenvalues[order[i]];
    if (lam == Scalar(0.0, 0.0)) continue;
    const Scalar z = Scalar(1.0, 0.0) / lam;
    rep.others.push_back(z);
    rep.nearest_other_distance = std::min(rep.nearest_other_distance, std::abs(z - 1.0));
    if (std::abs(z) <= 1.0 + eta) rep.offending.push_back(z);
  }
  rep.unit_root_ok = rep.has_unit_root && rep.offending.empty();
  return rep;
}

}  // namespace grj
