#pragma once

#include <cstddef>
#include <vector>

#include "grj/numfield.hpp"

namespace grj {

/// A(z) = I - z A_1 - ... - z^p A_p on an n-dimensional truncation.
struct ArPencil {
  std::size_t p = 1;
  std::size_t dim = 0;
  std::vector<OperatorMatrix> coeffs;
  NormKind norm = NormKind::two;

  /// Throws Error(InvalidInput) on shape mismatch or non-finite entries.
  void validate() const;
  std::size_t companion_dim() const noexcept { return p * dim; }
};

ArPencil make_ar_pencil(std::vector<OperatorMatrix> coeffs, NormKind norm = NormKind::two);
/// p = 1 pencil I - z A_1.
ArPencil ar1(const OperatorMatrix& a1, NormKind norm = NormKind::two);

/// I - z A_1 on the p-fold product space, with the first-coordinate maps.
struct CompanionPencil {
  std::size_t p = 1;
  std::size_t dim = 0;
  std::size_t big_dim = 0;
  OperatorMatrix a1;
  OperatorMatrix pi_p;       // dim x big_dim
  OperatorMatrix pi_p_star;  // big_dim x dim
  NormKind norm = NormKind::two;
};

CompanionPencil linearize(const ArPencil& ar);
/// Recovers A_1..A_p from the top block row.
ArPencil delinearize(const CompanionPencil& cp);

OperatorMatrix eval_poly(const ArPencil& ar, Scalar z);
/// (I - z A_1)^{-1}. Throws SingularAt when the solve is numerically singular.
OperatorMatrix resolvent(const CompanionPencil& cp, Scalar z, const Tolerance& tol);
/// A(z)^{-1} for the original n x n pencil.
OperatorMatrix poly_resolvent(const ArPencil& ar, Scalar z, const Tolerance& tol);

/// Product-space norm: sum of the block norms of the argument.
double product_norm(const CompanionPencil& cp, const Vector& x);

inline constexpr double kDefaultEta = 0.1;
inline constexpr double kDefaultClusterTol = 1e-7;

struct SpectrumReport {
  std::vector<Scalar> eigenvalues;      // of A_1 (companion)
  std::vector<Scalar> pencil_spectrum;  // 1/lambda for lambda != 0
  double eta = kDefaultEta;
  bool has_unit_root = false;
  bool unit_root_ok = false;
  /// Number of eigenvalues merged into the unit root.
  std::size_t unit_multiplicity = 0;
  /// Mean of the merged eigenvalues; within the clustering tolerance of 1.
  Scalar unit_cluster_center{0.0, 0.0};
  /// Distance from 1 to the nearest other point of the pencil spectrum.
  double nearest_other_distance = 0.0;
  /// Pencil-spectrum points not merged into the unit root.
  std::vector<Scalar> others;
  /// Those of `others` inside the closed disk of radius 1 + eta.
  std::vector<Scalar> offending;
};

SpectrumReport spectrum_report(const CompanionPencil& cp, double eta, const Tolerance& tol,
                               double cluster_tol = kDefaultClusterTol);

}  // namespace grj
