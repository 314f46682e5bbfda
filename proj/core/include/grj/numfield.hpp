#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace grj {

using Scalar = std::complex<double>;
/// Dense complex matrix standing for a bounded operator on a finite truncation.
using OperatorMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowFunctional = Eigen::RowVectorXcd;

/// Numerical cutoffs. `rank_rel` is relative to the largest singular value;
/// `residual_abs` bounds operator-norm residuals of computed identities.
struct Tolerance {
  double rank_rel = 1e-10;
  double residual_abs = 1e-8;

  /// Throws Error(InvalidInput) unless both are positive and rank_rel < 1.
  void validate() const;
};

/// Process-wide default. Meant to be set once at startup, before any threads.
Tolerance default_tolerance();
void set_default_tolerance(const Tolerance& tol);

/// Coordinate norm on the truncated space. On the product space the norm is
/// the sum of block norms.
enum class NormKind { one, two, sup };

NormKind parse_norm_kind(std::string_view text);
std::string_view to_string(NormKind kind) noexcept;

/// A linear subspace held through an orthonormal basis (ambient x k).
class Subspace {
 public:
  Subspace() = default;

  /// Span of the given columns. Independent columns keep their orientation
  /// (Gram-Schmidt); dependent ones are reduced through an SVD.
  /// Singular values below rank_rel * max(sigma_max, reference) are dropped; pass the
  /// norm of a map when spanning its image of an orthonormal basis.
  static Subspace span(const OperatorMatrix& columns, const Tolerance& tol, double reference = 0.0);
  static Subspace zero(std::size_t ambient);
  static Subspace full(std::size_t ambient);
  /// Trusts that `orthonormal` already has orthonormal columns.
  static Subspace from_orthonormal(OperatorMatrix orthonormal);

  std::size_t ambient_dim() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
  bool is_zero() const noexcept { return dim() == 0; }
  const OperatorMatrix& basis() const noexcept { return basis_; }

  /// Orthogonal projector onto the subspace.
  OperatorMatrix orthogonal_projector() const;
  /// max over columns of the distance of X's columns to the subspace.
  double membership_residual(const OperatorMatrix& columns) const;

 private:
  Subspace(std::size_t ambient, OperatorMatrix basis) : ambient_(ambient), basis_(std::move(basis)) {}

  std::size_t ambient_ = 0;
  OperatorMatrix basis_;
};

struct DirectSumCheck {
  bool holds = false;
  std::size_t defect = 0;
};

OperatorMatrix identity(std::size_t n);
bool all_finite(const OperatorMatrix& m);
void require_finite(const OperatorMatrix& m, std::string_view what);

double vector_norm(const Vector& x, NormKind norm);
/// Induced operator norm: exact column/row sums for one/sup, spectral for two.
double operator_norm(const OperatorMatrix& m, NormKind norm);
/// Norm of a row functional as an element of the dual of (C^n, norm).
double dual_norm(const RowFunctional& f, NormKind norm);

std::size_t numerical_rank(const OperatorMatrix& m, const Tolerance& tol);
Subspace kernel_basis(const OperatorMatrix& m, const Tolerance& tol);
Subspace range_basis(const OperatorMatrix& m, const Tolerance& tol);

Subspace subspace_sum(const Subspace& u, const Subspace& w, const Tolerance& tol);
Subspace intersection(const Subspace& u, const Subspace& w, const Tolerance& tol);
Subspace orthogonal_complement(const Subspace& u, const Tolerance& tol);
/// Orthogonal complement of `inner` inside `outer` (inner must lie in outer).
Subspace complement_within(const Subspace& inner, const Subspace& outer, const Tolerance& tol);
bool same_subspace(const Subspace& u, const Subspace& w, const Tolerance& tol);
/// A real orthonormal basis of u when u is closed under conjugation, else u unchanged.
Subspace real_form(const Subspace& u, const Tolerance& tol);

DirectSumCheck direct_sum_check(const Subspace& u, const Subspace& w, const Tolerance& tol);

/// Projection onto `onto` along `along`. Throws NotComplementary.
OperatorMatrix oblique_projection(const Subspace& onto, const Subspace& along, const Tolerance& tol);

/// Generalized inverse of M relative to complements of its kernel and range:
/// (M restricted to ker_complement)^{-1} composed with the projection onto
/// ran M along ran_complement. Throws NotComplementary.
OperatorMatrix relative_generalized_inverse(const OperatorMatrix& m, const Subspace& ker_complement,
                                            const Subspace& ran_complement, const Tolerance& tol);

/// dim ker (I - M)^k for k = 1, 2, ... until it stabilises.
struct AscentProfile {
  std::size_t ascent = 0;
  std::vector<std::size_t> kernel_dims;  // kernel_dims[k-1] = dim ker (I-M)^k
  std::size_t algebraic_multiplicity() const { return kernel_dims.empty() ? 0 : kernel_dims.back(); }
};

AscentProfile ascent_profile_at_one(const OperatorMatrix& m, const Tolerance& tol);
/// Largest Jordan block of M at eigenvalue 1 (0 when 1 is not an eigenvalue).
std::size_t ascent_at_one(const OperatorMatrix& m, const Tolerance& tol);

/// Entrywise-absolute power |B|^k, used to bound rounding in B^k.
Eigen::MatrixXd abs_power(const OperatorMatrix& b, std::size_t k);

}  // namespace grj
