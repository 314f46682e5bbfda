#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "grj/representation.hpp"

namespace grj {

/// Delta^d X_t = sum_k A_k eps_{t-k} with innovation covariance C.
struct MaRepresentation {
  std::vector<OperatorMatrix> coeffs;
  OperatorMatrix innovation_cov;
  OperatorMatrix sum_operator;  // A = sum_k A_k

  std::size_t dim() const { return static_cast<std::size_t>(innovation_cov.rows()); }
  /// Shapes, finiteness and symmetric positive semidefinite covariance; throws InvalidInput.
  void validate(const Tolerance& tol) const;
  GeometricDecay tail_decay() const;
};

/// Fills sum_operator and validates.
MaRepresentation make_ma(std::vector<OperatorMatrix> coeffs, OperatorMatrix cov,
                         const Tolerance& tol = default_tolerance());
/// MA law of Delta X_t for an I(1) report: A_0 = Pi_p P Pi_p^* + h_0, A_k = h_k - h_{k-1}
/// for k = 1..J and A_{J+1} = -h_J.
MaRepresentation ma_from_i1(const I1Report& rep, const OperatorMatrix& cov, const Tolerance& tol = default_tolerance());

struct DefiniteCheck {
  bool positive_definite = false;
  double asymmetry = 0.0;  // ||C - C^T||
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

DefiniteCheck definiteness(const OperatorMatrix& c, const Tolerance& tol);
/// Smallest eigenvalue of the symmetrised C above rank_rel times the largest.
bool positive_definite_check(const OperatorMatrix& c, const Tolerance& tol);

struct CointegrationReport {
  Subspace attractor;      // ran A
  Subspace cointegrating;  // columns f^T with f A = 0
  std::size_t dim_attractor = 0;
  std::size_t dim_cointegrating = 0;
  std::size_t defect = 0;  // |n - dim_attractor - dim_cointegrating|
  OperatorMatrix long_run_cov;  // A C A^T
  bool assumption_ok = true;
  std::string note;
  /// Cointegrating functionals as rows.
  OperatorMatrix functionals() const { return cointegrating.basis().transpose(); }
};

CointegrationReport cointegration_report(const MaRepresentation& ma, const Tolerance& tol);

/// Coordinates of f restricted to V in the orthonormal basis of V.
RowFunctional restriction(const RowFunctional& f, const Subspace& v);

enum class IsometryStatus { holds, fails, untested };
const char* to_string(IsometryStatus s) noexcept;

struct Extension {
  RowFunctional functional;
  double projection_norm = 0.0;
  double restricted_norm = 0.0;  // ||f|_V||
  double extended_norm = 0.0;    // dual norm of the extension
  IsometryStatus isometry = IsometryStatus::untested;
  std::string note;
};

/// f|_V o P_V with f given in the orthonormal coordinates of V. Throws NotProjection
/// unless P_V is idempotent with range V. The isometry is checked only when
/// ||P_V|| <= 1 + rank_rel in the chosen norm and ||f|_V|| is available in closed
/// form (two norm, or dim V = 1).
Extension extend_functional(const RowFunctional& f_on_v, const Subspace& v, const OperatorMatrix& p_v,
                            const Tolerance& tol, NormKind norm = NormKind::two);

struct BeveridgeNelson {
  OperatorMatrix a;                        // sum_k A_k
  std::vector<OperatorMatrix> tilde;       // A~_k = -sum_{j > k} A_j
  /// max(||A_0 - A - A~_0||, max_k ||A_k - A~_k + A~_{k-1}||)
  double reconstruction_residual = 0.0;
};

BeveridgeNelson beveridge_nelson(const MaRepresentation& ma);

struct I0Verdict {
  bool i0 = false;
  double long_run_norm = 0.0;
  std::string reason;
};

/// I(0) iff ||A C A^T|| > residual_abs.
I0Verdict classify_integration(const MaRepresentation& ma, const Tolerance& tol);

}  // namespace grj
