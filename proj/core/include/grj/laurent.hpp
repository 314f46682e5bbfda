#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "grj/pencil.hpp"

namespace grj {

/// Trapezoid quadrature of Laurent coefficients on a circle:
///   c_j = (1/N) sum_k f(z_k) w_k^{-j},  z_k = center + w_k,  w_k = r e^{2 pi i k / N}.
/// Only the running sums for j in [j_lo, j_hi] are kept, so doubling the node
/// count reuses every evaluation made so far.
class CircleQuadrature {
 public:
  using Integrand = std::function<OperatorMatrix(Scalar)>;

  CircleQuadrature(Integrand f, Scalar center, double radius, int j_lo, int j_hi, unsigned threads = 1);

  void run(std::size_t nodes);
  void double_nodes();

  OperatorMatrix coefficient(int j) const;
  std::size_t nodes() const noexcept { return nodes_; }
  double radius() const noexcept { return radius_; }
  int j_lo() const noexcept { return j_lo_; }
  int j_hi() const noexcept { return j_hi_; }

 private:
  // Adds f at angles 2 pi (offset + stride m) / denom for m = 0..count-1.
  void accumulate(std::size_t count, std::size_t offset, std::size_t stride, std::size_t denom);

  Integrand f_;
  Scalar center_;
  double radius_;
  int j_lo_;
  int j_hi_;
  unsigned threads_;
  std::size_t nodes_ = 0;
  std::vector<OperatorMatrix> sums_;  // unscaled: sum f(z_k) e^{-i j theta_k}
};

struct ContourOptions {
  double radius = 0.0;  // <= 0 selects min(0.5, 0.4 * distance to the rest of the spectrum)
  std::size_t nodes = 256;
  std::size_t max_nodes = 4096;
  double convergence = 1e-10;
  bool adaptive = true;
  unsigned threads = 1;
  double eta = kDefaultEta;
};

struct ContourInfo {
  Scalar center{1.0, 0.0};
  double radius = 0.0;
  std::size_t nodes = 0;
  /// Scaled change of the principal coefficients at the last doubling.
  double last_change = 0.0;
};

inline constexpr double kContourSafety = 1.5;
/// G^k counts as zero once ||(I - A_1)^k P|| <= kNilpotencyFactor * rank_rel * ||(I - A_1)^k|| ||P||.
inline constexpr double kNilpotencyFactor = 100.0;

double default_contour_radius(const SpectrumReport& spec);

/// N_j of (I - z A_1)^{-1} = -sum_j N_j (z - 1)^j on |z - 1| = radius. Fixed node count.
OperatorMatrix contour_coefficient(const CompanionPencil& cp, int j, double radius, std::size_t nodes,
                                   const Tolerance& tol);

struct PoleOrder {
  std::size_t order = 0;
  bool essential_flag = false;
  std::size_t nilpotency_index = 0;
  /// Rank-stabilisation ascent of A_1 at 1, and whether it agrees with `order`.
  std::size_t ascent = 0;
  bool ascent_agrees = false;
  /// ||G^k|| / (||(I - A_1)^k|| ||P||) for k = 1..nilpotency_index.
  std::vector<double> nilpotency_ratios;
  OperatorMatrix p_operator;
  OperatorMatrix n_minus1;
  ContourInfo contour;
};

PoleOrder pole_order(const CompanionPencil& cp, const Tolerance& tol, const ContourOptions& opts = {});

struct PolyPoleOrder {
  std::size_t order = 0;
  /// ||c_{-k}|| of A(z)^{-1} around 1 for k = 1..p n.
  std::vector<double> coeff_norms;
  ContourInfo contour;
};

/// Pole order of the n x n inverse A(z)^{-1} read off its own contour
/// coefficients: the largest k with ||c_{-k}|| > kPolyCoeffRel * max_j ||c_{-j}||.
inline constexpr double kPolyCoeffRel = 1e-8;
PolyPoleOrder poly_pole_order(const ArPencil& ar, const Tolerance& tol, const ContourOptions& opts = {});

struct LaurentExpansion {
  std::size_t pole_order = 0;
  std::size_t nilpotency_index = 0;
  std::size_t ascent = 0;
  bool essential_flag = false;
  std::map<int, OperatorMatrix> coeffs;  // N_j, j in [-pole_order, j_max]
  ContourInfo contour;
  OperatorMatrix p_operator;  // N_{-1} A_1
  OperatorMatrix g_operator;  // (I - A_1) P
  double reconstruction_error = 0.0;
  double idempotency_residual = 0.0;
  double commutation_residual = 0.0;
  int j_max = 0;

  const OperatorMatrix& coeff(int j) const;
  bool has_coeff(int j) const { return coeffs.count(j) != 0; }
  /// -sum_j N_j (z - 1)^j over the stored coefficients.
  OperatorMatrix evaluate(Scalar z) const;
  /// sum_{j<0} -N_j (z - 1)^j.
  OperatorMatrix principal_part(Scalar z) const;
};

/// Coefficients for j in [-order, j_max]; invariants are verified before return
/// and a failure throws Error(InvariantViolation).
LaurentExpansion expansion(const CompanionPencil& cp, int j_max, const Tolerance& tol,
                           const ContourOptions& opts = {});

/// Taylor coefficients at 0 of H(z) = (I - z A_1)^{-1} minus its principal part at 1,
/// on the product space, for j = 0..j_max.
std::vector<OperatorMatrix> holomorphic_taylor(const CompanionPencil& cp, const LaurentExpansion& ex, int j_max,
                                               const Tolerance& tol, const ContourOptions& opts = {});

struct AlgebraResiduals {
  /// max over j, k in {-2, -1, 0, 1} of ||N_j A_1 N_k - (1 - eta_j - eta_k) N_{j+k+1}||.
  double products = 0.0;
  /// Coefficients j in {-2, -1, 0} of both expansions of the identity.
  double identity_left = 0.0;   // N_{j-1} A_1 - N_j (I - A_1)
  double identity_right = 0.0;  // A_1 N_{j-1} - (I - A_1) N_j
  /// ||R(z) - R(l) - (z - l) R(z) A_1 R(l)|| over the sampled pairs.
  double resolvent_equation = 0.0;
  double idempotency = 0.0;
  double commutation = 0.0;
  /// ||N_{-1}^2 - N_{-1}||; only meaningful for a simple pole.
  double n_minus1_idempotency = 0.0;

  double max() const;
};

/// Coefficient identities of the expansion; N_j outside the stored range count
/// as zero below -order and must be stored above it (j_max >= 3).
AlgebraResiduals laurent_algebra(const CompanionPencil& cp, const LaurentExpansion& ex, const Tolerance& tol,
                                 std::size_t samples = 10, std::uint64_t seed = 1);

struct SweepPoint {
  std::size_t dim = 0;
  std::size_t order = 0;
  std::size_t nilpotency_index = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  bool essential_flag = false;
};

/// Pole order across truncation sizes; the flag is set when the nilpotency
/// index grows strictly and in proportion to the truncation dimension.
SweepResult truncation_sweep(const std::function<CompanionPencil(std::size_t)>& builder,
                             const std::vector<std::size_t>& dims, const Tolerance& tol,
                             const ContourOptions& opts = {});

/// n^{-1} ||G^l (I - G)^n|| for n = 1..n_max; a diagnostic sequence only.
std::vector<double> cesaro_sequence(const OperatorMatrix& g, std::size_t l, std::size_t n_max);

}  // namespace grj
