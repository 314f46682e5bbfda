#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grj/laurent.hpp"

namespace grj {

/// ||x_j|| <= c * rho^j for all listed j.
struct GeometricDecay {
  double c = 0.0;
  double rho = 0.0;
  bool decays() const noexcept { return rho < 1.0; }
};

/// Least-squares slope of log norms gives rho; c is the smallest constant that
/// makes the bound hold. Norms below kDecayNoiseFloor * max(1, peak) count as zero.
inline constexpr double kDecayNoiseFloor = 1e-12;
GeometricDecay fit_geometric_decay(const std::vector<double>& norms);

/// h_j = Pi_p A_1^j (I - P) Pi_p^* for j = 0..j_max.
std::vector<OperatorMatrix> stationary_coefficients(const CompanionPencil& cp, const OperatorMatrix& p_operator,
                                                    int j_max);

struct I1Report {
  bool holds = false;
  bool unit_root_ok = false;
  std::size_t ker_dim = 0;
  std::size_t ran_dim = 0;
  std::size_t defect = 0;
  Subspace ker;
  Subspace ran;
  OperatorMatrix p_operator;  // projection onto ker(I - A_1) along ran(I - A_1)
  OperatorMatrix long_run;    // Pi_p P Pi_p^*
  std::vector<OperatorMatrix> h_coeffs;
  GeometricDecay h_decay;
  /// ||P - N_{-1}|| against the contour coefficient.
  double cross_check_residual = 0.0;
  /// max_j ||h_j - h_j^contour||; only set by i1_components.
  double h_cross_check_residual = 0.0;
  /// ran Pi_p P Pi_p^* is a proper subspace (a stationary functional can exist).
  bool attractor_proper = false;
};

I1Report check_i1(const CompanionPencil& cp, const Tolerance& tol, const ContourOptions& opts = {});
/// Throws Error(NotI1) when the I(1) condition fails.
I1Report i1_components(const CompanionPencil& cp, int j_max, const Tolerance& tol, const ContourOptions& opts = {});

/// Complements of ran(I - A_1) and ker(I - A_1); unset members default to
/// Euclidean orthogonal complements.
struct Complements {
  std::optional<Subspace> ran_c;
  std::optional<Subspace> ker_c;
};

struct I2Report {
  bool holds = false;
  bool unit_root_ok = false;
  std::string diagnostic;
  Subspace ker;
  Subspace ran;
  Subspace ran_c;
  Subspace ker_c;
  Subspace k_space;  // ran ∩ ker
  Subspace w_space;  // (I - P_ran) ker
  Subspace w_c;
  Subspace k_c;
  /// Which rule produced w_c / k_c: "induced" when the candidate built from the
  /// given complements (ker ∩ ran_c, resp. (I - P_ran) ker_c) yields
  /// a valid complement, "orthogonal" for the fallback.
  std::string w_c_rule;
  std::string k_c_rule;
  std::size_t defect = 0;  // of the I(2) direct sum
  OperatorMatrix p_ran;        // onto ran along ran_c
  OperatorMatrix p_wc;         // onto w_c along ran + w
  OperatorMatrix gen_inverse;  // (I - A_1)^g
  OperatorMatrix q;            // (I - P_ran) composed with the projection onto ker along ker_c
  OperatorMatrix q_g;
  OperatorMatrix n_minus2;
  OperatorMatrix p_op;
  OperatorMatrix gamma_l;
  OperatorMatrix gamma_r;
  OperatorMatrix long_run2;  // Pi_p N_{-2} Pi_p^*
  OperatorMatrix long_run1;  // Pi_p (N_{-2} + P) Pi_p^*
  std::vector<OperatorMatrix> h_coeffs;
  GeometricDecay h_decay;
  /// max(||N_{-2} - N_{-2}^contour||, ||N_{-2} + P - N_{-1}^contour||); set by i2_components.
  double cross_check_residual = 0.0;
  double h_cross_check_residual = 0.0;
  /// ran Pi_p N_{-2} Pi_p^* + ran Pi_p N_{-1} Pi_p^* is a proper subspace.
  bool attractor_proper = false;
};

/// Evaluates the I(2) condition and, when it holds, the closed-form operators.
I2Report check_i2(const CompanionPencil& cp, const Tolerance& tol, const Complements& comps = {});
/// Throws Error(NotI2) when the condition fails.
I2Report i2_components(const CompanionPencil& cp, int j_max, const Tolerance& tol, const Complements& comps = {},
                       const ContourOptions& opts = {});

/// max ||(I - z A_1) H(z) - (I - P)|| with H(z) = R(z) + P / (z - 1), at seeded z
/// with |z - 1| in [0.2, 0.8] times the default contour radius.
double i1_identity_residual(const CompanionPencil& cp, const I1Report& rep, const Tolerance& tol,
                            std::size_t samples = 10, std::uint64_t seed = 1);

struct I2Identities {
  double annihilation = 0.0;   // max(||(I - A_1) N_{-2}||, ||N_{-2} (I - A_1)||)
  double commutation = 0.0;    // max(||N_{-2} A_1 - N_{-2}||, ||A_1 N_{-2} - N_{-2}||)
  double kernel_identity = 0.0;  // ||(N_{-2} + P) k - k|| over an orthonormal basis of K
  double max() const;
};

I2Identities i2_identities(const CompanionPencil& cp, const I2Report& rep);

enum class IntegrationClass { holomorphic, i1, i2, higher };
const char* to_string(IntegrationClass c) noexcept;

struct Classification {
  IntegrationClass cls = IntegrationClass::holomorphic;
  std::size_t pole_order = 0;
  bool i1 = false;
  bool i2 = false;
  /// The class derived from the subspace conditions agrees with the contour pole order.
  bool consistent = false;
  std::string message;
};

Classification classify(const CompanionPencil& cp, const Tolerance& tol, const ContourOptions& opts = {});

}  // namespace grj
