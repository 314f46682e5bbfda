#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "grj/cointegration.hpp"
#include "grj/representation.hpp"

namespace grj {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// One simulated AR path. Row t - 1 of `states` / `innovations` holds X_t / eps_t
/// for t = 1..horizon; `initial` is X_0, X_{-1}, ..., X_{1-p}.
struct SamplePath {
  std::string model_id;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t horizon = 0;
  RealMatrix states;
  RealMatrix innovations;
  std::vector<RealVector> initial;
  RealMatrix cov_factor;  // eps_t = L z_t

  std::size_t dim() const { return static_cast<std::size_t>(cov_factor.rows()); }
  /// X_t for t = 0..horizon.
  RealVector state(std::size_t t) const;
  /// eps_t for any integer t; t <= 0 are pre-sample draws from the same stream.
  RealVector innovation(std::int64_t t) const;
};

/// L with L L^T = C: Cholesky when C is positive definite, else the symmetric square root.
RealMatrix covariance_factor(const OperatorMatrix& cov, const Tolerance& tol);

/// Standard normal z_{t,i} from counter (t + 2^32) n + i of (seed, stream).
RealVector standard_innovation(std::uint64_t seed, std::uint64_t stream, std::int64_t t, std::size_t n);

/// Real part of an AR pencil; throws InvalidInput on a non-negligible imaginary part.
std::vector<RealMatrix> real_coefficients(const ArPencil& ar);

SamplePath simulate_ar(const ArPencil& ar, const OperatorMatrix& cov, std::size_t horizon, std::uint64_t seed,
                       const std::vector<RealVector>& initial = {}, std::uint64_t stream = 0,
                       const std::string& model_id = "");

/// Replication r uses stream r. Results are independent of the thread count.
std::vector<SamplePath> simulate_ensemble(const ArPencil& ar, const OperatorMatrix& cov, std::size_t horizon,
                                          std::uint64_t seed, std::size_t replications, unsigned threads = 1,
                                          const std::vector<RealVector>& initial = {},
                                          const std::string& model_id = "");

/// Bit-for-bit equality of states, innovations and initial values.
bool identical_paths(const SamplePath& a, const SamplePath& b);

enum class RepresentationClass { i1, i2 };
const char* to_string(RepresentationClass c) noexcept;

struct RepresentationCheck {
  RepresentationClass cls = RepresentationClass::i1;
  double max_residual = 0.0;
  double threshold = 0.0;  // 1e-6 (1 + max_t ||X_t||)
  bool passes = false;
  RealVector tau0;
  RealVector tau1;
  /// tau0 = Pi_p P Y_0 and tau1 = -Pi_p G Y_0 from the initial state.
  RealVector tau0_exact;
  RealVector tau1_exact;
  /// ||eps_t - A(L) X_t^formula|| over t >= p.
  double filter_residual = 0.0;
  std::size_t j_used = 0;
  double tail_bound = 0.0;
  double max_state_norm = 0.0;
};

inline constexpr double kRepresentationRel = 1e-6;
inline constexpr double kTailTarget = 1e-10;

/// Rebuilds the path from its innovations through the closed-form representation:
///   X_t = tau0 + tau1 t + Pi_p P Pi_p^* S_t - Pi_p G Pi_p^* sum_{s<=t} (t - s) eps_s
///         + Pi_p nu_t + Pi_p A_1^t ((I - P) Y_0 - nu_0),
/// nu_t = sum_{j<=J} A_1^j (I - P) Pi_p^* eps_{t-j}, G = (I - A_1) P (zero for I(1)).
/// J is raised from j_max until the fitted tail bound of h_j is below kTailTarget.
/// tau0 (and tau1) are fitted by least squares on t = 0..max(p, 3) - 1.
/// Throws ClassMismatch when the report class differs from the contour pole order.
RepresentationCheck verify_representation(const CompanionPencil& cp, const SamplePath& path, const I1Report& rep,
                                          std::size_t j_max, const Tolerance& tol,
                                          const ContourOptions& opts = {});
RepresentationCheck verify_representation(const CompanionPencil& cp, const SamplePath& path, const I2Report& rep,
                                          std::size_t j_max, const Tolerance& tol,
                                          const ContourOptions& opts = {});

enum class SlopeMethod { variogram, endpoints };
const char* to_string(SlopeMethod m) noexcept;
SlopeMethod parse_slope_method(const std::string& text);

struct SlopeResult {
  double slope = 0.0;
  double std_error = 0.0;
  bool stationary = true;
  SlopeMethod method = SlopeMethod::variogram;
};

/// Variance growth per unit time of a scalar ensemble series[r][t], t = 0..T.
/// endpoints: ensemble variance at T/4, T/2, 3T/4, T regressed on t.
/// variogram: mean squared increments over lags T/32, T/16, 3T/32, T/8 with start
/// times in [T/4, T - lag], regressed on the lag.
/// The standard error comes from the spread of per-replication contributions;
/// stationary iff |slope| <= 3 standard errors.
SlopeResult stationarity_slope(const std::vector<std::vector<double>>& series,
                               SlopeMethod method = SlopeMethod::variogram);

inline constexpr std::size_t kMinReplications = 100;
inline constexpr double kSlopeSigmas = 3.0;

/// f(X_t) for t = 0..T per path, or f(X_t - X_{t-1}) for t = 1..T when `difference`.
std::vector<std::vector<double>> functional_series(const std::vector<SamplePath>& paths, const RealVector& f,
                                                   bool difference = false);

struct ProbeItem {
  RealVector functional;
  SlopeResult result;
};

struct PolynomialProbe {
  RealMatrix tier1;       // rows f with f Pi_p N_{-2} Pi_p^* = 0
  RealMatrix tier0;       // rows of tier1 that also annihilate Pi_p P Pi_p^*
  std::vector<ProbeItem> differences_tier1;  // f(Delta X) for f in tier1: stationary
  std::vector<ProbeItem> levels_tier0;       // f(X) for f in tier0: stationary
  std::vector<ProbeItem> levels_tier1_only;  // f(X) for f in tier1 outside tier0: not stationary
  std::vector<ProbeItem> differences_outside;  // f(Delta X) for f outside tier1: not stationary
  bool two_tier = false;
};

/// Throws NotI2 unless rep.holds.
PolynomialProbe polynomial_cointegration_probe(const std::vector<SamplePath>& paths, const I2Report& rep,
                                               const Tolerance& tol, SlopeMethod method = SlopeMethod::variogram);

struct LoadedItem {
  RealVector functional;
  SlopeResult result;
  double expected = 0.0;  // f A C A^T f^T
  double relative_error = 0.0;
};

struct CointegrationProbe {
  std::vector<ProbeItem> cointegrating;  // basis of the cointegrating space: stationary
  std::vector<LoadedItem> loaded;        // nonzero long-run loading: not stationary
};

/// Levels probe for an I(1) ensemble. Loaded functionals are a real basis of the
/// orthogonal complement of the cointegrating space and every coordinate
/// functional with nonzero loading.
CointegrationProbe cointegration_probe(const std::vector<SamplePath>& paths, const CointegrationReport& rep,
                                       const Tolerance& tol, SlopeMethod method = SlopeMethod::variogram);

/// Rows spanning the real left null space of m.
RealMatrix left_null_rows(const OperatorMatrix& m, const Tolerance& tol);

}  // namespace grj
