#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grj/pencil.hpp"

namespace grj {

/// c0 sequence example: A_1 a = (a_1, a_1 + a_2, lambda a_3, lambda^2 a_4, ...), truncated to n.
ArPencil model_c0(std::size_t n, double lambda = 0.5);
/// Left-rectangle discretisation of I - V, V the Volterra integration operator on [0, 1].
ArPencil model_volterra(std::size_t n);
/// Q diag(1, ..., 1, mu_1, ...) Q^T with `unit_dim` unit eigenvalues and seeded orthogonal Q.
ArPencil model_selfadjoint(std::size_t n, std::size_t unit_dim = 2, std::uint64_t seed = 7);
/// Reflection averaging (g(x) + g(-x)) / 2 on a symmetric grid of n points.
ArPencil model_evenodd(std::size_t n);

struct JordanSpec {
  std::vector<std::size_t> unit_blocks;  // Jordan block sizes at eigenvalue 1
  std::vector<double> stable;            // remaining (real) eigenvalues
  double cond = 1.0;                     // condition number of the similarity
  std::uint64_t seed = 1;
};

struct JordanModel {
  JordanSpec spec;
  OperatorMatrix a1;
  OperatorMatrix s;
  OperatorMatrix s_inv;
  OperatorMatrix jordan;
  std::size_t max_block = 0;
  std::size_t unit_dim = 0;
};

/// A_1 = S J S^{-1} with S = U diag(sigma) V^T, sigma log-spaced in [1, cond].
JordanModel build_jordan(const JordanSpec& spec);
/// Seeded draw: 1-3 unit blocks of size 1-3, 1-4 stable eigenvalues in [-0.8, 0.8],
/// condition number log-uniform in [1, 1e3].
JordanSpec random_jordan_spec(std::uint64_t seed);

/// Fixtures used by tests and the verify command.
ArPencil fixture_random_walk(std::size_t n = 2);
ArPencil fixture_oblique_ar1();
/// AR(2) in error-correction form, redrawn deterministically until the I(1) condition holds.
ArPencil fixture_ar2_i1(std::uint64_t seed = 11);
/// AR(3) analogue of fixture_ar2_i1.
ArPencil fixture_ar3_i1(std::uint64_t seed = 13);
/// Scalar AR(2) with A(z) = (1 - z)^2.
ArPencil fixture_ar2_i2();
/// Real 3x3 model with one J_2(1) block and a stable eigenvalue.
JordanModel fixture_jordan_i2(std::uint64_t seed = 5);

struct BuiltinModel {
  std::string id;
  std::string description;
  ArPencil ar;
  OperatorMatrix cov;  // innovation covariance (real symmetric)
};

struct BuiltinParams {
  std::size_t n = 0;  // 0 selects the model default
  double lambda = 0.5;
  std::uint64_t seed = 1;
};

/// ex-c0, ex-volterra, ex-selfadjoint, ex-evenodd, ex-jordan and the fixtures
/// fx-random-walk, fx-oblique-ar1, fx-ar2-i1, fx-ar3-i1, fx-ar2-i2, fx-jordan-i2.
BuiltinModel builtin_model(const std::string& id, const BuiltinParams& params = {});
std::vector<std::string> builtin_ids();
bool is_builtin(const std::string& id);

}  // namespace grj
