#include "doctest.h"
#include "oracles.hpp"

#include "grj/error.hpp"

using namespace grj;
using grj::test::op2;

namespace {

const Tolerance kTol{};

OperatorMatrix unit(std::size_t n, std::size_t i) {
  OperatorMatrix e = OperatorMatrix::Zero(static_cast<Eigen::Index>(n), 1);
  e(static_cast<Eigen::Index>(i), 0) = 1.0;
  return e;
}

OperatorMatrix oblique() {
  OperatorMatrix a(2, 2);
  a << 1.0, 0.0, 1.0, 0.0;
  return a;
}

std::vector<std::pair<std::string, CompanionPencil>> i2_models() {
  std::vector<std::pair<std::string, CompanionPencil>> out = {
      {"ex-c0", linearize(model_c0(8))},
      {"fx-ar2-i2", linearize(fixture_ar2_i2())},
      {"fx-jordan-i2", linearize(ar1(fixture_jordan_i2().a1))},
  };
  JordanSpec s;
  s.unit_blocks = {2, 1};
  s.stable = {0.4, -0.3};
  s.cond = 30.0;
  s.seed = 17;
  out.emplace_back("jordan {2,1}", linearize(ar1(build_jordan(s).a1)));
  s.unit_blocks = {2, 2, 1};
  s.seed = 23;
  out.emplace_back("jordan {2,2,1}", linearize(ar1(build_jordan(s).a1)));
  return out;
}

std::vector<Complements> complement_choices(const CompanionPencil& cp, std::uint64_t seed) {
  const OperatorMatrix m = identity(cp.big_dim) - cp.a1;
  const std::size_t r = range_basis(m, kTol).dim();
  const std::size_t k = kernel_basis(m, kTol).dim();
  const Subspace ran_c = test::random_subspace(seed, cp.big_dim, cp.big_dim - r, kTol);
  const Subspace ker_c = test::random_subspace(seed + 1, cp.big_dim, cp.big_dim - k, kTol);
  const Subspace ran_c2 = test::random_subspace(seed + 2, cp.big_dim, cp.big_dim - r, kTol);
  const Subspace ker_c2 = test::random_subspace(seed + 3, cp.big_dim, cp.big_dim - k, kTol);
  return {Complements{}, Complements{ran_c, std::nullopt}, Complements{std::nullopt, ker_c},
          Complements{ran_c2, ker_c2}};
}

}  // namespace

TEST_CASE("check_i1 on an idempotent coefficient") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const OperatorMatrix s = test::gaussian_matrix(seed, 4, 4).cast<Scalar>();
    OperatorMatrix d = OperatorMatrix::Zero(4, 4);
    d(0, 0) = d(1, 1) = 1.0;
    const OperatorMatrix p = s * d * s.inverse();
    const I1Report rep = check_i1(linearize(ar1(p)), kTol);
    CHECK(rep.holds);
    CHECK(op2(rep.p_operator - p) <= 1e-9 * op2(s) * op2(s.inverse()));
  }
}

TEST_CASE("check_i1 fails on the c0 model") {
  const I1Report rep = check_i1(linearize(model_c0(8)), kTol);
  CHECK_FALSE(rep.holds);
  CHECK(rep.defect == 1);
  CHECK_THROWS_AS(i1_components(linearize(model_c0(8)), 5, kTol), Error);
}

TEST_CASE("check_i1 recovers the spectral projection of a similarity transform") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const OperatorMatrix s = test::gaussian_matrix(seed + 10, 4, 4).cast<Scalar>();
    const OperatorMatrix si = s.inverse();
    OperatorMatrix d = OperatorMatrix::Zero(4, 4);
    d(0, 0) = d(1, 1) = 1.0;
    OperatorMatrix a = d;
    a(2, 2) = 0.3;
    a(3, 3) = 0.2;
    const I1Report rep = check_i1(linearize(ar1(s * a * si)), kTol);
    REQUIRE(rep.holds);
    CHECK(op2(rep.p_operator - s * d * si) <= 1e-9 * op2(s) * op2(si));
    CHECK(rep.cross_check_residual <= 1e-7);
  }
}

TEST_CASE("i1_components of a random walk") {
  const I1Report rep = i1_components(linearize(ar1(identity(3))), 10, kTol);
  CHECK(op2(rep.long_run - identity(3)) <= 1e-12);
  for (const auto& h : rep.h_coeffs) CHECK(op2(h) <= 1e-12);
  CHECK_FALSE(rep.attractor_proper);
}

TEST_CASE("i1_components of the oblique AR(1)") {
  const OperatorMatrix a = oblique();
  const I1Report rep = i1_components(linearize(ar1(a)), 10, kTol);
  CHECK(op2(rep.long_run - a) <= 1e-12);
  REQUIRE(rep.h_coeffs.size() == 11);
  CHECK(op2(rep.h_coeffs[0] - (identity(2) - a)) <= 1e-12);
  for (std::size_t j = 1; j < rep.h_coeffs.size(); ++j) CHECK(op2(rep.h_coeffs[j]) <= 1e-12);
  CHECK(rep.attractor_proper);
}

TEST_CASE("I(1) closed forms agree with the contour on every I(1) model") {
  for (const char* id : {"ex-selfadjoint", "ex-evenodd", "fx-random-walk", "fx-oblique-ar1", "fx-ar2-i1", "fx-ar3-i1"}) {
    CAPTURE(id);
    const CompanionPencil cp = linearize(builtin_model(id).ar);
    const I1Report rep = i1_components(cp, 20, kTol);
    CHECK(rep.cross_check_residual <= 1e-7);
    CHECK(rep.h_cross_check_residual <= 1e-6);
    CHECK(rep.h_decay.decays());
    CHECK(i1_identity_residual(cp, rep, kTol) <= 1e-7);
    // ran P = ker(I - A_1), ker P = ran(I - A_1)
    CHECK(same_subspace(range_basis(rep.p_operator, kTol), rep.ker, kTol));
    CHECK(same_subspace(kernel_basis(rep.p_operator, kTol), rep.ran, kTol));
  }
}

TEST_CASE("check_i2 on the c0 model") {
  const CompanionPencil cp = linearize(model_c0(8));
  const I2Report rep = check_i2(cp, kTol);
  REQUIRE(rep.holds);
  CHECK(rep.k_space.dim() == 1);
  CHECK(same_subspace(rep.k_space, Subspace::span(unit(8, 1), kTol), kTol));
  const Subspace gk = Subspace::span(rep.gen_inverse * rep.k_space.basis(), kTol);
  CHECK(same_subspace(gk, Subspace::span(unit(8, 0), kTol), kTol));
}

TEST_CASE("check_i2 is false with K = {0} on I(1) models") {
  for (const char* id : {"fx-random-walk", "fx-oblique-ar1", "fx-ar2-i1", "ex-evenodd"}) {
    const I2Report rep = check_i2(linearize(builtin_model(id).ar), kTol);
    CHECK_FALSE(rep.holds);
    CHECK(rep.k_space.is_zero());
  }
  CHECK_THROWS_AS(i2_components(linearize(fixture_oblique_ar1()), 5, kTol), Error);
}

TEST_CASE("I(2) subspace invariants") {
  for (const auto& [name, cp] : i2_models()) {
    CAPTURE(name);
    const I2Report rep = check_i2(cp, kTol);
    REQUIRE(rep.holds);
    const OperatorMatrix m = identity(cp.big_dim) - cp.a1;
    CHECK(op2(m * rep.k_space.basis()) <= kTol.residual_abs);
    CHECK(rep.ran.membership_residual(rep.k_space.basis()) <= kTol.residual_abs);
    const Subspace w = Subspace::span((identity(cp.big_dim) - rep.p_ran) * rep.ker.basis(), kTol, 1.0);
    CHECK(same_subspace(w, rep.w_space, kTol));
  }
}

TEST_CASE("I(2) closed forms agree with the contour under several complement choices") {
  std::uint64_t seed = 100;
  for (const auto& [name, cp] : i2_models()) {
    std::size_t distinct = 0;
    for (const Complements& c : complement_choices(cp, seed += 10)) {
      CAPTURE(name);
      const I2Report rep = i2_components(cp, 20, kTol, c);
      CHECK(rep.cross_check_residual <= 1e-6);
      CHECK(rep.h_cross_check_residual <= 1e-6);
      CHECK(i2_identities(cp, rep).max() <= 1e-7);
      ++distinct;
    }
    CHECK(distinct >= 3);
  }
}

TEST_CASE("I(2) Jordan model against the closed-form block resolvent") {
  const JordanModel jm = fixture_jordan_i2();
  const CompanionPencil cp = linearize(ar1(jm.a1));
  const I2Report rep = i2_components(cp, 10, kTol);
  const auto oracle = test::jordan_principal_part(jm);
  CHECK(op2(rep.n_minus2 - oracle.at(-2)) <= 1e-8);
  CHECK(op2(rep.n_minus2 + rep.p_op - oracle.at(-1)) <= 1e-8);
}

TEST_CASE("c0 model: N_{-2} has rank one") {
  const I2Report rep = i2_components(linearize(model_c0(8)), 10, kTol);
  CHECK(numerical_rank(rep.n_minus2, kTol) == 1);
  CHECK(rep.cross_check_residual <= 1e-7);
}

TEST_CASE("supplied complements are validated") {
  const CompanionPencil cp = linearize(model_c0(8));
  const I2Report rep = check_i2(cp, kTol);
  Complements bad;
  bad.ran_c = rep.ran;
  CHECK_THROWS_AS(check_i2(cp, kTol, bad), Error);
  Complements wrong_dim;
  wrong_dim.ker_c = Subspace::full(3);
  CHECK_THROWS_AS(check_i2(cp, kTol, wrong_dim), Error);
}

TEST_CASE("exactly one class per model, matching the pole order") {
  for (const auto& id : builtin_ids()) {
    CAPTURE(id);
    const Classification c = classify(linearize(builtin_model(id).ar), kTol);
    CHECK(c.consistent);
    CHECK_FALSE((c.i1 && c.i2));
  }
  const Classification none = classify(linearize(ar1(0.5 * identity(2))), kTol);
  CHECK(none.cls == IntegrationClass::holomorphic);
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const JordanModel jm = build_jordan(random_jordan_spec(seed));
    const Classification c = classify(linearize(ar1(jm.a1)), kTol);
    CAPTURE(seed);
    CHECK(c.i1 == (jm.max_block == 1));
    CHECK(c.i2 == (jm.max_block == 2));
    CHECK(c.consistent);
  }
}

TEST_CASE("geometric decay fit") {
  const GeometricDecay d = fit_geometric_decay({1.0, 0.5, 0.25, 0.125});
  CHECK(d.rho == doctest::Approx(0.5));
  CHECK(d.c >= 1.0 - 1e-12);
  const GeometricDecay z = fit_geometric_decay({1.0, 1e-17, 0.0, 1e-18});
  CHECK(z.decays());
}
