#include "doctest.h"
#include "oracles.hpp"

#include "grj/error.hpp"

using namespace grj;
using grj::test::op2;

namespace {

const Tolerance kTol{};

OperatorMatrix diag(std::initializer_list<double> d) {
  OperatorMatrix m = OperatorMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return m;
}

RowFunctional row(std::initializer_list<double> v) {
  RowFunctional f(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) f[i++] = x;
  return f;
}

}  // namespace

TEST_CASE("positive definiteness") {
  CHECK(positive_definite_check(identity(3), kTol));
  CHECK_FALSE(positive_definite_check(diag({1.0, 0.0}), kTol));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RealMatrix b = test::gaussian_matrix(seed, 6, 4);
    CHECK(positive_definite_check((b.transpose() * b).cast<Scalar>(), kTol));
  }
  OperatorMatrix skew = identity(2);
  skew(0, 1) = 0.2;
  const DefiniteCheck d = definiteness(skew, kTol);
  CHECK(d.asymmetry == doctest::Approx(0.2));
  CHECK(d.positive_definite);
}

TEST_CASE("MA validation") {
  CHECK_THROWS_AS(make_ma({identity(2)}, diag({1.0, -1.0}), kTol), Error);
  CHECK_THROWS_AS(make_ma({identity(2)}, identity(3), kTol), Error);
  CHECK_THROWS_AS(make_ma({}, identity(2), kTol), Error);
  const MaRepresentation ma = make_ma({identity(2), 0.5 * identity(2)}, identity(2), kTol);
  CHECK(op2(ma.sum_operator - 1.5 * identity(2)) == 0.0);
}

TEST_CASE("cointegration report on direct examples") {
  const CointegrationReport full = cointegration_report(make_ma({identity(3)}, identity(3), kTol), kTol);
  CHECK(full.dim_attractor == 3);
  CHECK(full.dim_cointegrating == 0);

  const CointegrationReport r = cointegration_report(make_ma({diag({1.0, 0.0})}, identity(2), kTol), kTol);
  CHECK(r.dim_cointegrating == 1);
  OperatorMatrix e2(2, 1);
  e2 << 0.0, 1.0;
  CHECK(same_subspace(r.cointegrating, Subspace::span(e2, kTol), kTol));
  CHECK(op2(r.long_run_cov - diag({1.0, 0.0})) <= 1e-15);
  CHECK(r.assumption_ok);

  const CointegrationReport bad = cointegration_report(make_ma({identity(2)}, diag({1.0, 0.0}), kTol), kTol);
  CHECK_FALSE(bad.assumption_ok);
  CHECK_FALSE(bad.note.empty());
}

TEST_CASE("annihilator duality and left-null functionals on I(1) models") {
  for (const char* id : {"ex-selfadjoint", "ex-evenodd", "fx-random-walk", "fx-oblique-ar1", "fx-ar2-i1", "fx-ar3-i1"}) {
    CAPTURE(id);
    const BuiltinModel m = builtin_model(id);
    const I1Report rep = i1_components(linearize(m.ar), 30, kTol);
    const MaRepresentation ma = ma_from_i1(rep, m.cov, kTol);
    const CointegrationReport c = cointegration_report(ma, kTol);
    CHECK(c.dim_attractor + c.dim_cointegrating == m.ar.dim);
    CHECK(c.defect == 0);
    CHECK(c.dim_cointegrating == m.ar.dim - numerical_rank(rep.long_run, kTol));
    CHECK(op2(c.functionals() * ma.sum_operator) <= kTol.residual_abs);
    // the two pipelines agree: the MA long-run operator is Pi_p P Pi_p^*
    CHECK(op2(beveridge_nelson(ma).a - rep.long_run) <= 1e-7);
    CHECK(classify_integration(ma, kTol).i0);
  }
}

TEST_CASE("functional extension") {
  OperatorMatrix e2(2, 1);
  e2 << 0.0, 1.0;
  const Subspace v = Subspace::span(e2, kTol);
  const OperatorMatrix pv = diag({0.0, 1.0});
  const Extension ext = extend_functional(row({1.0}), v, pv, kTol);
  CHECK(op2(ext.functional - row({0.0, 1.0})) <= 1e-15);
  CHECK(ext.isometry == IsometryStatus::holds);

  const Extension zero = extend_functional(row({0.0}), v, pv, kTol);
  CHECK(op2(zero.functional) == 0.0);

  CHECK_THROWS_AS(extend_functional(row({1.0}), v, diag({0.5, 1.0}), kTol), Error);
  CHECK_THROWS_AS(extend_functional(row({1.0}), v, diag({1.0, 0.0}), kTol), Error);
  try {
    extend_functional(row({1.0}), v, diag({0.5, 1.0}), kTol);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotProjection);
  }
}

TEST_CASE("extension of a restriction recovers cointegrating functionals") {
  // V complements the attractor ran A; P_V projects onto V along ran A
  const BuiltinModel m = builtin_model("fx-ar2-i1");
  const I1Report rep = i1_components(linearize(m.ar), 30, kTol);
  const MaRepresentation ma = ma_from_i1(rep, m.cov, kTol);
  const CointegrationReport c = cointegration_report(ma, kTol);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Subspace v = test::random_subspace(seed, m.ar.dim, c.dim_cointegrating, kTol);
    const OperatorMatrix pv = oblique_projection(v, c.attractor, kTol);
    for (Eigen::Index j = 0; j < c.functionals().rows(); ++j) {
      const RowFunctional f = c.functionals().row(j);
      const Extension ext = extend_functional(restriction(f, v), v, pv, kTol);
      CHECK(op2(ext.functional - f) <= 1e-12);
      CHECK(op2(ext.functional * c.attractor.basis()) <= 1e-12);
      if (ext.isometry != IsometryStatus::untested) CHECK(ext.isometry == IsometryStatus::holds);
    }
  }
}

TEST_CASE("isometry is tested only with a contractive projection") {
  OperatorMatrix col(2, 1);
  col << 1.0, 1.0;
  const Subspace v = Subspace::span(col, kTol);
  OperatorMatrix along(2, 1);
  along << 0.0, 1.0;
  const OperatorMatrix pv = oblique_projection(v, Subspace::span(along, kTol), kTol);
  const Extension ext = extend_functional(row({1.0}), v, pv, kTol);
  CHECK(ext.projection_norm > 1.0);
  CHECK(ext.isometry == IsometryStatus::untested);

  const Extension orth = extend_functional(row({2.0}), v, v.orthogonal_projector(), kTol);
  CHECK(orth.isometry == IsometryStatus::holds);
  CHECK(orth.extended_norm == doctest::Approx(orth.restricted_norm));
  for (NormKind k : {NormKind::one, NormKind::sup}) {
    const Extension e = extend_functional(row({2.0}), v, v.orthogonal_projector(), kTol, k);
    CHECK(e.isometry != IsometryStatus::fails);
  }
}

TEST_CASE("Beveridge-Nelson pieces") {
  const MaRepresentation single = make_ma({diag({2.0, 3.0})}, identity(2), kTol);
  const BeveridgeNelson bn1 = beveridge_nelson(single);
  CHECK(op2(bn1.a - diag({2.0, 3.0})) == 0.0);
  REQUIRE(bn1.tilde.size() == 1);
  CHECK(op2(bn1.tilde[0]) == 0.0);

  std::vector<OperatorMatrix> coeffs;
  for (int k = 0; k <= 10; ++k) coeffs.push_back(std::pow(0.5, k) * identity(2));
  const BeveridgeNelson bn = beveridge_nelson(make_ma(coeffs, identity(2), kTol));
  CHECK(op2(bn.a - (2.0 - std::pow(2.0, -10)) * identity(2)) <= 1e-14);
  for (int k = 0; k <= 10; ++k) {
    // -sum_{j=k+1}^{10} 2^{-j} = -(2^{-k} - 2^{-10})
    const double expected = -(std::pow(0.5, k) - std::pow(2.0, -10));
    CHECK(op2(bn.tilde[static_cast<std::size_t>(k)] - expected * identity(2)) <= 1e-14);
  }
  CHECK(bn.reconstruction_residual <= 1e-14);
}

TEST_CASE("Beveridge-Nelson tilde coefficients decay for I(1) models") {
  const BuiltinModel m = builtin_model("fx-ar3-i1");
  const I1Report rep = i1_components(linearize(m.ar), 60, kTol);
  const BeveridgeNelson bn = beveridge_nelson(ma_from_i1(rep, m.cov, kTol));
  std::vector<double> norms;
  for (const auto& t : bn.tilde) norms.push_back(op2(t));
  CHECK(fit_geometric_decay(norms).decays());
  CHECK(bn.reconstruction_residual <= 1e-12);
}

TEST_CASE("integration classification") {
  CHECK_FALSE(classify_integration(make_ma({OperatorMatrix::Zero(2, 2)}, identity(2), kTol), kTol).i0);
  CHECK(classify_integration(make_ma({identity(2)}, identity(2), kTol), kTol).i0);
  // A_k = At_k - At_{k-1} telescopes to A = 0
  std::vector<OperatorMatrix> tilde;
  for (int k = 0; k < 6; ++k) tilde.push_back(std::pow(0.6, k) * test::gaussian_matrix(k + 1, 2, 2).cast<Scalar>());
  std::vector<OperatorMatrix> coeffs{tilde[0]};
  for (std::size_t k = 1; k < tilde.size(); ++k) coeffs.push_back(tilde[k] - tilde[k - 1]);
  coeffs.push_back(-tilde.back());
  const I0Verdict v = classify_integration(make_ma(coeffs, identity(2), kTol), kTol);
  CHECK_FALSE(v.i0);
  CHECK(v.long_run_norm <= 1e-14);
}
