#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pie/fixtures.hpp"
#include "pie/model.hpp"
#include "test_util.hpp"

using namespace pie;
namespace pt = pie::testing;

TEST_CASE("validate: fixtures are well-formed") {
  for (const PDESpec& spec :
       {mckendrickSpec(0.5), dirichletDiffusionSpec(3.0), rdObserverSpec(5.0, 2)}) {
    ValidationResult r = validate(spec);
    CHECK(r.valid);
    CHECK(r.errors.empty());
  }
  ValidationResult r = validate(mckendrickSpec(0.5));
  CHECK(r.layout.nx() == 1);
  CHECK(r.layout.nD() == 2);
  CHECK(r.layout.nBC() == 1);
}

TEST_CASE("validate: dimension violations are reported") {
  PDESpec spec = dirichletDiffusionSpec(1.0);
  spec.B = Matrix::Zero(1, 4);  // nBC must be nS = 2
  ValidationResult r = validate(spec);
  CHECK_FALSE(r.valid);
  REQUIRE_FALSE(r.errors.empty());

  PDESpec bad = mckendrickSpec(0.5);
  bad.A0 = MatPoly1::zero(1, 3);  // nD is 2
  CHECK_FALSE(validate(bad).valid);

  PDESpec neg = mckendrickSpec(0.5);
  neg.b = neg.a;
  CHECK_FALSE(validate(neg).valid);
}

TEST_CASE("structural matrices: transport state n=(0,1,0)") {
  StructuralMatrices m = structuralMatrices(StateLayout{0, 1, 0});
  CHECK(m.T.eval(0.37)(0, 0) == 1.0);
  CHECK(m.Q.eval(0.37)(0, 0) == 1.0);
  CHECK(m.U1.rows() == 2);
  CHECK(m.U1(1, 0) == 1.0);  // xf = dx lands in the dx slot
  CHECK(m.U2(0, 0) == 1.0);  // xc = x lands in the x slot
}

TEST_CASE("structural matrices: second-order state n=(0,0,1)") {
  StructuralMatrices m = structuralMatrices(StateLayout{0, 0, 1});
  double eta = 0.4;
  Matrix t = m.T.eval(eta);
  CHECK(t(0, 0) == 1.0);
  CHECK(t(0, 1) == doctest::Approx(eta));
  CHECK(t(1, 0) == 0.0);
  CHECK(t(1, 1) == 1.0);
  Matrix q = m.Q.eval(eta);
  CHECK(q(0, 0) == doctest::Approx(eta));
  CHECK(q(1, 0) == 1.0);
}

TEST_CASE("structural matrices: embedding orthonormality, n=(1,1,1)") {
  StructuralMatrices m = structuralMatrices(StateLayout{1, 1, 1});
  int nx = 3, nS = 3;
  CHECK((m.U1.transpose() * m.U1 - Matrix::Identity(nx, nx)).norm() == 0.0);
  CHECK((m.U2.transpose() * m.U2 - Matrix::Identity(nS, nS)).norm() == 0.0);
  CHECK((m.U1.transpose() * m.U2).norm() == 0.0);
  // every xD slot is covered exactly once
  CHECK((m.U1 * m.U1.transpose() + m.U2 * m.U2.transpose() -
         Matrix::Identity(6, 6))
            .norm() == 0.0);
}

TEST_CASE("T is a one-parameter group: T(u+v) = T(u) T(v)") {
  StructuralMatrices m = structuralMatrices(StateLayout{0, 1, 2});
  for (double u : {0.0, 0.3, -0.8})
    for (double v : {0.5, -0.2}) {
      Matrix lhs = m.T.eval(u + v);
      Matrix rhs = m.T.eval(u) * m.T.eval(v);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
    }
  // the only eta dependence is the x2 <- dx2 coupling block
  CHECK(m.T.derivative().eval(0.9)(1, 3) == 1.0);
}

TEST_CASE("B_T: McKendrick birth law gives 5/6") {
  PDESpec spec = mckendrickSpec(0.25);
  ValidationResult r = validate(spec);
  Matrix bt = computeBT(spec, r.layout);
  REQUIRE(bt.rows() == 1);
  CHECK(bt(0, 0) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
  AdmissibilityReport rep = checkAdmissibility(spec);
  CHECK(rep.admissible);
}

TEST_CASE("B_T: Dirichlet clamp is lower triangular with unit diagonal") {
  PDESpec spec = dirichletDiffusionSpec(2.0);
  AdmissibilityReport rep = checkAdmissibility(spec);
  REQUIRE(rep.BT.rows() == 2);
  CHECK(rep.BT(0, 0) == doctest::Approx(1.0));
  CHECK(rep.BT(0, 1) == doctest::Approx(0.0));
  CHECK(rep.BT(1, 0) == doctest::Approx(1.0));
  CHECK(rep.BT(1, 1) == doctest::Approx(1.0));
  // singular values of [[1,0],[1,1]]: golden-ratio pair
  CHECK(rep.sigmaMin == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
  CHECK(rep.admissible);
}

TEST_CASE("admissibility: Neumann-Neumann slopes alone are degenerate") {
  PDESpec spec = dirichletDiffusionSpec(2.0);
  spec.B = Matrix::Zero(2, 4);
  spec.B(0, 1) = 1.0;  // dx(0)
  spec.B(1, 3) = 1.0;  // dx(1)
  AdmissibilityReport rep = checkAdmissibility(spec);
  CHECK_FALSE(rep.admissible);
  CHECK(rep.sigmaMin < 1e-12);
}

TEST_CASE("admissibility: random specs from the seeded generator") {
  std::mt19937_64 rng(99);
  for (auto [n0, n1, n2] : {std::array{0, 1, 0}, std::array{0, 0, 1},
                            std::array{1, 1, 1}, std::array{0, 2, 1}}) {
    PDESpec spec = pt::randomAdmissibleSpec(rng, n0, n1, n2);
    CHECK(validate(spec).valid);
    CHECK(checkAdmissibility(spec).admissible);
  }
}
