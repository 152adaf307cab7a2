#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pie/convert.hpp"
#include "pie/fixtures.hpp"
#include "pie/pialg.hpp"
#include "test_util.hpp"

using namespace pie;
namespace pt = pie::testing;

namespace {

MatPoly1 column1(Coeffs1 c) {
  MatPoly1 p(1, 1);
  p.set(0, 0, std::move(c));
  return p;
}

}  // namespace

TEST_CASE("apply: identity and cumulative integral") {
  std::mt19937_64 rng(3);
  PIOperator id = PIOperator::identity(2, 0.0, 1.0);
  MatPoly1 v = pt::randomPoly1(rng, 2, 1, 4);
  CHECK((id.apply(v) - v).maxAbsCoeff() < 1e-14);

  // R1 = 1 applied to v = 1 gives s
  MatPoly2 one(1, 1);
  one.accumulate(0, 0, 0, 0, 1.0);
  PIOperator cum(MatPoly1::zero(1, 1), one, MatPoly2::zero(1, 1), 0.0, 1.0);
  MatPoly1 img = cum.apply(column1({1.0}));
  CHECK(img.entry(0, 0) == Coeffs1{0.0, 1.0});
}

TEST_CASE("apply: McKendrick T on constant fundamental state") {
  PIESystem sys = convert(mckendrickSpec(0.5));
  MatPoly1 x = sys.T.apply(column1({1.0}));
  // x(s) = s + int_0^1 B_Q = s + 1/10
  Coeffs1 c = x.entry(0, 0);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-12));
  // birth boundary condition: x(0) = int_0^1 (t - t^2) x(t) dt
  MatPoly1 h(1, 1);
  h.set(0, 0, {0.0, 1.0, -1.0});
  double birth = integrateFull(h * x, 0.0, 1.0)(0, 0);
  CHECK(x.eval(0.0)(0, 0) == doctest::Approx(birth).epsilon(1e-12));
}

TEST_CASE("add and scale") {
  std::mt19937_64 rng(17);
  PIOperator p = pt::randomOperator(rng, 2, 2, 3, 0.0, 1.0);
  CHECK((p + p.scaled(-1.0)).maxAbsCoeff() == 0.0);
  CHECK(p.scaled(0.0).maxAbsCoeff() == 0.0);
  PIOperator m1 = PIOperator::multiplier(pt::randomPoly1(rng, 2, 2, 2), 0.0, 1.0);
  PIOperator m2 = PIOperator::multiplier(pt::randomPoly1(rng, 2, 2, 2), 0.0, 1.0);
  PIOperator sum = m1 + m2;
  CHECK(sum.R1().isZero());
  CHECK(sum.R2().isZero());
  CHECK((sum.R0() - (m1.R0() + m2.R0())).maxAbsCoeff() < 1e-14);
}

TEST_CASE("compose: identity and nested-apply oracle") {
  std::mt19937_64 rng(23);
  PIOperator q = pt::randomOperator(rng, 2, 2, 2, 0.0, 1.0);
  PIOperator id = PIOperator::identity(2, 0.0, 1.0);
  CHECK(kernelEqual(id.compose(q), q, 1e-12).equal);

  for (int rep = 0; rep < 10; ++rep) {
    PIOperator p = pt::randomOperator(rng, 2, 3, 2, 0.0, 1.0);
    PIOperator r = pt::randomOperator(rng, 3, 2, 2, 0.0, 1.0);
    PIOperator pr = p.compose(r);
    MatPoly1 v = pt::randomPoly1(rng, 2, 1, 3);
    MatPoly1 lhs = pr.apply(v);
    MatPoly1 rhs = p.apply(r.apply(v));
    CHECK((lhs - rhs).maxAbsCoeff() < 1e-10 * (1.0 + rhs.maxAbsCoeff()));
  }
}

TEST_CASE("compose: two pure lower integrations give kernel s - theta") {
  MatPoly2 one(1, 1);
  one.accumulate(0, 0, 0, 0, 1.0);
  PIOperator low(MatPoly1::zero(1, 1), one, MatPoly2::zero(1, 1), 0.0, 1.0);
  PIOperator sq = low.compose(low);
  CHECK(sq.R0().isZero());
  CHECK(sq.R2().isZero());
  Grid2 g = sq.R1().entry(0, 0);
  REQUIRE(g.size() == 2);
  CHECK(g[1][0] == doctest::Approx(1.0));   // s
  CHECK(g[0][1] == doctest::Approx(-1.0));  // -theta
}

TEST_CASE("compose degree bound") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 5; ++rep) {
    PIOperator p = pt::randomOperator(rng, 2, 2, 2, 0.0, 1.0);
    PIOperator q = pt::randomOperator(rng, 2, 2, 3, 0.0, 1.0);
    CHECK(p.compose(q).maxTotalDegree() <=
          p.maxTotalDegree() + q.maxTotalDegree() + 1);
  }
}

TEST_CASE("adjoint: involution and symmetric multiplier") {
  std::mt19937_64 rng(41);
  PIOperator p = pt::randomOperator(rng, 2, 3, 3, 0.0, 1.0);
  CHECK(kernelEqual(p.adjoint().adjoint(), p, 1e-14).equal);

  Matrix sym(2, 2);
  sym << 2.0, 0.5, 0.5, -1.0;
  PIOperator m = PIOperator::multiplier(sym, 0.0, 1.0);
  CHECK(kernelEqual(m.adjoint(), m, 1e-14).equal);
}

TEST_CASE("adjoint: quadrature inner-product identity") {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 6; ++rep) {
    PIOperator p = pt::randomOperator(rng, 2, 2, 2, 0.0, 1.0);
    MatPoly1 u = pt::randomPoly1(rng, 2, 1, 3);
    MatPoly1 v = pt::randomPoly1(rng, 2, 1, 3);
    double lhs = pt::innerApplied(p, u, v);           // <Pu, v>
    double rhs = pt::innerApplied(p.adjoint(), v, u);  // <P*v, u>
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("adjoint contravariance under composition") {
  std::mt19937_64 rng(47);
  PIOperator p = pt::randomOperator(rng, 2, 2, 2, 0.0, 1.0);
  PIOperator q = pt::randomOperator(rng, 2, 2, 2, 0.0, 1.0);
  PIOperator lhs = p.compose(q).adjoint();
  PIOperator rhs = q.adjoint().compose(p.adjoint());
  CHECK(kernelEqual(lhs, rhs, 1e-10).equal);
}

TEST_CASE("compose associativity") {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 4; ++rep) {
    PIOperator p = pt::randomOperator(rng, 2, 2, 2, 0.0, 1.0);
    PIOperator q = pt::randomOperator(rng, 2, 2, 2, 0.0, 1.0);
    PIOperator r = pt::randomOperator(rng, 2, 2, 2, 0.0, 1.0);
    CHECK(kernelEqual(p.compose(q.compose(r)), p.compose(q).compose(r), 1e-10)
              .equal);
  }
}

TEST_CASE("gram_operator: identity, zero, and positivity") {
  GramBasis z0(2, 0, 0, 0.0, 1.0);
  // Z1-only contribution with Q restricted to the pointwise block
  Matrix q = Matrix::Zero(z0.imageDim(), z0.imageDim());
  q.topLeftCorner(2, 2) = Matrix::Identity(2, 2);
  PIOperator g = gramOperator(z0, q);
  CHECK(kernelEqual(g, PIOperator::identity(2, 0.0, 1.0), 1e-12).equal);

  CHECK(gramOperator(z0, Matrix::Zero(z0.imageDim(), z0.imageDim()))
            .maxAbsCoeff() == 0.0);

  std::mt19937_64 rng(61);
  GramBasis z(1, 2, 1, 0.0, 1.0);
  Matrix h = Matrix::Random(z.imageDim(), z.imageDim());
  Matrix psd = h * h.transpose();
  PIOperator gp = gramOperator(z, psd);
  for (int rep = 0; rep < 20; ++rep) {
    MatPoly1 v = pt::randomPoly1(rng, 1, 1, 4);
    double val = pt::innerApplied(gp, v, v);
    CHECK(val >= -1e-9 * (1.0 + std::abs(val)));
  }

  CHECK_THROWS_AS(gramOperator(z, Matrix::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("kernel_equal reporting") {
  std::mt19937_64 rng(67);
  PIOperator p = pt::randomOperator(rng, 2, 2, 2, 0.0, 1.0);
  KernelComparison same = kernelEqual(p, p, 1e-12);
  CHECK(same.equal);
  CHECK(same.maxDiscrepancy == 0.0);

  PIOperator eps = PIOperator::identity(2, 0.0, 1.0).scaled(1e-6);
  KernelComparison diff = kernelEqual(p, p + eps, 1e-10);
  CHECK_FALSE(diff.equal);
  CHECK(diff.maxDiscrepancy == doctest::Approx(1e-6));
}
