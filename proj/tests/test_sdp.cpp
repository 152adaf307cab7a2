#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "pie/sdp.hpp"

using namespace pie;

namespace {

Matrix sym(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  int i = 0;
  for (auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// X12 pinned in a 2x2 correlation matrix; feasible iff |rho| <= 1
SDPData correlationProblem(double rho) {
  SDPData d;
  d.blockSizes = {2};
  d.C = {Matrix::Identity(2, 2)};
  d.A = {{sym({{1, 0}, {0, 0}})},
         {sym({{0, 0}, {0, 1}})},
         {sym({{0, 1}, {1, 0}})}};
  d.b.resize(3);
  d.b << 1.0, 1.0, 2.0 * rho;
  return d;
}

Matrix randomOrthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return Eigen::HouseholderQR<Matrix>(m).householderQ();
}

}  // namespace

TEST_CASE("scalar problem: min x subject to x = 1") {
  SDPData d;
  d.blockSizes = {1};
  d.C = {Matrix::Identity(1, 1)};
  d.A = {{Matrix::Identity(1, 1)}};
  d.b = Vector::Constant(1, 1.0);
  SDPSolution sol = solveSDP(d);
  REQUIRE(sol.status == SDPStatus::Optimal);
  CHECK(sol.X[0](0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.y(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.primalObjective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("correlation completion: rho = 0.6 feasible") {
  SDPSolution sol = solveSDP(correlationProblem(0.6));
  REQUIRE(sol.status == SDPStatus::Optimal);
  CHECK(sol.X[0](0, 1) == doctest::Approx(0.6).epsilon(1e-7));
  CHECK(sol.primalObjective == doctest::Approx(2.0).epsilon(1e-7));
  // returned X stays in the cone
  Eigen::SelfAdjointEigenSolver<Matrix> es(sol.X[0], Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > -1e-9);
}

TEST_CASE("correlation completion: rho = 1.5 infeasible") {
  SDPSolution sol = solveSDP(correlationProblem(1.5));
  CHECK(sol.status == SDPStatus::Infeasible);
}

TEST_CASE("sign-impossible constraint is reported infeasible") {
  SDPData d;
  d.blockSizes = {2};
  d.C = {Matrix::Identity(2, 2)};
  d.A = {{sym({{1, 0}, {0, 0}})}};
  d.b = Vector::Constant(1, -1.0);
  SDPSolution sol = solveSDP(d);
  CHECK(sol.status == SDPStatus::Infeasible);
}

TEST_CASE("determinism: identical runs produce identical bits") {
  SDPData d = correlationProblem(0.37);
  SDPSolution s1 = solveSDP(d);
  SDPSolution s2 = solveSDP(d);
  REQUIRE(s1.status == s2.status);
  CHECK(s1.iterations == s2.iterations);
  CHECK((s1.X[0] - s2.X[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.y - s2.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constructed-optimum oracle on random problems") {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 3, m = 3;
    // strictly complementary pair sharing an eigenbasis
    Matrix q = randomOrthogonal(rng, n);
    Vector lx(n), ls(n);
    lx << 1.5, 0.7, 0.0;
    ls << 0.0, 0.0, 1.2;
    Matrix xStar = q * lx.asDiagonal() * q.transpose();
    Matrix sStar = q * ls.asDiagonal() * q.transpose();
    SDPData d;
    d.blockSizes = {n};
    d.A.resize(m);
    d.b.resize(m);
    Vector yStar(m);
    for (int i = 0; i < m; ++i) {
      Matrix a(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c <= r; ++c) {
          a(r, c) = u(rng);
          a(c, r) = a(r, c);
        }
      d.A[i] = {a};
      d.b(i) = a.cwiseProduct(xStar).sum();
      yStar(i) = u(rng);
    }
    Matrix cMat = sStar;
    for (int i = 0; i < m; ++i) cMat += yStar(i) * d.A[i][0];
    d.C = {cMat};

    SDPSolution sol = solveSDP(d);
    REQUIRE(sol.status == SDPStatus::Optimal);
    double optimum = cMat.cwiseProduct(xStar).sum();
    CHECK(sol.primalObjective == doctest::Approx(optimum).epsilon(1e-6));
    CHECK(sol.dualObjective == doctest::Approx(optimum).epsilon(1e-6));
  }
}

TEST_CASE("interchange format round-trip") {
  SDPData d = correlationProblem(0.1);
  d.blockSizes.push_back(1);
  for (auto& blk : d.A) blk.push_back(Matrix::Zero(1, 1));
  d.A[0][1](0, 0) = 0.1;  // exercise shortest-representation printing
  d.C.push_back(Matrix::Constant(1, 1, -2.5));

  std::stringstream ss;
  writeSDPA(d, ss);
  SDPData back = readSDPA(ss);

  REQUIRE(back.blockSizes == d.blockSizes);
  REQUIRE(back.b.size() == d.b.size());
  CHECK((back.b - d.b).cwiseAbs().maxCoeff() == 0.0);
  for (size_t k = 0; k < d.C.size(); ++k)
    CHECK((back.C[k] - d.C[k]).cwiseAbs().maxCoeff() == 0.0);
  for (size_t i = 0; i < d.A.size(); ++i)
    for (size_t k = 0; k < d.A[i].size(); ++k)
      CHECK((back.A[i][k] - d.A[i][k]).cwiseAbs().maxCoeff() == 0.0);

  // solving the round-tripped problem matches bit for bit
  SDPSolution s1 = solveSDP(d);
  SDPSolution s2 = solveSDP(back);
  REQUIRE(s1.status == s2.status);
  CHECK((s1.X[0] - s2.X[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate shapes: empty cone and empty constraint set") {
  SDPData d;
  d.b.resize(0);
  SDPSolution sol = solveSDP(d);
  CHECK(sol.status == SDPStatus::Optimal);

  SDPData feas;
  feas.blockSizes = {2};
  feas.C = {Matrix::Identity(2, 2)};
  feas.b.resize(0);
  CHECK(solveSDP(feas).status == SDPStatus::Optimal);
}
