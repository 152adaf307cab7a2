#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pie/fixtures.hpp"
#include "pie/lpi.hpp"

using namespace pie;

namespace {

PIESystem negatedGenerator(const PDESpec& spec) {
  PIESystem sys = convert(spec);
  sys.A = sys.T.scaled(-1.0);
  return sys;
}

StabilityCertificate analyzeSpec(const PDESpec& spec, int dP = 1, int maxDP = 3) {
  LPIOptions opts;
  opts.dP = dP;
  opts.maxDP = maxDP;
  return analyzeStability(convert(spec), opts);
}

}  // namespace

TEST_CASE("sanity fixture A = -T is certifiable") {
  PIESystem sys = negatedGenerator(dirichletDiffusionSpec(1.0));
  LPIProblem prob = assemble(sys, 1, -1, 1e-4, 1e-4);  // delta < 2 alpha
  CHECK(prob.sdp.b.size() > 0);
  StabilityCertificate cert = solve(prob);
  CHECK(cert.verdict == Verdict::CertifiedStable);
  CHECK(verifyCertificate(sys, cert).verified);
}

TEST_CASE("assembly invariants: no all-zero rows, psd-cone blocks") {
  PIESystem sys = convert(dirichletDiffusionSpec(1.0));
  LPIProblem prob = assemble(sys, 1, 3, 1e-4, 1e-4);
  REQUIRE(prob.sdp.blockSizes.size() == 2);
  CHECK(prob.sdp.blockSizes[0] == prob.zP.imageDim());
  CHECK(prob.sdp.blockSizes[1] == prob.zH.imageDim());
  for (int r = 0; r < prob.sdp.b.size(); ++r) {
    double cmax = 0.0;
    for (const Matrix& blk : prob.sdp.A[r])
      if (blk.size() > 0) cmax = std::max(cmax, blk.cwiseAbs().maxCoeff());
    CHECK(cmax > 0.0);
    CHECK(cmax <= 1.0 + 1e-12);  // unit infinity-norm row scaling
    CHECK(std::abs(prob.sdp.b(r)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("Dirichlet lambda = 1 feasible at dP = 1, dH = 3") {
  PIESystem sys = convert(dirichletDiffusionSpec(1.0));
  StabilityCertificate cert = solve(assemble(sys, 1, 3, 1e-4, 1e-4));
  CHECK(cert.verdict == Verdict::CertifiedStable);
}

TEST_CASE("Dirichlet lambda = 9 certified, lambda = 12 has no certificate") {
  StabilityCertificate stable = analyzeSpec(dirichletDiffusionSpec(9.0), 1, 2);
  CHECK(stable.verdict == Verdict::CertifiedStable);

  StabilityCertificate unstable = analyzeSpec(dirichletDiffusionSpec(12.0));
  CHECK(unstable.verdict == Verdict::InfeasibleAtDegree);
  CHECK(unstable.message == "no certificate at this degree");
}

TEST_CASE("McKendrick c = 0 certified stable") {
  StabilityCertificate cert = analyzeSpec(mckendrickSpec(0.0), 1, 2);
  CHECK(cert.verdict == Verdict::CertifiedStable);
}

TEST_CASE("certificate verification catches tampering") {
  PIESystem sys = convert(dirichletDiffusionSpec(9.0));
  LPIOptions opts;
  StabilityCertificate cert = analyzeStability(sys, opts);
  REQUIRE(cert.verdict == Verdict::CertifiedStable);
  CHECK(verifyCertificate(sys, cert).verified);

  // forced negative eigenvalue in Q_H
  StabilityCertificate bad = cert;
  Eigen::SelfAdjointEigenSolver<Matrix> es(bad.QH);
  Vector v0 = es.eigenvectors().col(bad.QH.rows() - 1);
  bad.QH -= 2.0 * es.eigenvalues()(bad.QH.rows() - 1) * v0 * v0.transpose();
  VerificationReport tampered = verifyCertificate(sys, bad);
  CHECK_FALSE(tampered.verified);

  // certificate held against the wrong PIE
  PIESystem other = convert(dirichletDiffusionSpec(2.0));
  VerificationReport mismatch = verifyCertificate(other, cert);
  CHECK_FALSE(mismatch.verified);
  CHECK(mismatch.kernelDiscrepancy > 1e-4);
}

TEST_CASE("feasibility monotonicity in the Gram degrees") {
  PIESystem sys = convert(dirichletDiffusionSpec(5.0));
  StabilityCertificate c1 = solve(assemble(sys, 1, -1, 1e-4, 1e-4));
  REQUIRE(c1.verdict == Verdict::CertifiedStable);
  StabilityCertificate c2 = solve(assemble(sys, 2, c1.dH + 2, 1e-4, 1e-4));
  CHECK(c2.verdict == Verdict::CertifiedStable);
}

TEST_CASE("verdict is invariant under joint kernel scaling") {
  PIESystem sys = convert(mckendrickSpec(0.3));
  PIESystem scaled = sys;
  scaled.T = sys.T.scaled(3.0);
  scaled.A = sys.A.scaled(3.0);
  LPIOptions opts;
  opts.maxDP = 2;
  Verdict v1 = analyzeStability(sys, opts).verdict;
  Verdict v2 = analyzeStability(scaled, opts).verdict;
  CHECK(v1 == v2);
}

TEST_CASE("zero-dimensional PIE is trivially feasible") {
  PIESystem sys;
  sys.T = PIOperator::zero(0, 0, 0.0, 1.0);
  sys.A = PIOperator::zero(0, 0, 0.0, 1.0);
  sys.layout = StateLayout{0, 0, 0};
  StabilityCertificate cert = solve(assemble(sys, 1, -1, 1e-4, 1e-4));
  CHECK(cert.verdict == Verdict::CertifiedStable);
  CHECK(verifyCertificate(sys, cert).verified);
}

TEST_CASE("fixed dH below the covering degree raises DegreeError") {
  PIESystem sys = convert(dirichletDiffusionSpec(1.0));
  try {
    assemble(sys, 1, 0, 1e-4, 1e-4);
    FAIL("expected DegreeError");
  } catch (const DegreeError& e) {
    CHECK_FALSE(e.missingMonomials.empty());
  }
}

TEST_CASE("bisection on the Dirichlet family brackets pi^2") {
  LPIOptions opts;
  opts.maxDP = 2;
  BisectionResult res = bisectParameter(
      [](double lam) { return dirichletDiffusionSpec(lam); }, 5.0, 15.0, 0.25,
      opts);
  REQUIRE(res.monotone);
  CHECK(res.threshold == doctest::Approx(M_PI * M_PI).epsilon(0.05));

  BisectionResult single = bisectParameter(
      [](double lam) { return dirichletDiffusionSpec(lam); }, 5.0, 5.0, 0.25,
      opts);
  CHECK(single.threshold == 5.0);
  CHECK(single.evaluations.size() == 1);
}
