#include "pie/model.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace pie {

namespace {

// Admissibility threshold on sigma_min, scale-invariant.
constexpr double kAdmissibilityTol = 1e-9;

void checkDims(std::vector<std::string>& errors, const char* name, int rows,
               int cols, int wantRows, int wantCols) {
  if (rows != wantRows || cols != wantCols) {
    std::ostringstream os;
    os << name << ": expected " << wantRows << "x" << wantCols << ", got "
       << rows << "x" << cols;
    errors.push_back(os.str());
  }
}

}  // namespace

ValidationResult validate(const PDESpec& spec) {
  ValidationResult res;
  res.layout = StateLayout{spec.n0, spec.n1, spec.n2};
  const StateLayout& L = res.layout;
  auto& errors = res.errors;

  if (spec.n0 < 0 || spec.n1 < 0 || spec.n2 < 0)
    errors.push_back("state counts: n0, n1, n2 must be nonnegative");
  if (!(spec.a < spec.b)) errors.push_back("domain: need a < b");

  const int nx = L.nx(), nS = L.nS(), nD = L.nD();
  checkDims(errors, "dynamics A0", spec.A0.rows(), spec.A0.cols(), nx, nD);
  checkDims(errors, "dynamics A1", spec.A1.rows(), spec.A1.cols(), nx, nD);
  checkDims(errors, "dynamics A2", spec.A2.rows(), spec.A2.cols(), nx, nD);
  if (static_cast<int>(spec.B.rows()) != nS)
    errors.push_back("boundary condition count: nBC must equal nS = n1 + 2*n2");
  checkDims(errors, "boundary B", static_cast<int>(spec.B.rows()),
            static_cast<int>(spec.B.cols()), nS, 2 * nS);
  checkDims(errors, "boundary BI", spec.BI.rows(), spec.BI.cols(), nS, nD);

  res.valid = errors.empty();
  return res;
}

StructuralMatrices structuralMatrices(const StateLayout& L) {
  const int nx = L.nx(), nS = L.nS(), nD = L.nD();
  const int n0 = L.n0, n1 = L.n1, n2 = L.n2;
  StructuralMatrices sm;

  // xf = [x0; dx1; ddx2] into xD slots
  sm.U1 = Matrix::Zero(nD, nx);
  sm.U1.block(L.offX0(), 0, n0, n0) = Matrix::Identity(n0, n0);
  sm.U1.block(L.offDx1(), n0, n1, n1) = Matrix::Identity(n1, n1);
  sm.U1.block(L.offDdx2(), n0 + n1, n2, n2) = Matrix::Identity(n2, n2);

  // xc = [x1; x2; dx2] into xD slots
  sm.U2 = Matrix::Zero(nD, nS);
  sm.U2.block(L.offX1(), 0, n1, n1) = Matrix::Identity(n1, n1);
  sm.U2.block(L.offX2(), n1, n2, n2) = Matrix::Identity(n2, n2);
  sm.U2.block(L.offDx2(), n1 + n2, n2, n2) = Matrix::Identity(n2, n2);

  // T(eta): xc(s) propagated from xc(a); the only polynomial entry is the
  // x2 <- dx2 coupling with coefficient eta.
  sm.T = MatPoly1::identity(nS);
  for (int i = 0; i < n2; ++i) sm.T.set(n1 + i, n1 + n2 + i, {0.0, 1.0});

  // Q(eta): remainder kernel mapping xf into xc increments.
  sm.Q = MatPoly1::zero(nS, nx);
  for (int i = 0; i < n1; ++i) sm.Q.set(i, n0 + i, {1.0});
  for (int i = 0; i < n2; ++i) {
    sm.Q.set(n1 + i, n0 + n1 + i, {0.0, 1.0});
    sm.Q.set(n1 + n2 + i, n0 + n1 + i, {1.0});
  }
  return sm;
}

Matrix computeBT(const PDESpec& spec, const StateLayout& L) {
  const StructuralMatrices sm = structuralMatrices(L);
  const int nS = L.nS();
  Matrix T0 = sm.T.eval(0.0);
  Matrix Tba = sm.T.eval(spec.b - spec.a);
  Matrix stack(2 * nS, nS);
  stack.topRows(nS) = T0;
  stack.bottomRows(nS) = Tba;
  Matrix bt = spec.B * stack;
  if (nS > 0) {
    // int_a^b BI(s) U2 T(s-a) ds via exact polynomial integration
    MatPoly1 integrand =
        spec.BI * MatPoly1::constant(sm.U2) * sm.T.shiftAffine(-spec.a, +1);
    bt -= integrateFull(integrand, spec.a, spec.b);
  }
  return bt;
}

AdmissibilityReport checkAdmissibility(const PDESpec& spec) {
  AdmissibilityReport rep;
  ValidationResult v = validate(spec);
  if (!v.valid) return rep;  // not admissible; BT left empty
  rep.BT = computeBT(spec, v.layout);
  if (rep.BT.rows() == 0) {
    // no differentiable states: vacuously admissible
    rep.sigmaMin = 1.0;
    rep.conditionNumber = 1.0;
    rep.admissible = true;
    return rep;
  }
  Eigen::JacobiSVD<Matrix> svd(rep.BT);
  const auto& sv = svd.singularValues();
  rep.sigmaMin = sv(sv.size() - 1);
  double sigmaMax = sv(0);
  rep.conditionNumber =
      rep.sigmaMin > 0.0 ? sigmaMax / rep.sigmaMin
                         : std::numeric_limits<double>::infinity();
  rep.admissible = rep.sigmaMin > kAdmissibilityTol * std::max(1.0, sigmaMax);
  return rep;
}

}  // namespace pie
