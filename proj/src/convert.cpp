#include "pie/convert.hpp"

#include <Eigen/LU>

#include <sstream>

namespace pie {

namespace {

constexpr double kPathTol = 1e-10;

// Row range [r0, r0+k) of a one-variable matrix polynomial.
MatPoly1 rowRange(const MatPoly1& p, int r0, int k) {
  MatPoly1 r(k, p.cols());
  for (const auto& [ij, c] : p.entries())
    if (ij.first >= r0 && ij.first < r0 + k) r.accumulate(ij.first - r0, ij.second, c);
  r.canonicalize();
  return r;
}

// Stack k zero rows on top of a two-variable matrix polynomial.
MatPoly2 padTop(const MatPoly2& p, int k) {
  MatPoly2 r(p.rows() + k, p.cols());
  for (const auto& [ij, g] : p.entries())
    for (size_t a = 0; a < g.size(); ++a)
      for (size_t b = 0; b < g[a].size(); ++b)
        r.accumulate(ij.first + k, ij.second, static_cast<int>(a),
                     static_cast<int>(b), g[a][b]);
  r.canonicalize();
  return r;
}

StateLayout requireAdmissible(const PDESpec& spec, Matrix* btOut = nullptr) {
  ValidationResult v = validate(spec);
  if (!v.valid) {
    std::ostringstream os;
    os << "invalid PDE spec:";
    for (const auto& e : v.errors) os << "\n  " << e;
    throw ConversionError(os.str());
  }
  AdmissibilityReport rep = checkAdmissibility(spec);
  if (!rep.admissible) {
    std::ostringstream os;
    os << "boundary conditions not admissible: sigma_min(B_T) = " << rep.sigmaMin;
    throw ConversionError(os.str());
  }
  if (btOut) *btOut = rep.BT;
  return v.layout;
}

}  // namespace

MatPoly1 computeBQ(const PDESpec& spec, const StateLayout& L, const Matrix& BT) {
  const StructuralMatrices sm = structuralMatrices(L);
  const int nS = L.nS(), nx = L.nx();
  if (nS == 0) return MatPoly1::zero(0, nx);

  // BI(s) U1
  MatPoly1 term = spec.BI * MatPoly1::constant(sm.U1);

  // -B [0; Q(b-s)]
  MatPoly1 qShift = sm.Q.shiftAffine(spec.b, -1);  // Q(b - s)
  MatPoly1 stacked(2 * nS, nx);
  for (const auto& [ij, c] : qShift.entries())
    stacked.accumulate(ij.first + nS, ij.second, c);
  stacked.canonicalize();
  term = term - MatPoly1::constant(spec.B) * stacked;

  // + int_s^b BI(t) U2 Q(t - s) dt
  MatPoly2 biU2 = MatPoly2::fromTheta(spec.BI * MatPoly1::constant(sm.U2));
  MatPoly2 qTs = MatPoly2::substitute(sm.Q, -1.0, +1.0, 0.0);  // Q(theta - s)
  term = term + integrateTheta(biU2 * qTs, Limit::S, Limit::B, spec.a, spec.b);

  Matrix btInv = BT.inverse();
  return MatPoly1::constant(btInv) * term;
}

PIOperator buildT(const PDESpec& spec) {
  Matrix bt;
  const StateLayout L = requireAdmissible(spec, &bt);
  const StructuralMatrices sm = structuralMatrices(L);
  const int nx = L.nx(), n0 = L.n0, n12 = L.n1 + L.n2;

  Matrix g0 = Matrix::Zero(nx, nx);
  g0.topLeftCorner(n0, n0) = Matrix::Identity(n0, n0);
  if (L.nS() == 0) return PIOperator::multiplier(g0, spec.a, spec.b);

  const MatPoly1 bq = computeBQ(spec, L, bt);
  // T1, Q1: the rows reconstructing [x1; x2] (not dx2)
  const MatPoly1 t1 = rowRange(sm.T, 0, n12);
  const MatPoly1 q1 = rowRange(sm.Q, 0, n12);

  MatPoly2 g2 = MatPoly2::fromS(t1.shiftAffine(-spec.a, +1)) * MatPoly2::fromTheta(bq);
  g2 = padTop(g2, n0);
  MatPoly2 g1 = padTop(MatPoly2::substitute(q1, +1.0, -1.0, 0.0), n0) + g2;
  return PIOperator(MatPoly1::constant(g0), std::move(g1), std::move(g2),
                    spec.a, spec.b);
}

DMap buildDmap(const PDESpec& spec) {
  Matrix bt;
  const StateLayout L = requireAdmissible(spec, &bt);
  const StructuralMatrices sm = structuralMatrices(L);

  if (L.nS() == 0)
    return {PIOperator::multiplier(sm.U1, spec.a, spec.b)};

  const MatPoly1 bq = computeBQ(spec, L, bt);
  MatPoly1 u2T = MatPoly1::constant(sm.U2) * sm.T.shiftAffine(-spec.a, +1);
  MatPoly2 rd2 = MatPoly2::fromS(u2T) * MatPoly2::fromTheta(bq);
  MatPoly2 rd1 =
      rd2 + MatPoly2::substitute(MatPoly1::constant(sm.U2) * sm.Q, +1.0, -1.0, 0.0);
  return {PIOperator(MatPoly1::constant(sm.U1), std::move(rd1), std::move(rd2),
                     spec.a, spec.b)};
}

PIOperator buildA(const PDESpec& spec, APath path) {
  const StateLayout L = requireAdmissible(spec);
  const DMap dmap = buildDmap(spec);

  if (path == APath::Composition) {
    PIOperator pa(spec.A0, spec.A1, spec.A2, spec.a, spec.b);
    return pa.compose(dmap.op);
  }

  // Closed forms from the conversion formulas.
  const StructuralMatrices sm = structuralMatrices(L);
  const double a = spec.a, b = spec.b;
  const MatPoly2& rd1 = dmap.op.R1();
  const MatPoly2& rd2 = dmap.op.R2();
  const MatPoly2 a0s = MatPoly2::fromS(spec.A0);
  const MatPoly2 u1 = MatPoly2::fromS(MatPoly1::constant(sm.U1));

  MatPoly1 hatA0 = spec.A0 * MatPoly1::constant(sm.U1);
  MatPoly2 hatA1 = a0s * rd1 + spec.A1 * u1 +
                   integrateProduct(spec.A1, rd2, Limit::A, Limit::Theta, a, b) +
                   integrateProduct(spec.A1, rd1, Limit::Theta, Limit::S, a, b) +
                   integrateProduct(spec.A2, rd1, Limit::S, Limit::B, a, b);
  MatPoly2 hatA2 = a0s * rd2 + spec.A2 * u1 +
                   integrateProduct(spec.A1, rd2, Limit::A, Limit::S, a, b) +
                   integrateProduct(spec.A2, rd2, Limit::S, Limit::Theta, a, b) +
                   integrateProduct(spec.A2, rd1, Limit::Theta, Limit::B, a, b);
  return PIOperator(std::move(hatA0), std::move(hatA1), std::move(hatA2), a, b);
}

PIESystem convert(const PDESpec& spec) {
  PIESystem sys;
  sys.layout = requireAdmissible(spec);
  sys.T = buildT(spec);
  sys.A = buildA(spec, APath::Composition);
  PIOperator closed = buildA(spec, APath::ClosedForm);
  KernelComparison cmp = kernelEqual(sys.A, closed, kPathTol);
  sys.pathDiscrepancy = cmp.maxDiscrepancy;
  if (!cmp.equal) {
    std::ostringstream os;
    os << "internal consistency error: composition-built A differs from the "
          "closed form by "
       << cmp.maxDiscrepancy;
    throw ConversionError(os.str());
  }
  return sys;
}

MatPoly1 applyD(const StateLayout& L, const MatPoly1& x) {
  if (x.rows() != L.nx() || x.cols() != 1)
    throw std::invalid_argument("applyD: expected an nx x 1 column");
  MatPoly1 x0 = rowRange(x, L.offX0(), L.n0);
  MatPoly1 dx1 = rowRange(x, L.n0, L.n1).derivative();
  MatPoly1 ddx2 = rowRange(x, L.n0 + L.n1, L.n2).derivative().derivative();
  MatPoly1 out(L.nx(), 1);
  for (const auto& [ij, c] : x0.entries()) out.accumulate(ij.first, 0, c);
  for (const auto& [ij, c] : dx1.entries()) out.accumulate(L.n0 + ij.first, 0, c);
  for (const auto& [ij, c] : ddx2.entries())
    out.accumulate(L.n0 + L.n1 + ij.first, 0, c);
  out.canonicalize();
  return out;
}

namespace {

// Full derivative stack xD of a polynomial state column.
MatPoly1 buildXD(const StateLayout& L, const MatPoly1& x) {
  MatPoly1 out(L.nD(), 1);
  auto place = [&out](const MatPoly1& block, int off) {
    for (const auto& [ij, c] : block.entries()) out.accumulate(off + ij.first, 0, c);
  };
  MatPoly1 x1 = rowRange(x, L.n0, L.n1);
  MatPoly1 x2 = rowRange(x, L.n0 + L.n1, L.n2);
  place(rowRange(x, 0, L.n0), L.offX0());
  place(x1, L.offX1());
  place(x2, L.offX2());
  place(x1.derivative(), L.offDx1());
  place(x2.derivative(), L.offDx2());
  place(x2.derivative().derivative(), L.offDdx2());
  out.canonicalize();
  return out;
}

}  // namespace

Vector boundaryResidual(const PDESpec& spec, const MatPoly1& x) {
  ValidationResult v = validate(spec);
  if (!v.valid) throw std::invalid_argument("boundaryResidual: invalid spec");
  const StateLayout& L = v.layout;
  MatPoly1 xD = buildXD(L, x);
  // xc rows of xD at the continuous slots
  MatPoly1 xc(L.nS(), 1);
  auto pull = [&](int off, int k, int dst) {
    MatPoly1 blk = rowRange(xD, off, k);
    for (const auto& [ij, c] : blk.entries()) xc.accumulate(dst + ij.first, 0, c);
  };
  pull(L.offX1(), L.n1, 0);
  pull(L.offX2(), L.n2, L.n1);
  pull(L.offDx2(), L.n2, L.n1 + L.n2);
  xc.canonicalize();

  Vector xb(2 * L.nS());
  xb.head(L.nS()) = xc.eval(spec.a).col(0);
  xb.tail(L.nS()) = xc.eval(spec.b).col(0);

  Matrix integral = integrateFull(spec.BI * xD, spec.a, spec.b);
  return integral.col(0) - spec.B * xb;
}

}  // namespace pie
