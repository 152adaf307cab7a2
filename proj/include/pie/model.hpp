#ifndef PIE_MODEL_HPP
#define PIE_MODEL_HPP

#include <string>
#include <vector>

#include "pie/polyalg.hpp"

namespace pie {

/// Parametric PDE on [a,b]:
///   xdot(t,s) = A0(s) xD(t,s) + int_a^s A1(s,t) xD(t,t) dt
///                              + int_s^b A2(s,t) xD(t,t) dt
///   0 = int_a^b BI(s) xD(t,s) ds - B xb(t)
/// with states ordered by differentiability, n = (n0, n1, n2).
struct PDESpec {
  double a = 0.0, b = 1.0;
  int n0 = 0, n1 = 0, n2 = 0;
  MatPoly1 A0;  // nx x (nx+nS)
  MatPoly2 A1;  // nx x (nx+nS)
  MatPoly2 A2;  // nx x (nx+nS)
  Matrix B;     // nBC x 2nS
  MatPoly1 BI;  // nBC x (nx+nS)
};

/// Block offsets of the derivative stack
///   xD = [x0; x1; x2; dx1; dx2; ddx2]   (length nx + nS)
/// and the derived vectors
///   xc = [x1; x2; dx2]                  (length nS)
///   xb = [xc(a); xc(b)]                 (length 2 nS)
///   xf = [x0; dx1; ddx2]                (length nx).
struct StateLayout {
  int n0 = 0, n1 = 0, n2 = 0;
  int nx() const { return n0 + n1 + n2; }
  int nS() const { return n1 + 2 * n2; }
  int nD() const { return nx() + nS(); }
  int nBC() const { return nS(); }
  // offsets of the xD blocks, in order [x0, x1, x2, dx1, dx2, ddx2]
  int offX0() const { return 0; }
  int offX1() const { return n0; }
  int offX2() const { return n0 + n1; }
  int offDx1() const { return n0 + n1 + n2; }
  int offDx2() const { return n0 + 2 * n1 + n2; }
  int offDdx2() const { return n0 + 2 * n1 + 2 * n2; }
};

struct ValidationResult {
  bool valid = false;
  StateLayout layout;
  std::vector<std::string> errors;
};

/// Embeddings of xf and xc into xD slots and the Taylor-with-remainder
/// matrices realizing xc(s) = T(s-a) xc(a) + int_a^s Q(s-t) xf(t) dt.
struct StructuralMatrices {
  Matrix U1;    // nD x nx
  Matrix U2;    // nD x nS
  MatPoly1 T;   // nS x nS, function of the offset eta
  MatPoly1 Q;   // nS x nx, function of the offset eta
};

struct AdmissibilityReport {
  Matrix BT;
  double sigmaMin = 0.0;
  double conditionNumber = 0.0;
  bool admissible = false;
};

/// Check every dimension invariant of a PDESpec; on failure the error list
/// names each offending block.
ValidationResult validate(const PDESpec& spec);

StructuralMatrices structuralMatrices(const StateLayout& layout);

/// B_T = B [T(0); T(b-a)] - int_a^b BI(s) U2 T(s-a) ds, evaluated exactly.
Matrix computeBT(const PDESpec& spec, const StateLayout& layout);

/// SVD-based invertibility verdict; singular B_T yields a false verdict,
/// never an exception.
AdmissibilityReport checkAdmissibility(const PDESpec& spec);

}  // namespace pie

#endif  // PIE_MODEL_HPP
