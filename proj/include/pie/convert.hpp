#ifndef PIE_CONVERT_HPP
#define PIE_CONVERT_HPP

#include <stdexcept>
#include <string>

#include "pie/model.hpp"
#include "pie/pialg.hpp"

namespace pie {

class ConversionError : public std::runtime_error {
 public:
  explicit ConversionError(const std::string& what) : std::runtime_error(what) {}
};

/// The PIE T xf' = A xf equivalent to a PDE spec.
struct PIESystem {
  PIOperator T;  // nx x nx
  PIOperator A;  // nx x nx
  StateLayout layout;
  /// Max kernel-coefficient discrepancy between the composition-built A and
  /// the closed-form A, recorded by convert() as an internal cross-check.
  double pathDiscrepancy = 0.0;
};

/// xD = (DMap) xf: multiplier U1 plus kernels R_D1, R_D2.
struct DMap {
  PIOperator op;  // nD x nx
};

enum class APath { Composition, ClosedForm };

/// B_Q encodes xc(a) = int_a^b B_Q(t) xf(t) dt; requires invertible B_T.
MatPoly1 computeBQ(const PDESpec& spec, const StateLayout& layout,
                   const Matrix& BT);

PIOperator buildT(const PDESpec& spec);
DMap buildDmap(const PDESpec& spec);
PIOperator buildA(const PDESpec& spec, APath path);

/// Full conversion with the closed-form cross-check executed; throws
/// ConversionError on validation/admissibility failure or path disagreement.
PIESystem convert(const PDESpec& spec);

/// Blockwise differentiation D = diag(d^0, d^1, d^2) applied to a polynomial
/// state column x (nx rows): returns xf = [x0; dx1; ddx2].
MatPoly1 applyD(const StateLayout& layout, const MatPoly1& x);

/// Residual of the boundary conditions int BI xD - B xb for a polynomial
/// state column; zero (to rounding) for states in the PDE domain X.
Vector boundaryResidual(const PDESpec& spec, const MatPoly1& x);

}  // namespace pie

#endif  // PIE_CONVERT_HPP
