#ifndef PIE_PIALG_HPP
#define PIE_PIALG_HPP

#include <string>
#include <vector>

#include "pie/polyalg.hpp"

namespace pie {

/// 3-PI operator on L2[a,b] with polynomial kernels:
///   (Pv)(s) = R0(s) v(s) + int_a^s R1(s,t) v(t) dt + int_s^b R2(s,t) v(t) dt.
/// Immutable by convention; the algebra operations below are pure.
class PIOperator {
 public:
  PIOperator() : a_(0.0), b_(1.0) {}
  PIOperator(MatPoly1 r0, MatPoly2 r1, MatPoly2 r2, double a, double b);

  static PIOperator zero(int rows, int cols, double a, double b);
  static PIOperator identity(int n, double a, double b);
  /// Pure multiplication operator v |-> R0 v.
  static PIOperator multiplier(const MatPoly1& r0, double a, double b);
  static PIOperator multiplier(const Matrix& m, double a, double b);

  int rows() const { return r0_.rows(); }
  int cols() const { return r0_.cols(); }
  double a() const { return a_; }
  double b() const { return b_; }
  const MatPoly1& R0() const { return r0_; }
  const MatPoly2& R1() const { return r1_; }
  const MatPoly2& R2() const { return r2_; }

  /// Exact symbolic image of a polynomial column v (cols x 1).
  MatPoly1 apply(const MatPoly1& v) const;

  PIOperator operator+(const PIOperator& q) const;
  PIOperator operator-(const PIOperator& q) const;
  PIOperator scaled(double c) const;
  /// Operator composition; the resulting kernels are derived by exchanging
  /// the order of integration and splitting at s and theta.
  PIOperator compose(const PIOperator& q) const;
  /// L2 adjoint: R0(s)^T, R2(t,s)^T, R1(t,s)^T.
  PIOperator adjoint() const;

  /// Row block [r0, r0+nrows) as an (nrows x cols) operator.
  PIOperator rowBlock(int r0, int nrows) const;

  int maxTotalDegree() const;
  double maxAbsCoeff() const;

 private:
  MatPoly1 r0_;
  MatPoly2 r1_, r2_;
  double a_, b_;
};

struct KernelComparison {
  bool equal;
  double maxDiscrepancy;  // absolute, on canonical coefficients
};

/// Coefficient-wise comparison of two operators; tol is absolute on
/// coefficients scaled by the larger max kernel coefficient.
KernelComparison kernelEqual(const PIOperator& p, const PIOperator& q, double tol);

/// Monomial-vector Gram basis: the map
///   Zv = [ Z1(s) (x) I_n v(s);
///          int_a^s (Z2(s,t) (x) I_n) v(t) dt;
///          int_s^b (Z2(s,t) (x) I_n) v(t) dt ]
/// with Z1 the monomials of degree <= d1 and Z2 all monomials s^p t^q with
/// p+q <= d2. Operators Z^* Q Z with Q psd form the certifiable positive cone.
class GramBasis {
 public:
  /// nMult restricts the pointwise block to the first nMult components
  /// (default all n); components whose pointwise kernel is structurally zero
  /// in the target operator must be excluded or the psd constraint pins the
  /// corresponding Gram rows to zero and the problem loses strict feasibility.
  GramBasis(int n, int d1, int d2, double a, double b, int nMult = -1);

  int n() const { return n_; }
  int d1() const { return d1_; }
  int d2() const { return d2_; }
  int nMult() const { return nMult_; }
  /// Image dimension m of the stacked map.
  int imageDim() const;
  /// The stacked map as an (m x n) PI operator.
  const PIOperator& toOperator() const { return op_; }

 private:
  int n_, d1_, d2_, nMult_;
  double a_, b_;
  PIOperator op_;
};

/// Z^* Q Z for symmetric Q of dimension imageDim(); psd Q yields an operator
/// with nonnegative quadratic form.
PIOperator gramOperator(const GramBasis& z, const Matrix& q);

}  // namespace pie

#endif  // PIE_PIALG_HPP
