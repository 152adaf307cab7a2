#ifndef PIE_POLYALG_HPP
#define PIE_POLYALG_HPP

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pie {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Coefficients c[k] of sum_k c[k] s^k.
using Coeffs1 = std::vector<double>;
/// Grid c[p][q] of sum_{p,q} c[p][q] s^p theta^q.
using Grid2 = std::vector<std::vector<double>>;

// Relative threshold below which coefficients are dropped when canonicalizing.
inline constexpr double kCoeffDropTol = 1e-14;

/// Matrix-valued polynomial in one variable, sparse at the entry level,
/// dense coefficient lists per entry. Canonical form: no trailing zero
/// coefficients, no stored all-zero entries.
class MatPoly1 {
 public:
  MatPoly1() : rows_(0), cols_(0) {}
  MatPoly1(int rows, int cols);

  static MatPoly1 zero(int rows, int cols) { return MatPoly1(rows, cols); }
  static MatPoly1 constant(const Matrix& m);
  static MatPoly1 identity(int n) { return constant(Matrix::Identity(n, n)); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::map<std::pair<int, int>, Coeffs1>& entries() const { return entries_; }

  void set(int i, int j, Coeffs1 coeffs);
  /// Accumulate into an entry without re-canonicalizing; callers batching
  /// many writes should call canonicalize() once afterwards.
  void accumulate(int i, int j, const Coeffs1& coeffs);
  /// Entry polynomial, empty list if the entry is structurally zero.
  Coeffs1 entry(int i, int j) const;

  Matrix eval(double s) const;

  MatPoly1 operator+(const MatPoly1& q) const;
  MatPoly1 operator-(const MatPoly1& q) const;
  MatPoly1 operator*(const MatPoly1& q) const;  // matrix product
  MatPoly1 scaled(double c) const;
  MatPoly1 transpose() const;
  MatPoly1 derivative() const;

  /// p(sign*s + offset), expanded exactly via binomials.
  MatPoly1 shiftAffine(double offset, int sign) const;

  int degree() const;  // max entry degree; -1 for the zero polynomial
  double maxAbsCoeff() const;
  bool isZero() const { return entries_.empty(); }

  void canonicalize();

 private:
  int rows_, cols_;
  std::map<std::pair<int, int>, Coeffs1> entries_;
};

/// Matrix-valued polynomial in (s, theta). Any such polynomial is separable
/// through its monomial factorization, so these are valid 3-PI kernels.
class MatPoly2 {
 public:
  MatPoly2() : rows_(0), cols_(0) {}
  MatPoly2(int rows, int cols);

  static MatPoly2 zero(int rows, int cols) { return MatPoly2(rows, cols); }
  /// Lift p(s) to a function of (s, theta) constant in theta.
  static MatPoly2 fromS(const MatPoly1& p);
  /// Lift p(theta) to a function of (s, theta) constant in s.
  static MatPoly2 fromTheta(const MatPoly1& p);
  /// Substitute eta = cs*s + ct*theta + c0 into p(eta).
  static MatPoly2 substitute(const MatPoly1& p, double cs, double ct, double c0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::map<std::pair<int, int>, Grid2>& entries() const { return entries_; }

  void set(int i, int j, Grid2 grid);
  /// Accumulate a single monomial v * s^p theta^q into entry (i, j).
  void accumulate(int i, int j, int p, int q, double v);
  Grid2 entry(int i, int j) const;

  Matrix eval(double s, double theta) const;
  MatPoly1 evalTheta(double theta) const;  // partial evaluation, polynomial in s
  MatPoly1 evalS(double s) const;          // partial evaluation, polynomial in theta

  MatPoly2 operator+(const MatPoly2& q) const;
  MatPoly2 operator-(const MatPoly2& q) const;
  MatPoly2 operator*(const MatPoly2& q) const;  // matrix product
  MatPoly2 scaled(double c) const;
  MatPoly2 transpose() const;
  MatPoly2 swapVars() const;  // exchange s and theta in every entry
  /// K(theta, s)^T, the kernel map used by the 3-PI adjoint.
  MatPoly2 adjointKernel() const { return swapVars().transpose(); }
  /// Partial derivative in s.
  MatPoly2 derivativeS() const;

  int degreeS() const;
  int degreeTheta() const;
  int totalDegree() const;  // max p+q over nonzero monomials; -1 when zero
  double maxAbsCoeff() const;
  bool isZero() const { return entries_.empty(); }

  void canonicalize();

 private:
  int rows_, cols_;
  std::map<std::pair<int, int>, Grid2> entries_;
};

/// Symbols usable as integration limits.
enum class Limit { A, B, S, Theta };

/// Definite integral over theta of K(s, theta) with limits drawn from
/// {a, b, s}; the result is a polynomial in s.
MatPoly1 integrateTheta(const MatPoly2& k, Limit lo, Limit hi, double a, double b);

/// Full-interval integral of a one-variable polynomial.
Matrix integrateFull(const MatPoly1& p, double a, double b);

/// Matrix product with integration over the shared variable beta:
///   int_lo^hi Kb(s, beta) Kc(beta, theta) dbeta
/// where Kb is a polynomial in (s, beta), Kc in (beta, theta) and the limits
/// come from {a, b, s, theta}. This single primitive carries every kernel
/// integral in the 3-PI composition formulas.
MatPoly2 integrateProduct(const MatPoly2& kb, const MatPoly2& kc, Limit lo,
                          Limit hi, double a, double b);

}  // namespace pie

#endif  // PIE_POLYALG_HPP
