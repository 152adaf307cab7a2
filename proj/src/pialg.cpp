#include "pie/pialg.hpp"

#include <cmath>
#include <stdexcept>

namespace pie {

namespace {

void checkSameSpace(const PIOperator& p, const PIOperator& q, const char* what) {
  if (p.a() != q.a() || p.b() != q.b())
    throw std::invalid_argument(std::string(what) + ": interval mismatch");
}

}  // namespace

PIOperator::PIOperator(MatPoly1 r0, MatPoly2 r1, MatPoly2 r2, double a, double b)
    : r0_(std::move(r0)), r1_(std::move(r1)), r2_(std::move(r2)), a_(a), b_(b) {
  if (r0_.rows() != r1_.rows() || r0_.cols() != r1_.cols() ||
      r0_.rows() != r2_.rows() || r0_.cols() != r2_.cols())
    throw std::invalid_argument("PIOperator: kernel dims disagree");
  if (!(a < b)) throw std::invalid_argument("PIOperator: need a < b");
}

PIOperator PIOperator::zero(int rows, int cols, double a, double b) {
  return PIOperator(MatPoly1::zero(rows, cols), MatPoly2::zero(rows, cols),
                    MatPoly2::zero(rows, cols), a, b);
}

PIOperator PIOperator::identity(int n, double a, double b) {
  return multiplier(Matrix::Identity(n, n), a, b);
}

PIOperator PIOperator::multiplier(const MatPoly1& r0, double a, double b) {
  return PIOperator(r0, MatPoly2::zero(r0.rows(), r0.cols()),
                    MatPoly2::zero(r0.rows(), r0.cols()), a, b);
}

PIOperator PIOperator::multiplier(const Matrix& m, double a, double b) {
  return multiplier(MatPoly1::constant(m), a, b);
}

MatPoly1 PIOperator::apply(const MatPoly1& v) const {
  if (v.rows() != cols() || v.cols() != 1)
    throw std::invalid_argument("PIOperator::apply: dimension mismatch");
  MatPoly1 out = r0_ * v;
  MatPoly2 vt = MatPoly2::fromTheta(v);
  out = out + integrateTheta(r1_ * vt, Limit::A, Limit::S, a_, b_);
  out = out + integrateTheta(r2_ * vt, Limit::S, Limit::B, a_, b_);
  return out;
}

PIOperator PIOperator::operator+(const PIOperator& q) const {
  checkSameSpace(*this, q, "PIOperator::add");
  return PIOperator(r0_ + q.r0_, r1_ + q.r1_, r2_ + q.r2_, a_, b_);
}

PIOperator PIOperator::operator-(const PIOperator& q) const {
  return *this + q.scaled(-1.0);
}

PIOperator PIOperator::scaled(double c) const {
  return PIOperator(r0_.scaled(c), r1_.scaled(c), r2_.scaled(c), a_, b_);
}

PIOperator PIOperator::compose(const PIOperator& q) const {
  checkSameSpace(*this, q, "PIOperator::compose");
  if (cols() != q.rows())
    throw std::invalid_argument("PIOperator::compose: inner dims");
  const MatPoly2 b0 = MatPoly2::fromS(r0_);
  const MatPoly2 c0 = MatPoly2::fromTheta(q.r0_);
  const MatPoly2& b1 = r1_;
  const MatPoly2& b2 = r2_;
  const MatPoly2& c1 = q.r1_;
  const MatPoly2& c2 = q.r2_;

  MatPoly1 s0 = r0_ * q.r0_;
  // Lower kernel: multiplier cross terms plus the three beta integrals with
  // limits (theta,s), (a,theta), (s,b).
  MatPoly2 s1 = b0 * c1 + b1 * c0 +
                integrateProduct(b1, c1, Limit::Theta, Limit::S, a_, b_) +
                integrateProduct(b1, c2, Limit::A, Limit::Theta, a_, b_) +
                integrateProduct(b2, c1, Limit::S, Limit::B, a_, b_);
  // Upper kernel: limits (a,s), (theta,b), (s,theta).
  MatPoly2 s2 = b0 * c2 + b2 * c0 +
                integrateProduct(b1, c2, Limit::A, Limit::S, a_, b_) +
                integrateProduct(b2, c1, Limit::Theta, Limit::B, a_, b_) +
                integrateProduct(b2, c2, Limit::S, Limit::Theta, a_, b_);
  return PIOperator(std::move(s0), std::move(s1), std::move(s2), a_, b_);
}

PIOperator PIOperator::adjoint() const {
  return PIOperator(r0_.transpose(), r2_.adjointKernel(), r1_.adjointKernel(),
                    a_, b_);
}

PIOperator PIOperator::rowBlock(int r0, int nrows) const {
  if (r0 < 0 || nrows < 0 || r0 + nrows > rows())
    throw std::invalid_argument("PIOperator::rowBlock: range out of bounds");
  MatPoly1 m0(nrows, cols());
  MatPoly2 m1(nrows, cols()), m2(nrows, cols());
  for (const auto& [ij, c] : r0_.entries())
    if (ij.first >= r0 && ij.first < r0 + nrows)
      m0.accumulate(ij.first - r0, ij.second, c);
  for (const auto& [ij, g] : r1_.entries())
    if (ij.first >= r0 && ij.first < r0 + nrows)
      for (size_t p = 0; p < g.size(); ++p)
        for (size_t q = 0; q < g[p].size(); ++q)
          m1.accumulate(ij.first - r0, ij.second, static_cast<int>(p),
                        static_cast<int>(q), g[p][q]);
  for (const auto& [ij, g] : r2_.entries())
    if (ij.first >= r0 && ij.first < r0 + nrows)
      for (size_t p = 0; p < g.size(); ++p)
        for (size_t q = 0; q < g[p].size(); ++q)
          m2.accumulate(ij.first - r0, ij.second, static_cast<int>(p),
                        static_cast<int>(q), g[p][q]);
  m0.canonicalize();
  m1.canonicalize();
  m2.canonicalize();
  return PIOperator(std::move(m0), std::move(m1), std::move(m2), a_, b_);
}

int PIOperator::maxTotalDegree() const {
  int d = r0_.degree();
  d = std::max(d, r1_.totalDegree());
  d = std::max(d, r2_.totalDegree());
  return d;
}

double PIOperator::maxAbsCoeff() const {
  return std::max({r0_.maxAbsCoeff(), r1_.maxAbsCoeff(), r2_.maxAbsCoeff()});
}

namespace {

double maxEntryDiff1(const MatPoly1& p, const MatPoly1& q) {
  double m = 0.0;
  MatPoly1 d = p - q;
  m = d.maxAbsCoeff();
  return m;
}

double maxEntryDiff2(const MatPoly2& p, const MatPoly2& q) {
  MatPoly2 d = p - q;
  return d.maxAbsCoeff();
}

}  // namespace

KernelComparison kernelEqual(const PIOperator& p, const PIOperator& q, double tol) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw std::invalid_argument("kernelEqual: dimension mismatch");
  checkSameSpace(p, q, "kernelEqual");
  double disc = std::max({maxEntryDiff1(p.R0(), q.R0()),
                          maxEntryDiff2(p.R1(), q.R1()),
                          maxEntryDiff2(p.R2(), q.R2())});
  double scale = std::max({p.maxAbsCoeff(), q.maxAbsCoeff(), 1.0});
  return {disc <= tol * scale, disc};
}

// ---------------------------------------------------------------------------
// GramBasis

GramBasis::GramBasis(int n, int d1, int d2, double a, double b, int nMult)
    : n_(n), d1_(d1), d2_(d2), nMult_(nMult < 0 ? n : nMult), a_(a), b_(b), op_() {
  if (n < 0 || d1 < 0 || d2 < 0) throw std::invalid_argument("GramBasis: bad degrees");
  if (nMult_ > n) throw std::invalid_argument("GramBasis: nMult > n");
  const int m1 = d1 + 1;
  const int m2 = (d2 + 1) * (d2 + 2) / 2;
  const int m = m1 * nMult_ + 2 * m2 * n;
  MatPoly1 r0(m, n);
  MatPoly2 r1(m, n), r2(m, n);
  int row = 0;
  for (int k = 0; k <= d1; ++k)
    for (int i = 0; i < nMult_; ++i, ++row) {
      Coeffs1 c(k + 1, 0.0);
      c[k] = 1.0;
      r0.accumulate(row, i, c);
    }
  for (int blk = 0; blk < 2; ++blk) {
    MatPoly2& r = (blk == 0) ? r1 : r2;
    for (int p = 0; p <= d2; ++p)
      for (int q = 0; q + p <= d2; ++q)
        for (int i = 0; i < n; ++i, ++row) r.accumulate(row, i, p, q, 1.0);
  }
  r0.canonicalize();
  r1.canonicalize();
  r2.canonicalize();
  op_ = PIOperator(std::move(r0), std::move(r1), std::move(r2), a, b);
}

int GramBasis::imageDim() const { return op_.rows(); }

PIOperator gramOperator(const GramBasis& z, const Matrix& q) {
  const int m = z.imageDim();
  if (q.rows() != m || q.cols() != m)
    throw std::invalid_argument("gramOperator: Q dimension mismatch");
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + q.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("gramOperator: Q must be symmetric");
  const PIOperator& zop = z.toOperator();
  PIOperator qz = PIOperator::multiplier(q, zop.a(), zop.b()).compose(zop);
  return zop.adjoint().compose(qz);
}

}  // namespace pie
