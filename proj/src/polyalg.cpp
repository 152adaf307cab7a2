#include "pie/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pie {

namespace {

void checkDims(int ar, int ac, int br, int bc, const char* what) {
  if (ar != br || ac != bc)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

Coeffs1 addC(const Coeffs1& p, const Coeffs1& q) {
  Coeffs1 r(std::max(p.size(), q.size()), 0.0);
  for (size_t k = 0; k < p.size(); ++k) r[k] += p[k];
  for (size_t k = 0; k < q.size(); ++k) r[k] += q[k];
  return r;
}

Coeffs1 mulC(const Coeffs1& p, const Coeffs1& q) {
  if (p.empty() || q.empty()) return {};
  Coeffs1 r(p.size() + q.size() - 1, 0.0);
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

void addInto(Grid2& g, int p, int q, double v) {
  if (v == 0.0) return;
  if (static_cast<int>(g.size()) <= p) g.resize(p + 1);
  if (static_cast<int>(g[p].size()) <= q) g[p].resize(q + 1, 0.0);
  g[p][q] += v;
}

Grid2 addG(const Grid2& x, const Grid2& y) {
  Grid2 r = x;
  for (size_t p = 0; p < y.size(); ++p)
    for (size_t q = 0; q < y[p].size(); ++q)
      addInto(r, static_cast<int>(p), static_cast<int>(q), y[p][q]);
  return r;
}

Grid2 mulG(const Grid2& x, const Grid2& y) {
  Grid2 r;
  for (size_t p = 0; p < x.size(); ++p)
    for (size_t q = 0; q < x[p].size(); ++q) {
      if (x[p][q] == 0.0) continue;
      for (size_t m = 0; m < y.size(); ++m)
        for (size_t n = 0; n < y[m].size(); ++n)
          addInto(r, static_cast<int>(p + m), static_cast<int>(q + n),
                  x[p][q] * y[m][n]);
    }
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// MatPoly1

MatPoly1::MatPoly1(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("MatPoly1: negative dims");
}

MatPoly1 MatPoly1::constant(const Matrix& m) {
  MatPoly1 p(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) p.entries_[{i, j}] = {m(i, j)};
  return p;
}

void MatPoly1::set(int i, int j, Coeffs1 coeffs) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw std::invalid_argument("MatPoly1::set: index out of range");
  entries_[{i, j}] = std::move(coeffs);
  canonicalize();
}

void MatPoly1::accumulate(int i, int j, const Coeffs1& coeffs) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw std::invalid_argument("MatPoly1::accumulate: index out of range");
  if (coeffs.empty()) return;
  auto it = entries_.find({i, j});
  if (it == entries_.end())
    entries_[{i, j}] = coeffs;
  else
    it->second = addC(it->second, coeffs);
}

Coeffs1 MatPoly1::entry(int i, int j) const {
  auto it = entries_.find({i, j});
  return it == entries_.end() ? Coeffs1{} : it->second;
}

Matrix MatPoly1::eval(double s) const {
  Matrix m = Matrix::Zero(rows_, cols_);
  for (const auto& [ij, c] : entries_) {
    double v = 0.0;
    for (size_t k = c.size(); k-- > 0;) v = v * s + c[k];  // Horner
    m(ij.first, ij.second) = v;
  }
  return m;
}

MatPoly1 MatPoly1::operator+(const MatPoly1& q) const {
  checkDims(rows_, cols_, q.rows_, q.cols_, "MatPoly1::add");
  MatPoly1 r = *this;
  for (const auto& [ij, c] : q.entries_) {
    auto it = r.entries_.find(ij);
    if (it == r.entries_.end())
      r.entries_[ij] = c;
    else
      it->second = addC(it->second, c);
  }
  r.canonicalize();
  return r;
}

MatPoly1 MatPoly1::operator-(const MatPoly1& q) const { return *this + q.scaled(-1.0); }

MatPoly1 MatPoly1::operator*(const MatPoly1& q) const {
  if (cols_ != q.rows_) throw std::invalid_argument("MatPoly1::mul: inner dims");
  MatPoly1 r(rows_, q.cols_);
  for (const auto& [ij, c] : entries_)
    for (const auto& [kl, d] : q.entries_) {
      if (ij.second != kl.first) continue;
      auto key = std::make_pair(ij.first, kl.second);
      auto prod = mulC(c, d);
      auto it = r.entries_.find(key);
      if (it == r.entries_.end())
        r.entries_[key] = std::move(prod);
      else
        it->second = addC(it->second, prod);
    }
  r.canonicalize();
  return r;
}

MatPoly1 MatPoly1::scaled(double c) const {
  MatPoly1 r = *this;
  for (auto& [ij, coef] : r.entries_)
    for (double& v : coef) v *= c;
  r.canonicalize();
  return r;
}

MatPoly1 MatPoly1::transpose() const {
  MatPoly1 r(cols_, rows_);
  for (const auto& [ij, c] : entries_) r.entries_[{ij.second, ij.first}] = c;
  return r;
}

MatPoly1 MatPoly1::derivative() const {
  MatPoly1 r(rows_, cols_);
  for (const auto& [ij, c] : entries_) {
    if (c.size() <= 1) continue;
    Coeffs1 d(c.size() - 1);
    for (size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    r.entries_[ij] = std::move(d);
  }
  r.canonicalize();
  return r;
}

MatPoly1 MatPoly1::shiftAffine(double offset, int sign) const {
  MatPoly1 r(rows_, cols_);
  for (const auto& [ij, c] : entries_) {
    Coeffs1 d(c.size(), 0.0);
    for (size_t k = 0; k < c.size(); ++k) {
      if (c[k] == 0.0) continue;
      // (sign*s + offset)^k expanded binomially
      double offPow = 1.0;
      for (int m = static_cast<int>(k); m >= 0; --m) {
        double sgn = (m % 2 == 0 || sign > 0) ? 1.0 : -1.0;
        d[m] += c[k] * binom(static_cast<int>(k), m) * sgn * offPow;
        offPow *= offset;
      }
    }
    r.entries_[ij] = std::move(d);
  }
  r.canonicalize();
  return r;
}

int MatPoly1::degree() const {
  int d = -1;
  for (const auto& [ij, c] : entries_)
    d = std::max(d, static_cast<int>(c.size()) - 1);
  return d;
}

double MatPoly1::maxAbsCoeff() const {
  double m = 0.0;
  for (const auto& [ij, c] : entries_)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

void MatPoly1::canonicalize() {
  const double tol = kCoeffDropTol * maxAbsCoeff();
  for (auto it = entries_.begin(); it != entries_.end();) {
    Coeffs1& c = it->second;
    for (double& v : c)
      if (std::abs(v) <= tol) v = 0.0;
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    it = c.empty() ? entries_.erase(it) : std::next(it);
  }
}

// ---------------------------------------------------------------------------
// MatPoly2

MatPoly2::MatPoly2(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("MatPoly2: negative dims");
}

MatPoly2 MatPoly2::fromS(const MatPoly1& p) {
  MatPoly2 r(p.rows(), p.cols());
  for (const auto& [ij, c] : p.entries()) {
    Grid2 g;
    for (size_t k = 0; k < c.size(); ++k) addInto(g, static_cast<int>(k), 0, c[k]);
    if (!g.empty()) r.entries_[ij] = std::move(g);
  }
  return r;
}

MatPoly2 MatPoly2::fromTheta(const MatPoly1& p) {
  MatPoly2 r(p.rows(), p.cols());
  for (const auto& [ij, c] : p.entries()) {
    Grid2 g;
    for (size_t k = 0; k < c.size(); ++k) addInto(g, 0, static_cast<int>(k), c[k]);
    if (!g.empty()) r.entries_[ij] = std::move(g);
  }
  return r;
}

MatPoly2 MatPoly2::substitute(const MatPoly1& p, double cs, double ct, double c0) {
  // eta^k built by repeated multiplication with (cs*s + ct*theta + c0).
  Grid2 lin;
  addInto(lin, 1, 0, cs);
  addInto(lin, 0, 1, ct);
  addInto(lin, 0, 0, c0);
  MatPoly2 r(p.rows(), p.cols());
  int maxDeg = p.degree();
  std::vector<Grid2> pows(std::max(maxDeg + 1, 1));
  pows[0] = Grid2{{1.0}};
  for (int k = 1; k <= maxDeg; ++k) pows[k] = mulG(pows[k - 1], lin);
  for (const auto& [ij, c] : p.entries()) {
    Grid2 g;
    for (size_t k = 0; k < c.size(); ++k)
      if (c[k] != 0.0) {
        Grid2 term = pows[k];
        for (auto& row : term)
          for (double& v : row) v *= c[k];
        g = addG(g, term);
      }
    if (!g.empty()) r.entries_[ij] = std::move(g);
  }
  r.canonicalize();
  return r;
}

void MatPoly2::set(int i, int j, Grid2 grid) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw std::invalid_argument("MatPoly2::set: index out of range");
  entries_[{i, j}] = std::move(grid);
  canonicalize();
}

void MatPoly2::accumulate(int i, int j, int p, int q, double v) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw std::invalid_argument("MatPoly2::accumulate: index out of range");
  addInto(entries_[{i, j}], p, q, v);
}

Grid2 MatPoly2::entry(int i, int j) const {
  auto it = entries_.find({i, j});
  return it == entries_.end() ? Grid2{} : it->second;
}

Matrix MatPoly2::eval(double s, double theta) const {
  Matrix m = Matrix::Zero(rows_, cols_);
  for (const auto& [ij, g] : entries_) {
    double v = 0.0;
    for (size_t p = g.size(); p-- > 0;) {
      double w = 0.0;
      for (size_t q = g[p].size(); q-- > 0;) w = w * theta + g[p][q];
      v = v * s + w;
    }
    m(ij.first, ij.second) = v;
  }
  return m;
}

MatPoly1 MatPoly2::evalTheta(double theta) const {
  MatPoly1 r(rows_, cols_);
  for (const auto& [ij, g] : entries_) {
    Coeffs1 c(g.size(), 0.0);
    for (size_t p = 0; p < g.size(); ++p) {
      double w = 0.0;
      for (size_t q = g[p].size(); q-- > 0;) w = w * theta + g[p][q];
      c[p] = w;
    }
    r.accumulate(ij.first, ij.second, c);
  }
  r.canonicalize();
  return r;
}

MatPoly1 MatPoly2::evalS(double s) const {
  MatPoly1 r(rows_, cols_);
  for (const auto& [ij, g] : entries_) {
    Coeffs1 c;
    for (size_t p = 0; p < g.size(); ++p) {
      double sp = std::pow(s, static_cast<double>(p));
      for (size_t q = 0; q < g[p].size(); ++q) {
        if (c.size() <= q) c.resize(q + 1, 0.0);
        c[q] += g[p][q] * sp;
      }
    }
    r.accumulate(ij.first, ij.second, c);
  }
  r.canonicalize();
  return r;
}

MatPoly2 MatPoly2::operator+(const MatPoly2& q) const {
  checkDims(rows_, cols_, q.rows_, q.cols_, "MatPoly2::add");
  MatPoly2 r = *this;
  for (const auto& [ij, g] : q.entries_) {
    auto it = r.entries_.find(ij);
    if (it == r.entries_.end())
      r.entries_[ij] = g;
    else
      it->second = addG(it->second, g);
  }
  r.canonicalize();
  return r;
}

MatPoly2 MatPoly2::operator-(const MatPoly2& q) const { return *this + q.scaled(-1.0); }

MatPoly2 MatPoly2::operator*(const MatPoly2& q) const {
  if (cols_ != q.rows_) throw std::invalid_argument("MatPoly2::mul: inner dims");
  MatPoly2 r(rows_, q.cols_);
  for (const auto& [ij, g] : entries_)
    for (const auto& [kl, h] : q.entries_) {
      if (ij.second != kl.first) continue;
      auto key = std::make_pair(ij.first, kl.second);
      Grid2 prod = mulG(g, h);
      auto it = r.entries_.find(key);
      if (it == r.entries_.end())
        r.entries_[key] = std::move(prod);
      else
        it->second = addG(it->second, prod);
    }
  r.canonicalize();
  return r;
}

MatPoly2 MatPoly2::scaled(double c) const {
  MatPoly2 r = *this;
  for (auto& [ij, g] : r.entries_)
    for (auto& row : g)
      for (double& v : row) v *= c;
  r.canonicalize();
  return r;
}

MatPoly2 MatPoly2::transpose() const {
  MatPoly2 r(cols_, rows_);
  for (const auto& [ij, g] : entries_) r.entries_[{ij.second, ij.first}] = g;
  return r;
}

MatPoly2 MatPoly2::swapVars() const {
  MatPoly2 r(rows_, cols_);
  for (const auto& [ij, g] : entries_) {
    Grid2 t;
    for (size_t p = 0; p < g.size(); ++p)
      for (size_t q = 0; q < g[p].size(); ++q)
        addInto(t, static_cast<int>(q), static_cast<int>(p), g[p][q]);
    r.entries_[ij] = std::move(t);
  }
  return r;
}

MatPoly2 MatPoly2::derivativeS() const {
  MatPoly2 r(rows_, cols_);
  for (const auto& [ij, g] : entries_) {
    Grid2 d;
    for (size_t p = 1; p < g.size(); ++p)
      for (size_t q = 0; q < g[p].size(); ++q)
        addInto(d, static_cast<int>(p - 1), static_cast<int>(q),
                g[p][q] * static_cast<double>(p));
    if (!d.empty()) r.entries_[ij] = std::move(d);
  }
  r.canonicalize();
  return r;
}

int MatPoly2::degreeS() const {
  int d = -1;
  for (const auto& [ij, g] : entries_)
    for (size_t p = 0; p < g.size(); ++p)
      for (double v : g[p])
        if (v != 0.0) d = std::max(d, static_cast<int>(p));
  return d;
}

int MatPoly2::degreeTheta() const {
  int d = -1;
  for (const auto& [ij, g] : entries_)
    for (const auto& row : g)
      for (size_t q = 0; q < row.size(); ++q)
        if (row[q] != 0.0) d = std::max(d, static_cast<int>(q));
  return d;
}

int MatPoly2::totalDegree() const {
  int d = -1;
  for (const auto& [ij, g] : entries_)
    for (size_t p = 0; p < g.size(); ++p)
      for (size_t q = 0; q < g[p].size(); ++q)
        if (g[p][q] != 0.0) d = std::max(d, static_cast<int>(p + q));
  return d;
}

double MatPoly2::maxAbsCoeff() const {
  double m = 0.0;
  for (const auto& [ij, g] : entries_)
    for (const auto& row : g)
      for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

void MatPoly2::canonicalize() {
  const double tol = kCoeffDropTol * maxAbsCoeff();
  for (auto it = entries_.begin(); it != entries_.end();) {
    Grid2& g = it->second;
    for (auto& row : g)
      for (double& v : row)
        if (std::abs(v) <= tol) v = 0.0;
    for (auto& row : g)
      while (!row.empty() && row.back() == 0.0) row.pop_back();
    while (!g.empty() && g.back().empty()) g.pop_back();
    bool empty = true;
    for (const auto& row : g)
      if (!row.empty()) empty = false;
    it = empty ? entries_.erase(it) : std::next(it);
  }
}

// ---------------------------------------------------------------------------
// Integration

namespace {

// Powers of an integration limit expressed as a monomial in (s, theta):
// constant limits contribute a scalar, s/theta contribute variable powers.
struct LimitPow {
  double value;  // scalar factor
  int ps, pt;    // extra powers of s and theta
};

LimitPow limitPow(Limit l, int k, double a, double b) {
  switch (l) {
    case Limit::A:
      return {std::pow(a, k), 0, 0};
    case Limit::B:
      return {std::pow(b, k), 0, 0};
    case Limit::S:
      return {1.0, k, 0};
    case Limit::Theta:
      return {1.0, 0, k};
  }
  throw std::invalid_argument("unsupported limit symbol");
}

}  // namespace

MatPoly1 integrateTheta(const MatPoly2& k, Limit lo, Limit hi, double a, double b) {
  if (lo == Limit::Theta || hi == Limit::Theta)
    throw std::invalid_argument("integrateTheta: theta cannot be its own limit");
  MatPoly1 r(k.rows(), k.cols());
  for (const auto& [ij, g] : k.entries()) {
    Coeffs1 c;
    for (size_t p = 0; p < g.size(); ++p)
      for (size_t q = 0; q < g[p].size(); ++q) {
        if (g[p][q] == 0.0) continue;
        // int theta^q = (hi^{q+1} - lo^{q+1})/(q+1)
        for (int sgn : {+1, -1}) {
          LimitPow lp = limitPow(sgn > 0 ? hi : lo, static_cast<int>(q) + 1, a, b);
          int pow_s = static_cast<int>(p) + lp.ps;
          double v = sgn * g[p][q] * lp.value / (static_cast<double>(q) + 1.0);
          if (v == 0.0) continue;
          if (c.size() <= static_cast<size_t>(pow_s)) c.resize(pow_s + 1, 0.0);
          c[pow_s] += v;
        }
      }
    r.accumulate(ij.first, ij.second, c);
  }
  r.canonicalize();
  return r;
}

Matrix integrateFull(const MatPoly1& p, double a, double b) {
  Matrix m = Matrix::Zero(p.rows(), p.cols());
  for (const auto& [ij, c] : p.entries()) {
    double v = 0.0;
    for (size_t k = 0; k < c.size(); ++k)
      v += c[k] * (std::pow(b, k + 1.0) - std::pow(a, k + 1.0)) / (k + 1.0);
    m(ij.first, ij.second) = v;
  }
  return m;
}

MatPoly2 integrateProduct(const MatPoly2& kb, const MatPoly2& kc, Limit lo,
                          Limit hi, double a, double b) {
  if (kb.cols() != kc.rows())
    throw std::invalid_argument("integrateProduct: inner dims");
  MatPoly2 r(kb.rows(), kc.cols());
  for (const auto& [ij, g] : kb.entries())
    for (const auto& [kl, h] : kc.entries()) {
      if (ij.second != kl.first) continue;
      // kb entry: s^p beta^q; kc entry: beta^m theta^n
      for (size_t p = 0; p < g.size(); ++p)
        for (size_t q = 0; q < g[p].size(); ++q) {
          if (g[p][q] == 0.0) continue;
          for (size_t m = 0; m < h.size(); ++m)
            for (size_t n = 0; n < h[m].size(); ++n) {
              if (h[m][n] == 0.0) continue;
              int kpow = static_cast<int>(q + m);
              double coeff = g[p][q] * h[m][n] / (kpow + 1.0);
              for (int sgn : {+1, -1}) {
                LimitPow lp = limitPow(sgn > 0 ? hi : lo, kpow + 1, a, b);
                double v = sgn * coeff * lp.value;
                if (v == 0.0) continue;
                r.accumulate(ij.first, kl.second, static_cast<int>(p) + lp.ps,
                             static_cast<int>(n) + lp.pt, v);
              }
            }
        }
    }
  r.canonicalize();
  return r;
}

}  // namespace pie
