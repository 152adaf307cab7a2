#include "pie/fixtures.hpp"

#include <Eigen/QR>

#include <cmath>
#include <stdexcept>

namespace pie {

PDESpec mckendrickSpec(double c) {
  PDESpec spec;
  spec.a = 0.0;
  spec.b = 1.0;
  spec.n0 = 0;
  spec.n1 = 1;
  spec.n2 = 0;
  // xD = [x; dx]
  spec.A0 = MatPoly1(1, 2);
  spec.A0.set(0, 0, {c});
  spec.A0.set(0, 1, {-1.0});
  spec.A1 = MatPoly2::zero(1, 2);
  spec.A2 = MatPoly2::zero(1, 2);
  // xb = [x(0); x(1)]; birth law x(0) = int h(s) x(s) ds with h = (1-s)s
  spec.B = Matrix::Zero(1, 2);
  spec.B(0, 0) = 1.0;
  spec.BI = MatPoly1(1, 2);
  spec.BI.set(0, 0, {0.0, 1.0, -1.0});
  return spec;
}

PDESpec dirichletDiffusionSpec(double lambda) {
  PDESpec spec;
  spec.a = 0.0;
  spec.b = 1.0;
  spec.n0 = 0;
  spec.n1 = 0;
  spec.n2 = 1;
  // xD = [x; dx; ddx]
  spec.A0 = MatPoly1(1, 3);
  spec.A0.set(0, 0, {lambda});
  spec.A0.set(0, 2, {1.0});
  spec.A1 = MatPoly2::zero(1, 3);
  spec.A2 = MatPoly2::zero(1, 3);
  // xb = [x(0); dx(0); x(1); dx(1)], clamp x(0) and x(1)
  spec.B = Matrix::Zero(2, 4);
  spec.B(0, 0) = 1.0;
  spec.B(1, 2) = 1.0;
  spec.BI = MatPoly1::zero(2, 3);
  return spec;
}

double observerGain(double lambda, double s) {
  // l(s) = -lambda * I1(z)/z with z = sqrt(lambda (1 - s^2));
  // I1(z)/z = (1/2) sum_k (z^2/4)^k / (k! (k+1)!), entire in z^2.
  const double z2 = lambda * (1.0 - s * s);
  double term = 0.5;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= (z2 / 4.0) / (static_cast<double>(k) * (k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-14 * std::abs(sum)) break;
  }
  return -lambda * sum;
}

Coeffs1 observerGainFit(double lambda, int degree) {
  if (degree < 0) throw std::invalid_argument("observerGainFit: negative degree");
  const int m = 200;
  Matrix vand(m, degree + 1);
  Vector rhs(m);
  for (int i = 0; i < m; ++i) {
    double s = static_cast<double>(i) / (m - 1);
    double pw = 1.0;
    for (int j = 0; j <= degree; ++j) {
      vand(i, j) = pw;
      pw *= s;
    }
    rhs(i) = observerGain(lambda, s);
  }
  Vector sol = vand.colPivHouseholderQr().solve(rhs);
  return Coeffs1(sol.data(), sol.data() + sol.size());
}

PDESpec rdObserverSpec(double lambda, int gainDegree) {
  PDESpec spec;
  spec.a = 0.0;
  spec.b = 1.0;
  spec.n0 = 0;
  spec.n1 = 0;
  spec.n2 = 2;
  // states [x; xhat]; xD = [x; xh; dx; dxh; ddx; ddxh]
  spec.A0 = MatPoly1(2, 6);
  spec.A0.set(0, 0, {lambda});
  spec.A0.set(0, 4, {1.0});
  spec.A0.set(1, 1, {lambda});
  spec.A0.set(1, 5, {1.0});
  // observer correction: int_0^1 l(s) (ddx(t) - ddxh(t)) dt, split at s
  Coeffs1 l = observerGainFit(lambda, gainDegree);
  spec.A1 = MatPoly2::zero(2, 6);
  spec.A2 = MatPoly2::zero(2, 6);
  for (size_t k = 0; k < l.size(); ++k) {
    if (l[k] == 0.0) continue;
    spec.A1.accumulate(1, 4, static_cast<int>(k), 0, l[k]);
    spec.A1.accumulate(1, 5, static_cast<int>(k), 0, -l[k]);
    spec.A2.accumulate(1, 4, static_cast<int>(k), 0, l[k]);
    spec.A2.accumulate(1, 5, static_cast<int>(k), 0, -l[k]);
  }
  spec.A1.canonicalize();
  spec.A2.canonicalize();
  // xb = [x(0); xh(0); dx(0); dxh(0); x(1); xh(1); dx(1); dxh(1)]
  spec.B = Matrix::Zero(4, 8);
  spec.B(0, 0) = 1.0;  // x(0) = 0
  spec.B(1, 1) = 1.0;  // xh(0) = 0
  spec.B(2, 4) = 1.0;  // x(1) = 0
  spec.B(3, 5) = 1.0;  // xh(1) = 0
  spec.BI = MatPoly1::zero(4, 6);
  return spec;
}

PDESpec makeFixture(const std::string& name,
                    const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  if (name == "mckendrick") return mckendrickSpec(get("c", 0.0));
  if (name == "dirichlet-diffusion")
    return dirichletDiffusionSpec(get("lambda", 0.0));
  if (name == "rd-observer")
    return rdObserverSpec(get("lambda", 1.0),
                          static_cast<int>(get("degree", 1.0)));
  throw std::invalid_argument("unknown fixture: " + name);
}

}  // namespace pie
