#include "pie/numeric.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace pie {

namespace {

// Chebyshev angles for ascending Gauss-Lobatto nodes: node j sits at
// x_j = -cos(j pi / M) = cos(theta_j) with theta_j = (M - j) pi / M.
double nodeAngle(int j, int M) {
  return std::numbers::pi * static_cast<double>(M - j) / M;
}

}  // namespace

CollocationGrid makeGrid(int N, double a, double b) {
  if (N < 4) throw std::invalid_argument("makeGrid: need at least 4 nodes");
  if (!(a < b)) throw std::invalid_argument("makeGrid: need a < b");
  const int M = N - 1;
  CollocationGrid g;
  g.N = N;
  g.a = a;
  g.b = b;
  g.points.resize(N);
  for (int j = 0; j < N; ++j)
    g.points(j) = a + 0.5 * (b - a) * (1.0 + std::cos(nodeAngle(j, M)));

  // values -> Chebyshev coefficients (discrete cosine transform on the
  // Gauss-Lobatto nodes, trapezoidal end-point halving)
  Matrix toCoeff(N, N);
  for (int k = 0; k < N; ++k) {
    const double ck = (k == 0 || k == M) ? 2.0 : 1.0;
    for (int j = 0; j < N; ++j) {
      const double cj = (j == 0 || j == N - 1) ? 2.0 : 1.0;
      toCoeff(k, j) = 2.0 / (M * ck * cj) * std::cos(k * nodeAngle(j, M));
    }
  }

  // coefficient-domain antiderivative: degree M input, degree M+1 output,
  // integration constant fixed below by anchoring at the left endpoint
  Matrix anti = Matrix::Zero(N + 1, N);
  for (int k = 1; k <= M + 1; ++k) {
    if (k - 1 < N) anti(k, k - 1) += 1.0 / (2.0 * k);
    if (k + 1 < N) anti(k, k + 1) -= 1.0 / (2.0 * k);
  }
  anti(1, 0) += 0.5;  // d/dx T_1 = T_0, so T_0 integrates to T_1 exactly

  Matrix evalNodes(N, N + 1);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k <= N; ++k) evalNodes(j, k) = std::cos(k * nodeAngle(j, M));

  Matrix antiValues = evalNodes * anti * toCoeff;
  const Eigen::RowVectorXd atLeft = antiValues.row(0);
  antiValues.rowwise() -= atLeft;
  g.L = 0.5 * (b - a) * antiValues;
  g.weights = g.L.row(N - 1).transpose();
  g.U = Vector::Ones(N) * g.weights.transpose() - g.L;
  return g;
}

Vector sampleAtNodes(const MatPoly1& v, const CollocationGrid& grid) {
  if (v.cols() != 1)
    throw std::invalid_argument("sampleAtNodes: expected a column vector");
  const int n = v.rows();
  Vector out(n * grid.N);
  for (int j = 0; j < grid.N; ++j) {
    Matrix val = v.eval(grid.points(j));
    for (int i = 0; i < n; ++i) out(i * grid.N + j) = val(i, 0);
  }
  return out;
}

Matrix discretize(const PIOperator& p, const CollocationGrid& grid) {
  const int N = grid.N;
  const int nr = p.rows();
  const int nc = p.cols();
  Matrix out = Matrix::Zero(nr * N, nc * N);
  for (int j = 0; j < N; ++j) {
    Matrix r0 = p.R0().eval(grid.points(j));
    for (int i = 0; i < nr; ++i)
      for (int k = 0; k < nc; ++k) out(i * N + j, k * N + j) += r0(i, k);
    for (int l = 0; l < N; ++l) {
      const double lw = grid.L(j, l);
      const double uw = grid.U(j, l);
      if (lw != 0.0) {
        Matrix r1 = p.R1().eval(grid.points(j), grid.points(l));
        for (int i = 0; i < nr; ++i)
          for (int k = 0; k < nc; ++k) out(i * N + j, k * N + l) += lw * r1(i, k);
      }
      if (uw != 0.0) {
        Matrix r2 = p.R2().eval(grid.points(j), grid.points(l));
        for (int i = 0; i < nr; ++i)
          for (int k = 0; k < nc; ++k) out(i * N + j, k * N + l) += uw * r2(i, k);
      }
    }
  }
  return out;
}

DiscretizedPIE discretizePIE(const PIESystem& sys, const CollocationGrid& grid) {
  DiscretizedPIE d;
  d.grid = grid;
  d.nx = sys.T.cols();
  d.TN = discretize(sys.T, grid);
  d.AN = discretize(sys.A, grid);
  return d;
}

Spectrum spectrum(const DiscretizedPIE& d, double filter) {
  Eigen::GeneralizedEigenSolver<Matrix> ges;
  ges.compute(d.AN, d.TN, /*computeEigenvectors=*/false);
  if (ges.info() != Eigen::Success)
    throw std::runtime_error("spectrum: QZ iteration failed to converge");
  Spectrum out;
  const auto& alphas = ges.alphas();
  const auto& betas = ges.betas();
  double betaMax = 0.0;
  for (int i = 0; i < betas.size(); ++i)
    betaMax = std::max(betaMax, std::abs(betas(i)));
  for (int i = 0; i < alphas.size(); ++i) {
    const std::complex<double> num = alphas(i);
    const double den = betas(i);
    // Beyond the plain modulus filter, a singular state map produces QZ
    // noise modes at large-but-finite modulus whose beta is far below the
    // pencil scale; drop those too, guarded by a modulus floor so genuine
    // slowly-weighted eigenvalues near the rightmost are never discarded.
    const bool infinite = std::abs(den) * filter <= std::abs(num);
    const bool noise = std::abs(den) <= 1e-4 * betaMax &&
                       std::abs(num) >= 1e3 * std::abs(den);
    if (infinite || noise) {
      ++out.spuriousCount;
      continue;
    }
    out.finite.push_back(num / den);
  }
  if (out.finite.empty()) {
    std::ostringstream os;
    os << "spectrum: pencil numerically singular, all " << alphas.size()
       << " eigenvalues beyond the modulus filter " << filter;
    throw std::runtime_error(os.str());
  }
  out.rightmost = out.finite.front().real();
  for (const auto& z : out.finite) out.rightmost = std::max(out.rightmost, z.real());
  return out;
}

RefinedSpectrum refinedSpectrum(const PIESystem& sys, double tol, int nStart,
                                int nMax, double filter) {
  RefinedSpectrum out;
  bool first = true;
  double prev = 0.0;
  for (int N = nStart; N <= nMax; N *= 2) {
    out.spec = spectrum(discretizePIE(sys, makeGrid(N, sys.T.a(), sys.T.b())),
                        filter);
    out.gridSize = N;
    if (!first && std::abs(out.spec.rightmost - prev) < tol) {
      out.converged = true;
      return out;
    }
    prev = out.spec.rightmost;
    first = false;
  }
  return out;
}

Trajectory simulate(const DiscretizedPIE& d, const Vector& xf0, double tmax,
                    double h) {
  if (xf0.size() != d.TN.rows())
    throw std::invalid_argument("simulate: initial state size mismatch");
  if (!(h > 0.0) || !(tmax >= 0.0))
    throw std::invalid_argument("simulate: need h > 0 and tmax >= 0");
  const int steps = static_cast<int>(std::ceil(tmax / h - 1e-12));
  Eigen::PartialPivLU<Matrix> lu(d.TN - 0.5 * h * d.AN);
  const double pivotMin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (pivotMin < 1e-12 * (1.0 + d.TN.cwiseAbs().maxCoeff()))
    throw std::runtime_error(
        "simulate: step matrix numerically singular; reduce h or refine the grid");
  const Matrix rhs = d.TN + 0.5 * h * d.AN;

  Trajectory traj;
  traj.times.resize(steps + 1);
  traj.xf.resize(xf0.size(), steps + 1);
  traj.x.resize(xf0.size(), steps + 1);
  traj.xfNorm.resize(steps + 1);
  traj.xNorm.resize(steps + 1);

  const int N = d.grid.N;
  const int nx = d.nx;
  auto l2norm = [&](const Vector& v) {
    double acc = 0.0;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < N; ++j)
        acc += d.grid.weights(j) * v(i * N + j) * v(i * N + j);
    return std::sqrt(std::max(acc, 0.0));
  };

  Vector cur = xf0;
  for (int k = 0; k <= steps; ++k) {
    traj.times(k) = k * h;
    traj.xf.col(k) = cur;
    traj.x.col(k) = d.TN * cur;
    traj.xfNorm(k) = l2norm(cur);
    traj.xNorm(k) = l2norm(traj.x.col(k));
    if (k < steps) cur = lu.solve(rhs * cur);
  }
  return traj;
}

SpectralBisection bisectRightmost(
    const std::function<PDESpec(double)>& family, double lo, double hi,
    double tol) {
  SpectralBisection out;
  auto rightmost = [&](double x) {
    double r = refinedSpectrum(convert(family(x))).spec.rightmost;
    out.evaluations.emplace_back(x, r);
    return r;
  };
  double flo = rightmost(lo), fhi = rightmost(hi);
  if (flo == 0.0) { out.threshold = lo; return out; }
  if (fhi == 0.0) { out.threshold = hi; return out; }
  if ((flo < 0.0) == (fhi < 0.0))
    throw std::runtime_error(
        "bisectRightmost: rightmost eigenvalue does not change sign on the "
        "bracket");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    double fm = rightmost(mid);
    if (fm == 0.0) { lo = hi = mid; break; }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  out.threshold = 0.5 * (lo + hi);
  return out;
}

void writeTrajectoryCsv(std::ostream& out, const Trajectory& traj, int nx,
                        int nodes) {
  out << "t";
  for (int i = 0; i < nx; ++i)
    for (int j = 1; j <= nodes; ++j) out << ",x" << i << "_node_" << j;
  out << ",xf_norm,x_norm\n";
  for (int k = 0; k < traj.times.size(); ++k) {
    out << traj.times(k);
    for (int r = 0; r < traj.x.rows(); ++r) out << ',' << traj.x(r, k);
    out << ',' << traj.xfNorm(k) << ',' << traj.xNorm(k) << '\n';
  }
}

void writeSpectrumCsv(std::ostream& out, const Spectrum& spec) {
  out << "re,im,classification\n";
  for (const auto& z : spec.finite)
    out << z.real() << ',' << z.imag() << ",finite\n";
  for (int i = 0; i < spec.spuriousCount; ++i) out << "inf,inf,spurious\n";
}

}  // namespace pie
