#include "pie/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pie {

namespace {

int totalDim(const std::vector<int>& sizes) {
  int n = 0;
  for (int s : sizes) n += s;
  return n;
}

double blockNorm(const BlockMatrix& p) {
  double sq = 0.0;
  for (const Matrix& m : p) sq += m.squaredNorm();
  return std::sqrt(sq);
}

Vector applyA(const SDPData& d, const BlockMatrix& x) {
  Vector out(d.b.size());
  for (int i = 0; i < d.b.size(); ++i) out(i) = blockDot(d.A[i], x);
  return out;
}

BlockMatrix applyAdj(const SDPData& d, const Vector& y) {
  BlockMatrix out = zeroBlocks(d.blockSizes);
  for (int i = 0; i < y.size(); ++i)
    for (size_t k = 0; k < out.size(); ++k) out[k] += y(i) * d.A[i][k];
  return out;
}

Matrix symmetricPower(const Matrix& m, double p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i)
    lam(i) = lam(i) > 0.0 ? std::pow(lam(i), p) : 0.0;
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

// NT scaling point: W = S^{-1/2} (S^{1/2} X S^{1/2})^{1/2} S^{-1/2}.
Matrix ntScaling(const Matrix& x, const Matrix& s) {
  Matrix sh = symmetricPower(s, 0.5);
  Matrix shi = symmetricPower(s, -0.5);
  Matrix mid = symmetricPower(sh * x * sh, 0.5);
  Matrix w = shi * mid * shi;
  return 0.5 * (w + w.transpose());
}

// Largest alpha in (0, 1] with X + alpha dX psd, shrunk by gamma off 1.
double maxStep(const BlockMatrix& x, const BlockMatrix& dx, double gamma) {
  double alpha = 1.0;
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k].rows() == 0) continue;
    Eigen::LLT<Matrix> llt(x[k]);
    if (llt.info() != Eigen::Success) {
      // boundary iterate: nudge into the cone to keep a usable factor
      double eps = 1e-14 * std::max(1.0, x[k].trace());
      llt.compute(x[k] + eps * Matrix::Identity(x[k].rows(), x[k].cols()));
      if (llt.info() != Eigen::Success) return 0.0;
    }
    Matrix l = llt.matrixL();
    Matrix m = l.triangularView<Eigen::Lower>().solve(dx[k]);
    m = l.triangularView<Eigen::Lower>().solve(m.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                             Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0.0) alpha = std::min(alpha, -gamma / lmin);
  }
  return alpha;
}

struct Direction {
  BlockMatrix dX, dS;
  Vector dy;
};

}  // namespace

BlockMatrix zeroBlocks(const std::vector<int>& sizes) {
  BlockMatrix out;
  out.reserve(sizes.size());
  for (int s : sizes) out.push_back(Matrix::Zero(s, s));
  return out;
}

double blockDot(const BlockMatrix& p, const BlockMatrix& q) {
  double sum = 0.0;
  for (size_t k = 0; k < p.size(); ++k)
    sum += p[k].cwiseProduct(q[k]).sum();
  return sum;
}

SDPSolution solveSDP(const SDPData& data, const SDPOptions& opts) {
  const int m = static_cast<int>(data.b.size());
  const int n = totalDim(data.blockSizes);
  const size_t nb = data.blockSizes.size();
  SDPSolution sol;
  if (static_cast<int>(data.A.size()) != m || data.C.size() != nb) {
    sol.message = "inconsistent problem data";
    return sol;
  }

  if (n == 0 || m == 0) {
    // no cone or no constraints: X = 0 (resp. y = 0) is optimal when b = 0
    sol.X = zeroBlocks(data.blockSizes);
    sol.S = data.C;
    sol.y = Vector::Zero(m);
    bool ok = data.b.size() == 0 || data.b.norm() == 0.0;
    for (const Matrix& c : data.C)
      if (c.rows() > 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
        ok = ok && es.eigenvalues().minCoeff() >= 0.0;
      }
    sol.status = ok ? SDPStatus::Optimal : SDPStatus::Infeasible;
    sol.message = ok ? "trivially optimal" : "trivially infeasible";
    return sol;
  }

  // initial point: scaled identity comfortably interior for both cones
  double dataScale = std::max({1.0, data.b.lpNorm<Eigen::Infinity>(),
                               blockNorm(data.C)});
  for (const BlockMatrix& a : data.A) dataScale = std::max(dataScale, blockNorm(a));
  double tau = std::sqrt(dataScale) * std::sqrt(static_cast<double>(n));
  BlockMatrix X = zeroBlocks(data.blockSizes);
  BlockMatrix S = zeroBlocks(data.blockSizes);
  for (size_t k = 0; k < nb; ++k) {
    X[k] = tau * Matrix::Identity(data.blockSizes[k], data.blockSizes[k]);
    S[k] = X[k];
  }
  Vector y = Vector::Zero(m);

  const double bNorm = 1.0 + data.b.norm();
  const double cNorm = 1.0 + blockNorm(data.C);

  for (int iter = 1; iter <= opts.maxIterations; ++iter) {
    sol.iterations = iter;
    Vector rp = data.b - applyA(data, X);
    BlockMatrix Rd = data.C;
    BlockMatrix ay = applyAdj(data, y);
    for (size_t k = 0; k < nb; ++k) Rd[k] -= S[k] + ay[k];

    double mu = blockDot(X, S) / n;
    sol.complementarity = mu;
    sol.primalObjective = blockDot(data.C, X);
    sol.dualObjective = data.b.dot(y);
    sol.primalResidual = rp.norm() / bNorm;
    sol.dualResidual = blockNorm(Rd) / cNorm;
    sol.gap = std::abs(sol.primalObjective - sol.dualObjective) /
              (1.0 + std::abs(sol.primalObjective) + std::abs(sol.dualObjective));

    // the objective gap is meaningless when a weakly feasible problem drives
    // |y| large, so converged complementarity counts as a closed gap
    bool gapClosed = sol.gap <= opts.tolGap ||
                     mu <= opts.tolGap * std::max(1.0, dataScale);
    if (sol.primalResidual <= opts.tolFeas && sol.dualResidual <= opts.tolFeas &&
        gapClosed) {
      sol.status = SDPStatus::Optimal;
      sol.message = "converged";
      break;
    }

    // primal infeasibility: a diverging dual direction that improves the
    // dual objective while A*(y) stays (essentially) negative semidefinite
    auto improvingRay = [&]() {
      double yNorm = y.norm();
      if (yNorm < opts.rayNormThreshold) return false;
      Vector yhat = y / yNorm;
      double by = data.b.dot(yhat);
      if (by < 1e-7 * (1.0 + data.b.lpNorm<Eigen::Infinity>())) return false;
      BlockMatrix ray = applyAdj(data, yhat);
      double lmax = 0.0;
      for (const Matrix& blk : ray)
        if (blk.rows() > 0) {
          Eigen::SelfAdjointEigenSolver<Matrix> es(blk, Eigen::EigenvaluesOnly);
          lmax = std::max(lmax, es.eigenvalues().maxCoeff());
        }
      return by >= 20.0 * lmax;
    };
    if (improvingRay()) {
      sol.status = SDPStatus::Infeasible;
      sol.message = "dual improving ray found";
      break;
    }

    BlockMatrix W(nb);
    for (size_t k = 0; k < nb; ++k) W[k] = ntScaling(X[k], S[k]);

    // Schur complement M_ij = tr(A_i W A_j W), factored once per iteration
    std::vector<BlockMatrix> WAW(m);
    for (int i = 0; i < m; ++i) {
      WAW[i].resize(nb);
      for (size_t k = 0; k < nb; ++k) WAW[i][k] = W[k] * data.A[i][k] * W[k];
    }
    Matrix M(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        M(i, j) = blockDot(data.A[i], WAW[j]);
        M(j, i) = M(i, j);
      }
    // proximal regularization keeps the factorization healthy when the
    // constraint set carries (consistent) linear dependencies
    M.diagonal().array() += 1e-12 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    Eigen::LDLT<Matrix> ldlt(M);
    if (ldlt.info() != Eigen::Success) {
      sol.message = "Schur complement factorization failed";
      sol.status = SDPStatus::NumericalError;
      break;
    }

    BlockMatrix WRdW(nb);
    for (size_t k = 0; k < nb; ++k) WRdW[k] = W[k] * Rd[k] * W[k];

    auto solveDirection = [&](const BlockMatrix& Rc) {
      Direction d;
      // A(Rc) + A(W Rd W) terms
      Vector rhs = rp;
      for (int i = 0; i < m; ++i)
        rhs(i) += blockDot(data.A[i], WRdW) - blockDot(data.A[i], Rc);
      d.dy = ldlt.solve(rhs);
      d.dS.resize(nb);
      d.dX.resize(nb);
      BlockMatrix ady = applyAdj(data, d.dy);
      for (size_t k = 0; k < nb; ++k) {
        d.dS[k] = Rd[k] - ady[k];
        Matrix dx = Rc[k] - W[k] * d.dS[k] * W[k];
        d.dX[k] = 0.5 * (dx + dx.transpose());
      }
      return d;
    };

    // predictor: aim at mu = 0
    BlockMatrix Rc(nb);
    for (size_t k = 0; k < nb; ++k) Rc[k] = -X[k];
    Direction aff = solveDirection(Rc);
    double apAff = maxStep(X, aff.dX, opts.fractionToBoundary);
    double adAff = maxStep(S, aff.dS, opts.fractionToBoundary);
    double muAff = 0.0;
    {
      BlockMatrix Xa = X, Sa = S;
      for (size_t k = 0; k < nb; ++k) {
        Xa[k] += apAff * aff.dX[k];
        Sa[k] += adAff * aff.dS[k];
      }
      muAff = blockDot(Xa, Sa) / n;
    }
    double sigma = std::pow(std::max(0.0, muAff / mu), 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // corrector: recenter toward sigma mu
    for (size_t k = 0; k < nb; ++k) {
      Matrix sinv = symmetricPower(S[k], -1.0);
      Rc[k] = sigma * mu * sinv - X[k];
    }
    Direction dir = solveDirection(Rc);
    double ap = maxStep(X, dir.dX, opts.fractionToBoundary);
    double ad = maxStep(S, dir.dS, opts.fractionToBoundary);
    const double xScale = [&]() {
      double m = 1.0;
      for (const Matrix& blk : X)
        if (blk.size() > 0) m = std::max(m, blk.cwiseAbs().maxCoeff());
      return m;
    }();
    if (ap < 1e-12 || ad < 1e-12) {
      // the certificate magnitude is unbounded near the feasibility
      // boundary, so judge the residual relative to the iterate scale
      if (sol.primalResidual <= 100.0 * opts.tolFeas * xScale &&
          mu <= 10.0 * opts.tolGap * std::max(1.0, dataScale)) {
        sol.status = SDPStatus::Feasible;
        sol.message = "primal feasible point, gap not closed (cone boundary)";
      } else if (improvingRay()) {
        sol.status = SDPStatus::Infeasible;
        sol.message = "dual improving ray found at stalled iterate";
      } else {
        sol.message = "step length collapsed";
        sol.status = SDPStatus::NumericalError;
      }
      break;
    }
    for (size_t k = 0; k < nb; ++k) {
      X[k] += ap * dir.dX[k];
      S[k] += ad * dir.dS[k];
    }
    y += ad * dir.dy;

    if (iter == opts.maxIterations) {
      if (sol.primalResidual <= 100.0 * opts.tolFeas * xScale &&
          mu <= 10.0 * opts.tolGap * std::max(1.0, dataScale)) {
        sol.status = SDPStatus::Feasible;
        sol.message = "primal feasible point, gap not closed (iteration cap)";
      } else if (improvingRay()) {
        sol.status = SDPStatus::Infeasible;
        sol.message = "dual improving ray found at iteration cap";
      } else {
        sol.status = SDPStatus::MaxIterations;
        sol.message = "iteration limit reached";
      }
    }
  }

  sol.X = std::move(X);
  sol.S = std::move(S);
  sol.y = std::move(y);
  return sol;
}

namespace {

void writeNumber(std::ostream& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

void writeEntries(std::ostream& out, int con, const BlockMatrix& mat) {
  for (size_t k = 0; k < mat.size(); ++k)
    for (int i = 0; i < mat[k].rows(); ++i)
      for (int j = i; j < mat[k].cols(); ++j) {
        if (mat[k](i, j) == 0.0) continue;
        out << con << ' ' << (k + 1) << ' ' << (i + 1) << ' ' << (j + 1) << ' ';
        writeNumber(out, mat[k](i, j));
        out << '\n';
      }
}

}  // namespace

void writeSDPA(const SDPData& data, std::ostream& out) {
  out << data.b.size() << '\n' << data.blockSizes.size() << '\n';
  for (size_t k = 0; k < data.blockSizes.size(); ++k)
    out << data.blockSizes[k] << (k + 1 < data.blockSizes.size() ? ' ' : '\n');
  if (data.blockSizes.empty()) out << '\n';
  for (int i = 0; i < data.b.size(); ++i) {
    writeNumber(out, data.b(i));
    out << (i + 1 < data.b.size() ? ' ' : '\n');
  }
  if (data.b.size() == 0) out << '\n';
  writeEntries(out, 0, data.C);
  for (size_t i = 0; i < data.A.size(); ++i)
    writeEntries(out, static_cast<int>(i + 1), data.A[i]);
}

SDPData readSDPA(std::istream& in) {
  SDPData data;
  int m = 0, nb = 0;
  if (!(in >> m >> nb)) throw std::runtime_error("sdpa: bad header");
  data.blockSizes.resize(nb);
  for (int& s : data.blockSizes)
    if (!(in >> s)) throw std::runtime_error("sdpa: bad block sizes");
  data.b.resize(m);
  for (int i = 0; i < m; ++i)
    if (!(in >> data.b(i))) throw std::runtime_error("sdpa: bad rhs");
  data.C = zeroBlocks(data.blockSizes);
  data.A.assign(m, zeroBlocks(data.blockSizes));
  int con, blk, row, col;
  double val;
  while (in >> con >> blk >> row >> col >> val) {
    if (con < 0 || con > m || blk < 1 || blk > nb)
      throw std::runtime_error("sdpa: entry out of range");
    Matrix& target = con == 0 ? data.C[blk - 1] : data.A[con - 1][blk - 1];
    if (row < 1 || col < row || col > target.cols())
      throw std::runtime_error("sdpa: index out of range");
    target(row - 1, col - 1) = val;
    target(col - 1, row - 1) = val;
  }
  return data;
}

}  // namespace pie
