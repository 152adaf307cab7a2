#ifndef PIE_SDP_HPP
#define PIE_SDP_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pie/polyalg.hpp"

namespace pie {

/// Symmetric block-diagonal matrix, one dense block per cone block.
using BlockMatrix = std::vector<Matrix>;

/// Primal-dual pair
///   min tr(C X)  s.t.  tr(A_i X) = b_i,  X psd   (block-diagonal X)
///   max b^T y    s.t.  S = C - sum_i y_i A_i psd.
struct SDPData {
  std::vector<int> blockSizes;
  BlockMatrix C;
  std::vector<BlockMatrix> A;
  Vector b;
};

/// Feasible marks a primal iterate that satisfies the constraints to
/// tolerance and sits in the cone, but whose duality gap could not be closed
/// — the usual endgame on weakly feasible (boundary-only) problems.
enum class SDPStatus { Optimal, Feasible, Infeasible, MaxIterations, NumericalError };

struct SDPSolution {
  SDPStatus status = SDPStatus::NumericalError;
  BlockMatrix X, S;
  Vector y;
  double primalObjective = 0.0, dualObjective = 0.0;
  double gap = 0.0;             // relative duality gap
  double complementarity = 0.0; // mu = tr(X S) / n
  double primalResidual = 0.0;  // ||b - A(X)|| / (1 + ||b||)
  double dualResidual = 0.0;    // ||C - S - A*(y)|| / (1 + ||C||)
  int iterations = 0;
  std::string message;
};

struct SDPOptions {
  int maxIterations = 200;
  double tolFeas = 1e-8;
  double tolGap = 1e-9;
  double fractionToBoundary = 0.98;
  double rayNormThreshold = 1e6;
};

/// Deterministic single-threaded primal-dual interior-point solve with
/// Nesterov-Todd scaling and a Mehrotra predictor-corrector step.
SDPSolution solveSDP(const SDPData& data, const SDPOptions& opts = {});

/// Plain-text sparse interchange: number of constraints, number of blocks,
/// block sizes, right-hand side, then "con blk row col value" entries with
/// 1-based upper-triangular indices; entry 0 is the objective.
void writeSDPA(const SDPData& data, std::ostream& out);
SDPData readSDPA(std::istream& in);

BlockMatrix zeroBlocks(const std::vector<int>& sizes);
double blockDot(const BlockMatrix& p, const BlockMatrix& q);

}  // namespace pie

#endif  // PIE_SDP_HPP
