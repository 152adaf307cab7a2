#ifndef PIE_LPI_HPP
#define PIE_LPI_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pie/convert.hpp"
#include "pie/pialg.hpp"
#include "pie/sdp.hpp"

namespace pie {

/// Thrown by assemble() when the H basis cannot carry every monomial of the
/// Lyapunov operator; lists the uncoverable monomials.
class DegreeError : public std::runtime_error {
 public:
  DegreeError(const std::string& what, std::vector<std::string> missing)
      : std::runtime_error(what), missingMonomials(std::move(missing)) {}
  std::vector<std::string> missingMonomials;
};

/// Stability feasibility problem: with P = Z_P^* Q_P Z_P + alpha I the
/// operator G = -(T^* P A + A^* P T) - delta T^* T must equal Z_H^* Q_H Z_H
/// kernelwise; Q_P, Q_H range over the psd cone.
struct LPIProblem {
  GramBasis zP, zH;
  double alpha, delta;
  SDPData sdp;  // block 1 = Q_P, block 2 = Q_H; one row per kernel monomial
  Vector rowNorms;      // scale each row was divided by during normalization
  double kernelScale = 1.0;  // max right-hand-side kernel coefficient
};

enum class Verdict { CertifiedStable, InfeasibleAtDegree, SolverFailure };

struct StabilityCertificate {
  Verdict verdict = Verdict::SolverFailure;
  int dP = 0, dH = 0;
  double alpha = 0.0, delta = 0.0;
  Matrix QP, QH;
  double equalityResidual = 0.0;
  double minEigQP = 0.0, minEigQH = 0.0;
  int sdpIterations = 0;
  std::string message;
};

struct VerificationReport {
  bool verified = false;
  double kernelDiscrepancy = 0.0;   // rebuilt G vs Z_H^* Q_H Z_H
  double minSampledMargin = 0.0;    // min over v of <v,Gv>, G the decrease form
  double minEigQP = 0.0, minEigQH = 0.0;
  std::vector<std::string> failures;
};

struct LPIOptions {
  double alpha = 1e-4;
  double delta = 1e-4;
  int dP = 1;       // starting P-basis degree
  int maxDP = 3;    // escalation cap on infeasibility
  int dH = -1;      // H-basis degree; -1 selects the covering degree
  SDPOptions sdp;
};

/// Build the equality-constrained SDP at fixed degrees. dH = -1 picks the
/// smallest degree whose basis covers every monomial, with up to three
/// single-step bumps; a fixed insufficient dH throws DegreeError.
LPIProblem assemble(const PIESystem& pie, int dP, int dH, double alpha,
                    double delta);

StabilityCertificate solve(const LPIProblem& prob, const SDPOptions& opts = {});

/// Independent recomputation of the certified identity through fresh
/// compose/adjoint calls plus sampled quadratic forms and eigenvalue checks.
VerificationReport verifyCertificate(const PIESystem& pie,
                                     const StabilityCertificate& cert);

/// Degree-escalation driver: dP, dP+1, ... up to maxDP until certified.
StabilityCertificate analyzeStability(const PIESystem& pie,
                                      const LPIOptions& opts = {});

struct BisectionResult {
  double threshold = 0.0;
  bool monotone = true;
  std::vector<std::pair<double, bool>> evaluations;  // (parameter, certified)
  std::string note;
};

/// Bisection on certification verdicts over a monotone scalar family.
BisectionResult bisectParameter(const std::function<PDESpec(double)>& family,
                                double lo, double hi, double tol,
                                const LPIOptions& opts = {});

}  // namespace pie

#endif  // PIE_LPI_HPP
