#ifndef PIE_NUMERIC_HPP
#define PIE_NUMERIC_HPP

#include <complex>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "pie/model.hpp"

#include "pie/convert.hpp"
#include "pie/pialg.hpp"
#include "pie/polyalg.hpp"

namespace pie {

/// Chebyshev-Gauss-Lobatto collocation grid on [a,b] with one-sided
/// cumulative integration matrices built through the coefficient-domain
/// antiderivative, so variable-limit integrals retain spectral accuracy.
struct CollocationGrid {
  int N = 0;
  double a = 0.0, b = 1.0;
  Vector points;   ///< nodes, ascending, points(0)=a, points(N-1)=b
  Vector weights;  ///< full-interval quadrature weights (row sum of L at s=b)
  Matrix L;        ///< (L v)(s_i) ~ int_a^{s_i} v
  Matrix U;        ///< (U v)(s_i) ~ int_{s_i}^b v
};

CollocationGrid makeGrid(int N, double a, double b);

/// Sample each component of a polynomial column vector at the grid nodes,
/// stacked state-block-major: entry i*N + j is component i at node j.
Vector sampleAtNodes(const MatPoly1& v, const CollocationGrid& grid);

/// Collocation realization of a PI operator: per-block
/// diag(R0 at nodes) + L-weighted R1 kernel + U-weighted R2 kernel.
Matrix discretize(const PIOperator& p, const CollocationGrid& grid);

struct DiscretizedPIE {
  Matrix TN, AN;
  CollocationGrid grid;
  int nx = 0;
};

DiscretizedPIE discretizePIE(const PIESystem& sys, const CollocationGrid& grid);

/// Generalized eigenvalues of the pencil (A_N, T_N). T_N is structurally
/// singular whenever differentiated states exist, so eigenvalues with
/// modulus above the filter are classified as pencil-infinite and reported
/// separately rather than treated as spectrum.
struct Spectrum {
  std::vector<std::complex<double>> finite;
  int spuriousCount = 0;
  double rightmost = 0.0;  ///< max real part over finite eigenvalues
};

Spectrum spectrum(const DiscretizedPIE& d, double filter = 1e8);

/// Grid auto-refinement: start at N = 32 and double until the rightmost
/// finite eigenvalue moves by less than tol between grids, capped at N = 256.
struct RefinedSpectrum {
  Spectrum spec;
  int gridSize = 0;
  bool converged = false;
};

RefinedSpectrum refinedSpectrum(const PIESystem& sys, double tol = 1e-6,
                                int nStart = 32, int nMax = 256,
                                double filter = 1e8);

/// Trapezoidal time stepping of T_N dx/dt = A_N x from the sampled initial
/// fundamental state; also reconstructs the physical state x = T_N x_f and
/// records quadrature L2 norms of both over time.
struct Trajectory {
  Vector times;
  Matrix xf;  ///< one column per time sample, rows stacked state-block-major
  Matrix x;   ///< reconstructed state T_N x_f, same layout
  Vector xfNorm, xNorm;
};

Trajectory simulate(const DiscretizedPIE& d, const Vector& xf0, double tmax,
                    double h);

/// Sign bisection of the refined rightmost eigenvalue over a monotone scalar
/// family: finds the parameter where the spectrum crosses the imaginary
/// axis. Throws if the rightmost eigenvalue has the same sign at both ends.
struct SpectralBisection {
  double threshold = 0.0;
  std::vector<std::pair<double, double>> evaluations;  ///< (parameter, rightmost)
};

SpectralBisection bisectRightmost(
    const std::function<PDESpec(double)>& family, double lo, double hi,
    double tol);

/// CSV: header "t,<state_k>_node_<j>..." then one row per time sample.
void writeTrajectoryCsv(std::ostream& out, const Trajectory& traj, int nx,
                        int nodes);
/// CSV: header "re,im,classification" with finite/spurious rows.
void writeSpectrumCsv(std::ostream& out, const Spectrum& spec);

}  // namespace pie

#endif  // PIE_NUMERIC_HPP
