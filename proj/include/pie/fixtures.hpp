#ifndef PIE_FIXTURES_HPP
#define PIE_FIXTURES_HPP

#include <map>
#include <string>

#include "pie/model.hpp"

namespace pie {

/// McKendrick population model on [0,1]:
///   xdot = -dx/ds + c x,  x(0) = int_0^1 (1-s)s x(s) ds.
PDESpec mckendrickSpec(double growthRate);

/// Reaction-diffusion with Dirichlet boundary conditions on [0,1]:
///   xdot = lambda x + d^2x/ds^2, x(0) = x(1) = 0.
PDESpec dirichletDiffusionSpec(double lambda);

/// Closed-loop reaction-diffusion plus observer on [0,1], the observer
/// correction using the polynomial gain fit and the integral rewrite of the
/// boundary slope measurement.
PDESpec rdObserverSpec(double lambda, int gainDegree);

/// Backstepping observer gain l(s) = -sqrt(lambda) I1(sqrt(lambda(1-s^2)))
/// / sqrt(1-s^2), evaluated through the power series of I1(z)/z.
double observerGain(double lambda, double s);

/// Least-squares polynomial fit of the observer gain on a 200-point uniform
/// grid; returns monomial coefficients c0..cdeg.
Coeffs1 observerGainFit(double lambda, int degree);

/// Build a named fixture: "mckendrick" (param c), "dirichlet-diffusion"
/// (param lambda), "rd-observer" (params lambda, degree).
PDESpec makeFixture(const std::string& name,
                    const std::map<std::string, double>& params);

}  // namespace pie

#endif  // PIE_FIXTURES_HPP
