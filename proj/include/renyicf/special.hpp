#ifndef RENYICF_SPECIAL_HPP
#define RENYICF_SPECIAL_HPP

#include <functional>

namespace renyicf {

// Modified Bessel function of the first kind, integer order.
// Power series for moderate argument, normalized backward (Miller)
// recurrence for large argument; relative accuracy ~1e-13.
double bessel_i(int nu, double x);

// Modified Bessel functions of the second kind, orders 0 and 1,
// via the SLATEC FNLIB Chebyshev expansions (full double precision).
double bessel_k0(double x);
double bessel_k1(double x);

// Exponentially scaled variants e^x K_nu(x).
double bessel_k0e(double x);
double bessel_k1e(double x);

// Survival function of the chi-squared distribution with k dof,
// i.e. Q(k/2, x/2) with Q the regularized upper incomplete gamma.
double chi2_sf(double chi2, double dof);

double gamma_p(double a, double x);  // regularized lower incomplete gamma
double gamma_q(double a, double x);  // regularized upper incomplete gamma

// Adaptive Simpson quadrature on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 50);

}  // namespace renyicf

#endif
