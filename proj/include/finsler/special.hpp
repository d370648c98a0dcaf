#pragma once

namespace finsler::special {

/// Euler beta function B(a, b) for a, b > 0. Throws DomainError otherwise.
double beta(double a, double b);

/// Bessel function of the first kind J_nu(x), nu >= 0, x >= 0.
///
/// Ascending series (long double accumulation) for x <= 12, Hankel asymptotic
/// expansion for x >= max(25, nu^2), and Schlafli's integral representation
/// evaluated by adaptive quadrature in between.
double bessel_j(double nu, double x);

/// d/dx J_nu(x) = (nu / x) J_nu(x) - J_{nu+1}(x).
double bessel_j_prime(double nu, double x);

/// First positive zero of J_nu. Scans from max(nu, 1) towards
/// nu + 3 nu^{1/3} + 3 for a sign change, widening the range when necessary,
/// then bisects to full double precision.
double bessel_first_zero(double nu);

}  // namespace finsler::special
