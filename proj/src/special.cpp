#include "finsler/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

namespace finsler::special {

double beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        std::ostringstream os;
        os << "beta: arguments must be positive (a=" << a << ", b=" << b << ")";
        throw DomainError(os.str());
    }
    if (a + b < 150.0) return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

namespace {

double series(double nu, double x) {
    const long double half = 0.5L * x;
    const long double q = -half * half;
    long double term = std::pow(half, static_cast<long double>(nu)) / std::tgamma(static_cast<long double>(nu) + 1.0L);
    long double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<long double>(k) * (static_cast<long double>(k) + nu));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum) && k > half) break;
    }
    return static_cast<double>(sum);
}

double hankel(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(term) > last && k > 2) break;  // asymptotic series diverging
        last = std::abs(term);
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            case 0: p += term; break;
        }
        if (std::abs(term) < 1e-17) break;
    }
    const double w = x - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(w) - q * std::sin(w));
}

double schlafli(double nu, double x) {
    quad::Options o;
    o.abs_tol = 1e-16;
    o.rel_tol = 1e-14;
    const auto first = quad::integrate([&](double t) { return std::cos(nu * t - x * std::sin(t)); }, 0.0,
                                       std::numbers::pi, o);
    double value = first.value / std::numbers::pi;
    const double s = std::sin(nu * std::numbers::pi);
    if (s != 0.0) {
        // Truncate where x sinh(t) + nu t exceeds 60.
        const double upper = std::asinh(60.0 / x);
        const auto second =
            quad::integrate([&](double t) { return std::exp(-x * std::sinh(t) - nu * t); }, 0.0, upper, o);
        value -= s / std::numbers::pi * second.value;
    }
    return value;
}

}  // namespace

double bessel_j(double nu, double x) {
    if (nu < 0.0 || x < 0.0) {
        std::ostringstream os;
        os << "bessel_j: requires nu >= 0 and x >= 0 (nu=" << nu << ", x=" << x << ")";
        throw DomainError(os.str());
    }
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    if (x <= 12.0) return series(nu, x);
    if (x >= std::max(25.0, nu * nu)) return hankel(nu, x);
    return schlafli(nu, x);
}

double bessel_j_prime(double nu, double x) {
    if (x == 0.0) {
        if (nu == 0.0) return 0.0;
        if (nu == 1.0) return 0.5;
        if (nu < 1.0) return HUGE_VAL;
        return 0.0;
    }
    return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

double bessel_first_zero(double nu) {
    if (nu < 0.0) throw DomainError("bessel_first_zero: nu must be nonnegative");
    const double lo0 = std::max(nu, 1.0);
    double upper = nu + 3.0 * std::cbrt(nu) + 3.0;
    const double step = 0.05;
    double a = lo0;
    double fa = bessel_j(nu, a);
    for (int widen = 0; widen < 6; ++widen) {
        while (a < upper) {
            const double b = std::min(a + step, upper);
            const double fb = bessel_j(nu, b);
            if (fa == 0.0) return a;
            if ((fa > 0.0) != (fb > 0.0)) {
                double lo = a, hi = b, flo = fa;
                for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = bessel_j(nu, mid);
                    if (fm == 0.0) return mid;
                    if ((fm > 0.0) == (flo > 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
            a = b;
            fa = fb;
        }
        upper += 2.0 * (upper - lo0);
    }
    std::ostringstream os;
    os << "bessel_first_zero: no sign change of J_" << nu << " on [" << lo0 << ", " << upper << "]";
    throw NumericalError(os.str(), a);
}

}  // namespace finsler::special
