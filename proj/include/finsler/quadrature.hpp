#pragma once

#include <functional>
#include <span>

namespace finsler::quad {

/// Controls for the adaptive Gauss-Kronrod (7/15) integrator.
///
/// `left_power` / `right_power` declare the algebraic behaviour of the
/// integrand at the endpoints: f(x) ~ (x - a)^left_power near a. A negative
/// exponent triggers a power-grading substitution x = a + (b - a) t^k with
/// k = 1 / (1 + power), which turns the leading singular term into a constant.
struct Options {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_intervals = 4000;
    double left_power = 0.0;
    double right_power = 0.0;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

using Integrand = std::function<double(double)>;

Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Integrates over [pts.front(), pts.back()] piece by piece. Interior points are
/// kinks or jumps of the integrand. The endpoint exponents of `opts` apply only to
/// the first and last piece.
Result integrate_pieces(const Integrand& f, std::span<const double> pts, const Options& opts = {});

/// Grading exponent used for an endpoint with algebraic power `power`.
double grading_exponent(double power);

}  // namespace finsler::quad
