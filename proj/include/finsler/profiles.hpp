#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace finsler {

/// Radial profile g: [0, inf) -> [0, inf) with compact support [0, support].
/// The represented function is u(x) = g(d(x0, x)).
///
/// The exponent fields describe endpoint behaviour for graded quadrature:
/// g(rho) ~ rho^value_power_at_zero and |g'(rho)| ~ rho^derivative_power_at_zero
/// as rho -> 0, |g'(rho)| ~ (support - rho)^derivative_power_at_support as
/// rho -> support. Zero means regular.
struct Profile {
    std::string kind;
    nlohmann::json params = nlohmann::json::object();
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    double support = 1.0;
    std::vector<double> breakpoints;  ///< interior kinks, increasing
    double value_power_at_zero = 0.0;
    double derivative_power_at_zero = 0.0;
    double derivative_power_at_support = 0.0;
    bool monotone = true;  ///< nonincreasing
    double sup = 1.0;      ///< sup g; HUGE_VAL when unbounded

    double operator()(double rho) const { return rho >= support ? 0.0 : value(rho); }
    [[nodiscard]] double slope(double rho) const { return rho >= support ? 0.0 : derivative(rho); }
    /// {0, breakpoints..., support}.
    [[nodiscard]] std::vector<double> pieces() const;
    /// lambda * g.
    [[nodiscard]] Profile scaled(double lambda) const;
    [[nodiscard]] nlohmann::json descriptor() const;
};

namespace profiles {

/// height * (1 - rho / radius)_+.
Profile cone(double radius = 1.0, double height = 1.0);
/// min(height, slope * (radius - rho)_+).
Profile plateau(double height = 1.0, double slope = 2.0, double radius = 1.0);
/// height * cos^2(pi (rho - center) / (2 width)) on |rho - center| < width.
/// Not monotone: its rearrangement strictly lowers the energy.
Profile ring(double center, double width, double height = 1.0);
/// height * (1 - (rho / radius)^a)_+^b with a > 0, b >= 1.
Profile power_bump(double a, double b, double radius = 1.0, double height = 1.0);
/// (1 - (rho / R)^{(p-n)/(p-1)})_+ ; the family u_R of the support bound.
Profile morrey_extremal(double p, int n, double radius = 1.0);
/// H(1) - H(rho / R) on [0, R) with H(s) = int_0^s r^{(1-n)/(p-1)} (1 - r^n)^{1/(p-1)} dr.
Profile talenti_l1_extremal(double p, int n, double radius = 1.0);
/// int_0^s r^{(1-n)/(p-1)} (1 - r^n)^{1/(p-1)} dr by graded quadrature.
double talenti_h_integral(double p, int n, double s);
/// rho^{-(n-2)/2} J_nu(j_nu rho / R) with nu = mu_bar; the first Dirichlet
/// eigenfunction of the radial operator with Hardy term on the ball of radius R.
Profile bessel_eigen(int n, double mu_bar, double radius = 1.0);
/// (min(rho, rho_c)^{-s} - 1)_+ with s = (n - p) / p - delta and rho_c^{-s} = cap.
Profile hardy_cap(double p, int n, double delta, double cap);
/// Piecewise-linear interpolation of (nodes, values); the last value must be 0.
Profile table(std::vector<double> nodes, std::vector<double> values);

/// Random admissible profile for property suites: power bumps, cones,
/// plateaus, rings and decreasing tables with random parameters.
/// `monotone_only` restricts the draw to nonincreasing profiles; `min_a`
/// bounds the exponent a of power bumps from below (integrability of |g'|^p).
struct RandomSpec {
    double max_support = 1.0;
    bool monotone_only = false;
    double min_a = 1.0;
    bool vanish_at_zero = false;  ///< draw only rings that are zero near the origin
};
Profile random_profile(std::uint64_t seed, const RandomSpec& spec = {});

}  // namespace profiles

/// `{"kind": "morrey_extremal"|"u_R"|"talenti_l1_extremal"|"cone"|"plateau"|"ring"|
/// "power_bump"|"bessel_eigen"|"hardy_cap"|"table", ...}`. `n` defaults to the
/// instance dimension.
Profile profile_from_descriptor(const nlohmann::json& d, int n);

}  // namespace finsler
