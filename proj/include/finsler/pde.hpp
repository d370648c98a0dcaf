#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "finsler/profiles.hpp"

// Radial boundary value problems on Wulff balls {H < R} of a normalized
// Minkowski norm. For u = g(H(x)) one has F*(Du) = |g'| and dv = dx, so every
// integral below is n omega_n times a one-dimensional integral in rho.

namespace finsler::pde {

/// Right-hand side of the equation.
///   eigen:   -Delta u - mu u / rho^2 = lambda u
///   power:   -Delta u - mu u / rho^2 + lambda u = u_+^{q-1},  q = exponent
///   general: -Delta_p u = lambda h(u)
struct Nonlinearity {
    enum class Kind { eigen, power, general };
    Kind kind = Kind::eigen;
    double exponent = 0.0;
    std::function<double(double)> h;
    std::function<double(double)> primitive;  ///< H(s) = int_0^s h
    std::vector<std::pair<double, double>> plateaus;  ///< intervals [a_k, b_k] with h <= 0
    std::string name = "eigen";

    static Nonlinearity eigen();
    static Nonlinearity power(double q);
    static Nonlinearity general(std::function<double(double)> h, std::function<double(double)> primitive,
                                std::string name, std::vector<std::pair<double, double>> plateaus = {});
    /// h = 0 on [a_k, b_k] = [2^{k^2}, 2^{k^2 + k}], k >= 1, and positive in between,
    /// with H(a_k) = a_k^p and a_k^p <= H(s) <= (1 + p) s^p off the plateaus.
    static Nonlinearity oscillatory(double p, int levels = 6);

    [[nodiscard]] double value(double s) const;     ///< right-hand side term at height s (lambda excluded)
    [[nodiscard]] double integral(double s) const;  ///< its primitive
    [[nodiscard]] nlohmann::json descriptor() const;
};

struct RadialBvp {
    int n = 2;
    double radius = 1.0;
    double mu = 0.0;
    double lambda = 0.0;
    double p = 2.0;  ///< exponent of the operator; 2 unless the nonlinearity is general
    Nonlinearity nonlinearity;
    int nodes = 4096;

    /// Admissibility of (n, mu, p) and the grid; throws DomainError.
    void validate() const;
    /// Shooting start rho = 1e-6 R.
    [[nodiscard]] double start() const { return 1e-6 * radius; }
    /// sqrt((n - 2)^2 / 4 - mu).
    [[nodiscard]] double mu_bar() const;
    /// Regular Frobenius exponent -(n - 2) / 2 + mu_bar of the Hardy operator at 0.
    [[nodiscard]] double frobenius_exponent() const;
    /// `nodes + 1` points on [a, b] graded quadratically at both ends.
    [[nodiscard]] std::vector<double> grid(double a, double b) const;
    [[nodiscard]] nlohmann::json descriptor() const;
};

/// Nodal profile with slopes, interpolated by cubic Hermite pieces. Below
/// rho.front() the profile is continued as u(rho.front()) (rho / rho.front())^exponent.
struct RadialSolution {
    std::vector<double> rho, u, du;
    double exponent = 0.0;

    [[nodiscard]] double sup() const;
    [[nodiscard]] double min() const;
    [[nodiscard]] double operator()(double r) const;
    /// Sample an analytic profile on the grid of `bvp`.
    static RadialSolution from_profile(const Profile& g, const RadialBvp& bvp);
    /// Columns rho, u, du.
    [[nodiscard]] std::string to_csv() const;
};

struct EnergyValue {
    double total = 0.0;
    double quadratic = 0.0;  ///< K^2 = E_2 - mu I_H + lambda L_2 (power), E_2 - mu I_H - lambda L_2 (eigen), E_p (general)
    double nonlinear = 0.0;  ///< int G(u) (power) or lambda int H(u) (general)
    double dirichlet = 0.0;  ///< int F*(Du)^p
    double hardy = 0.0;      ///< int u^2 / rho^2
    double l2 = 0.0;         ///< int u^2
    double rayleigh = 0.0;   ///< (E_2 - mu I_H) / L_2
    double residual = 0.0;   ///< largest relative weak residual over the test profiles
    bool divergent = false;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Energies of u and the weak residual of the Euler-Lagrange equation against
/// `tests` random test profiles sum_k c_k cos((2k + 1) pi rho / (2R)).
EnergyValue radial_energy(const RadialSolution& u, const RadialBvp& bvp, int tests = 20,
                          std::uint64_t seed = 20240601);
/// Same for an analytic profile, by adaptive quadrature over its pieces.
EnergyValue radial_energy(const Profile& g, const RadialBvp& bvp, int tests = 20, std::uint64_t seed = 20240601);

struct Eigenpair {
    double lambda = 0.0;
    double closed_form = 0.0;  ///< j_{mu_bar}^2 / R^2
    double mu_bar = 0.0;
    RadialSolution profile;
    EnergyValue energy;
    int iterations = 0;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Smallest lambda with a positive solution of the eigen problem: shooting on
/// y = u rho^{-e} from the start point and bisection on lambda by the presence
/// of a zero of y in (0, R]. Throws NumericalError when no bracket is found.
Eigenpair first_eigenvalue(const RadialBvp& bvp);

struct MountainPass {
    double height = 0.0;        ///< y(0) = lim u rho^{-e}
    double energy_level = 0.0;  ///< E(u) = K^2 / 2 - int G(u)
    double min_value = 0.0;
    RadialSolution profile;
    EnergyValue energy;
    int iterations = 0;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Positive solution of the power problem by shooting on the height: bisection
/// for the value of y(0) at which the first zero of y reaches R. Throws
/// NumericalError("no solution found in bracket") when the zero location does
/// not depend on the height in the searched range, as for the linear problem
/// with lambda <= -lambda_1.
MountainPass mountain_pass_solve(const RadialBvp& bvp);

/// c_{mu,lambda} = min(1, 1 + lambda / S) for n = 2 and
/// (4 / (n - 2)^2) mu_bar^2 min(1, 1 + lambda / S) for n >= 3, S = S_mu(W(R)).
double coercivity_constant(int n, double mu, double lambda, double radius);

struct CoercivityCheck {
    double constant = 0.0;
    double worst_ratio = 0.0;  ///< min K^2 / E_2 over the draws
    int cases = 0;
    bool pass = false;
    [[nodiscard]] nlohmann::json to_json() const;
};
CoercivityCheck coercivity_check(const RadialBvp& bvp, int cases = 100, std::uint64_t seed = 20240601);

struct CriticalProfile {
    int level = 0;            ///< truncation index k (0: untruncated)
    double plateau = 0.0;     ///< a_k
    double truncation = 0.0;  ///< b_k
    double sup = 0.0;
    double energy = 0.0;
    double residual = 0.0;
    double minimizer_sup = 0.0;     ///< sup of the discrete minimizer before polishing
    double polish_distance = 0.0;   ///< sup |u - u_min| / a_k
    double core_radius = 0.0;       ///< radius of the flat top u = a_k, 0 if none
    int iterations = 0;
    bool zero = false;
    RadialSolution profile;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct MultiplicityResult {
    std::vector<CriticalProfile> profiles;  ///< distinct profiles, increasing sup
    std::vector<CriticalProfile> rejected;
    std::vector<std::string> warnings;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct MultiplicityOptions {
    int k_max = 3;
    int minimizer_nodes = 400;
    int max_iterations = 20000;
};

/// For k = 1..k_max minimizes the energy (1/p) int |u'|^p - lambda int H_k(u),
/// H_k(s) = H(min(s, b_k)), by L-BFGS on a P1 grid, then polishes the minimizer
/// into an exact radial solution by shooting (from the origin, or from the edge
/// of a flat top at a_k). Fewer than two distinct profiles yields a warning.
MultiplicityResult multiplicity_explore(const RadialBvp& bvp, const MultiplicityOptions& opts = {});

/// `{"n", "R", "mu", "lambda", "p", "nonlinearity": "eigen"|"power"|"oscillatory"|"zero", "q"?, "nodes"?}`.
RadialBvp bvp_from_descriptor(const nlohmann::json& d);

}  // namespace finsler::pde
