#pragma once

#include <optional>

namespace finsler::constants {

/// Volume of the Euclidean unit ball in R^n: pi^{n/2} / Gamma(1 + n/2).
double omega(int n);

/// Hoelder conjugate p' = p / (p - 1).
double conjugate(double p);

/// Talenti's support-bound constant T_{p,n}; requires p > n >= 2.
double talenti_support(double p, int n);
/// T_{p,n} * avr^{-1/n}.
double morrey_support(double p, int n, double avr);

/// Interpolation exponent eta = np / (np + p - n); requires p > n >= 2.
double eta(double p, int n);

/// Talenti's L^1-bound constant C_{p,n}; requires p > n >= 2.
double talenti_l1(double p, int n);
/// C_{p,n} * avr^{-eta/n}.
double morrey_l1(double p, int n, double avr);

/// avr^{p/n} ((n - p) / p)^p; requires n > p > 1.
double hardy(double p, int n, double avr);

struct BpvConstant {
    double mu_bar;   ///< Bessel order sqrt((n-2)^2/4 - mu avr^{-2/n})
    double j_mu_bar; ///< first positive zero of J_{mu_bar}
    double value;    ///< avr^{2/n} j^2 (omega_n / vol)^{2/n}
};

/// Best constant of the Poincare inequality with subtracted Hardy term on a
/// domain of volume `volume`. Requires n >= 2 and
/// 0 <= mu <= (n-2)^2/4 avr^{2/n}; mu must be 0 when n = 2.
BpvConstant bpv(double mu, int n, double avr, double volume);

/// Upper end (n-2)^2/4 avr^{2/n} of the admissible mu range.
double mu_max(int n, double avr);

/// Limits appearing in the sharpness arguments for the two Morrey bounds.
struct SharpnessLimits {
    double support_energy;  ///< n omega_n ((p-n)/(p-1))^{p-1} avr
    double l1_sup;          ///< (1/n) B((1-n)p'/n + 1, p')
    double l1_mass;         ///< omega_n avr (1/n) B((1-n)p'/n + 2, p')
    double l1_energy;       ///< omega_n avr B((1-n)p'/n + 1, p' + 1)
};
SharpnessLimits sharpness_limits(double p, int n, double avr);

/// One row of the `constants` table. Entries whose domain condition fails for
/// the given (p, n) are left empty.
struct SharpConstants {
    double p = 0.0;
    int n = 0;
    double p_conj = 0.0;
    double avr = 1.0;
    double mu = 0.0;
    double volume = 0.0;
    double omega_n = 0.0;
    std::optional<double> T_pn, T_MS, C_pn, C_MS, eta, hardy_const, mu_bar, j_mu_bar, S_muF;
};

SharpConstants evaluate(double p, int n, double avr, double mu, std::optional<double> volume);

}  // namespace finsler::constants
