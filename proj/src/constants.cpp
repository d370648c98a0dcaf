#include "finsler/constants.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/special.hpp"

namespace finsler::constants {

namespace {

void require_morrey(double p, int n, const char* who) {
    if (n < 2 || !(p > n)) {
        std::ostringstream os;
        os << who << ": requires p > n >= 2 (p=" << p << ", n=" << n << ")";
        throw DomainError(os.str());
    }
}

void require_avr(double avr, const char* who) {
    if (!(avr > 0.0) || avr > 1.0) {
        std::ostringstream os;
        os << who << ": asymptotic volume ratio must lie in (0, 1], got " << avr;
        throw DomainError(os.str());
    }
}

}  // namespace

double omega(int n) {
    if (n < 1) throw DomainError("omega: dimension must be positive");
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(1.0 + 0.5 * n);
}

double conjugate(double p) {
    if (!(p > 1.0)) throw DomainError("conjugate: requires p > 1");
    return p / (p - 1.0);
}

double talenti_support(double p, int n) {
    require_morrey(p, n, "talenti_support");
    return std::pow(n, -1.0 / p) * std::pow(omega(n), -1.0 / n) * std::pow((p - 1.0) / (p - n), (p - 1.0) / p);
}

double morrey_support(double p, int n, double avr) {
    require_avr(avr, "morrey_support");
    return talenti_support(p, n) * std::pow(avr, -1.0 / n);
}

double eta(double p, int n) {
    require_morrey(p, n, "eta");
    return n * p / (n * p + p - n);
}

double talenti_l1(double p, int n) {
    require_morrey(p, n, "talenti_l1");
    const double pc = conjugate(p);
    const double nn = n;
    const double a = (1.0 - nn) * pc / nn + 1.0;
    return std::pow(nn * std::pow(omega(n), 1.0 / nn), -nn * pc / (nn + pc)) * (1.0 / nn + 1.0 / pc) *
           std::pow(1.0 / nn - 1.0 / p, ((nn - 1.0) * pc - nn) / (nn + pc)) *
           std::pow(special::beta(a, pc + 1.0), nn / (nn + pc));
}

double morrey_l1(double p, int n, double avr) {
    require_avr(avr, "morrey_l1");
    return talenti_l1(p, n) * std::pow(avr, -eta(p, n) / n);
}

double hardy(double p, int n, double avr) {
    if (!(p > 1.0) || !(n > p)) {
        std::ostringstream os;
        os << "hardy: requires n > p > 1 (p=" << p << ", n=" << n << ")";
        throw DomainError(os.str());
    }
    require_avr(avr, "hardy");
    return std::pow(avr, p / n) * std::pow((n - p) / p, p);
}

double mu_max(int n, double avr) {
    return 0.25 * (n - 2.0) * (n - 2.0) * std::pow(avr, 2.0 / n);
}

BpvConstant bpv(double mu, int n, double avr, double volume) {
    if (n < 2) throw DomainError("bpv: requires n >= 2");
    require_avr(avr, "bpv");
    if (!(volume > 0.0)) throw DomainError("bpv: domain volume must be positive");
    const double top = mu_max(n, avr);
    if (mu < 0.0 || mu > top * (1.0 + 1e-14)) {
        std::ostringstream os;
        os << "bpv: mu=" << mu << " outside admissible range [0, " << top << "]";
        throw DomainError(os.str());
    }
    const double radicand = 0.25 * (n - 2.0) * (n - 2.0) - mu * std::pow(avr, -2.0 / n);
    BpvConstant out{};
    out.mu_bar = std::sqrt(std::max(0.0, radicand));
    out.j_mu_bar = special::bessel_first_zero(out.mu_bar);
    out.value = std::pow(avr, 2.0 / n) * out.j_mu_bar * out.j_mu_bar * std::pow(omega(n) / volume, 2.0 / n);
    return out;
}

SharpnessLimits sharpness_limits(double p, int n, double avr) {
    require_morrey(p, n, "sharpness_limits");
    require_avr(avr, "sharpness_limits");
    const double pc = conjugate(p);
    const double a = (1.0 - n) * pc / n;
    const double w = omega(n);
    SharpnessLimits s{};
    s.support_energy = n * w * std::pow((p - n) / (p - 1.0), p - 1.0) * avr;
    s.l1_sup = special::beta(a + 1.0, pc) / n;
    s.l1_mass = w * avr * special::beta(a + 2.0, pc) / n;
    s.l1_energy = w * avr * special::beta(a + 1.0, pc + 1.0);
    return s;
}

SharpConstants evaluate(double p, int n, double avr, double mu, std::optional<double> volume) {
    SharpConstants c;
    c.p = p;
    c.n = n;
    c.avr = avr;
    c.mu = mu;
    c.omega_n = omega(n);
    c.p_conj = p > 1.0 ? conjugate(p) : 0.0;
    c.volume = volume.value_or(c.omega_n);
    if (p > n && n >= 2) {
        c.T_pn = talenti_support(p, n);
        c.T_MS = morrey_support(p, n, avr);
        c.C_pn = talenti_l1(p, n);
        c.C_MS = morrey_l1(p, n, avr);
        c.eta = eta(p, n);
    }
    if (n > p && p > 1.0) c.hardy_const = hardy(p, n, avr);
    if (n >= 2 && mu >= 0.0 && mu <= mu_max(n, avr)) {
        const BpvConstant b = bpv(mu, n, avr, c.volume);
        c.mu_bar = b.mu_bar;
        c.j_mu_bar = b.j_mu_bar;
        c.S_muF = b.value;
    }
    return c;
}

}  // namespace finsler::constants
