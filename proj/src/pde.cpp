#include "finsler/pde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include <ceres/ceres.h>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/kernels.hpp"
#include "finsler/report.hpp"

namespace finsler::pde {

namespace {

constexpr double kPi = 3.14159265358979323846;

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double positive_power(double s, double q) { return s > 0.0 ? std::pow(s, q) : 0.0; }

// Signed power |x|^{k-1} x.
double signed_power(double x, double k) { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), k - 1.0), x); }

// Piecewise description of the shipped oscillatory primitive.
struct Oscillatory {
    double p;
    std::vector<double> a, b;  // a[0] = b[0] = 0, then a_k, b_k

    // T(x) = x^p (1 + p (1 - x)): T(0) = T'(0) = 0, T(1) = 1, T'(1) = 0.
    [[nodiscard]] double shape(double x) const { return std::pow(x, p) * (1.0 + p * (1.0 - x)); }
    [[nodiscard]] double shape_slope(double x) const { return p * (1.0 + p) * std::pow(x, p - 1.0) * (1.0 - x); }

    // Rising piece k spans [b_k, a_{k+1}] from a_k^p to a_{k+1}^p.
    [[nodiscard]] double primitive(double s) const {
        if (s <= 0.0) return 0.0;
        for (std::size_t k = 0; k + 1 < a.size(); ++k) {
            const double lo = b[k], hi = a[k + 1];
            const double base = std::pow(a[k], p);
            if (s < lo) return base;
            if (s <= hi) return base + (std::pow(hi, p) - base) * shape((s - lo) / (hi - lo));
        }
        return std::pow(a.back(), p);
    }
    [[nodiscard]] double value(double s) const {
        if (s <= 0.0) return 0.0;
        for (std::size_t k = 0; k + 1 < a.size(); ++k) {
            const double lo = b[k], hi = a[k + 1];
            if (s < lo) return 0.0;
            if (s <= hi) {
                const double base = std::pow(a[k], p);
                return (std::pow(hi, p) - base) * shape_slope((s - lo) / (hi - lo)) / (hi - lo);
            }
        }
        return 0.0;
    }
};

std::array<double, 5> gauss_nodes() {
    return {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
}
std::array<double, 5> gauss_weights() {
    return {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
}

// Random C^1 test profile vanishing at R with zero slope at 0.
struct TestProfile {
    std::array<double, 4> c{};
    double radius = 1.0;
    [[nodiscard]] double value(double r) const {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += c[k] * std::cos((2 * k + 1) * kPi * r / (2.0 * radius));
        return s;
    }
    [[nodiscard]] double slope(double r) const {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double w = (2 * k + 1) * kPi / (2.0 * radius);
            s -= c[k] * w * std::sin(w * r);
        }
        return s;
    }
};

std::vector<TestProfile> test_profiles(int count, double radius, std::uint64_t seed) {
    std::vector<TestProfile> out;
    for (int j = 0; j < count; ++j) {
        kernels::SplitMix64 rng(kernels::block_seed(seed, static_cast<std::uint64_t>(j)));
        TestProfile t;
        t.radius = radius;
        for (int k = 0; k < 4; ++k) t.c[k] = (2.0 * rng.uniform() - 1.0) / (k + 1);
        out.push_back(t);
    }
    return out;
}

// Accumulates the integrals behind EnergyValue. Layout: dirichlet, hardy, l2,
// nonlinear primitive, then per test profile four signed and four absolute terms.
class Accumulator {
public:
    Accumulator(const RadialBvp& bvp, std::vector<TestProfile> tests)
        : bvp_(bvp), tests_(std::move(tests)), sums_(4 + 8 * tests_.size(), 0.0) {}

    void add(double r, double u, double du, double w) {
        const int n = bvp_.n;
        const double rn1 = std::pow(r, n - 1);
        const double rn3 = rn1 / (r * r);
        const double flux = signed_power(du, bvp_.p);
        const double f = bvp_.nonlinearity.value(u);
        sums_[0] += w * std::pow(std::abs(du), bvp_.p) * rn1;
        sums_[1] += w * u * u * rn3;
        sums_[2] += w * u * u * rn1;
        sums_[3] += w * bvp_.nonlinearity.integral(u) * rn1;
        for (std::size_t j = 0; j < tests_.size(); ++j) {
            const double phi = tests_[j].value(r), dphi = tests_[j].slope(r);
            const double t[4] = {flux * dphi * rn1, u * phi * rn3, u * phi * rn1, f * phi * rn1};
            for (int k = 0; k < 4; ++k) {
                sums_[4 + 8 * j + k] += w * t[k];
                sums_[4 + 8 * j + 4 + k] += w * std::abs(t[k]);
            }
        }
    }

    // Power-law continuation u = c (r / r0)^e on [0, r0].
    void add_tail(double r0, double c, double e) {
        if (r0 <= 0.0 || c == 0.0) return;
        const int n = bvp_.n;
        auto moment = [&](double exponent) {  // int_0^r0 r^exponent dr
            if (exponent <= -1.0) {
                divergent_ = true;
                return 0.0;
            }
            return std::pow(r0, exponent + 1.0) / (exponent + 1.0);
        };
        const double k = c * std::pow(r0, -e);  // u = k r^e
        if (e != 0.0) sums_[0] += std::pow(std::abs(k * e), bvp_.p) * moment((e - 1.0) * bvp_.p + n - 1);
        if (n > 2) sums_[1] += k * k * moment(2.0 * e + n - 3);
        sums_[2] += k * k * moment(2.0 * e + n - 1);
        const Nonlinearity& nl = bvp_.nonlinearity;
        double prim = 0.0, rhs = 0.0;
        switch (nl.kind) {
            case Nonlinearity::Kind::eigen:
                prim = k * k * moment(2.0 * e + n - 1) / 2.0;
                rhs = k * moment(e + n - 1);
                break;
            case Nonlinearity::Kind::power:
                if (k > 0.0) {
                    prim = std::pow(k, nl.exponent) * moment(e * nl.exponent + n - 1) / nl.exponent;
                    rhs = std::pow(k, nl.exponent - 1.0) * moment(e * (nl.exponent - 1.0) + n - 1);
                }
                break;
            case Nonlinearity::Kind::general:
                prim = nl.integral(c) * moment(n - 1);
                rhs = nl.value(c) * moment(n - 1);
                break;
        }
        sums_[3] += prim;
        for (std::size_t j = 0; j < tests_.size(); ++j) {
            const double phi0 = tests_[j].value(0.0);
            const double t[4] = {0.0, n > 2 ? k * phi0 * moment(e + n - 3) : 0.0, k * phi0 * moment(e + n - 1), rhs * phi0};
            for (int q = 0; q < 4; ++q) {
                sums_[4 + 8 * j + q] += t[q];
                sums_[4 + 8 * j + 4 + q] += std::abs(t[q]);
            }
        }
    }

    [[nodiscard]] EnergyValue finish() const {
        const double s = bvp_.n * constants::omega(bvp_.n);
        const double mu = bvp_.mu, lam = bvp_.lambda;
        EnergyValue e;
        e.divergent = divergent_;
        e.dirichlet = s * sums_[0];
        e.hardy = bvp_.n > 2 ? s * sums_[1] : 0.0;
        e.l2 = s * sums_[2];
        const double prim = s * sums_[3];
        switch (bvp_.nonlinearity.kind) {
            case Nonlinearity::Kind::eigen:
                e.quadratic = e.dirichlet - mu * e.hardy - lam * e.l2;
                e.nonlinear = 0.0;
                e.total = 0.5 * e.quadratic;
                break;
            case Nonlinearity::Kind::power:
                e.quadratic = e.dirichlet - mu * e.hardy + lam * e.l2;
                e.nonlinear = prim;
                e.total = 0.5 * e.quadratic - e.nonlinear;
                break;
            case Nonlinearity::Kind::general:
                e.quadratic = e.dirichlet;
                e.nonlinear = lam * prim;
                e.total = e.dirichlet / bvp_.p - e.nonlinear;
                break;
        }
        e.rayleigh = e.l2 > 0.0 ? (e.dirichlet - mu * e.hardy) / e.l2 : 0.0;
        double worst = 0.0;
        for (std::size_t j = 0; j < tests_.size(); ++j) {
            const double* t = &sums_[4 + 8 * j];
            const double* a = t + 4;
            double res = 0.0, scale = 0.0;
            switch (bvp_.nonlinearity.kind) {
                case Nonlinearity::Kind::eigen:
                    res = t[0] - mu * t[1] - lam * t[2];
                    scale = a[0] + mu * a[1] + std::abs(lam) * a[2];
                    break;
                case Nonlinearity::Kind::power:
                    res = t[0] - mu * t[1] + lam * t[2] - t[3];
                    scale = a[0] + mu * a[1] + std::abs(lam) * a[2] + a[3];
                    break;
                case Nonlinearity::Kind::general:
                    res = t[0] - lam * t[3];
                    scale = a[0] + std::abs(lam) * a[3];
                    break;
            }
            if (scale > 0.0) worst = std::max(worst, std::abs(res) / scale);
        }
        e.residual = worst;
        return e;
    }

private:
    const RadialBvp& bvp_;
    std::vector<TestProfile> tests_;
    std::vector<double> sums_;
    bool divergent_ = false;
};

// Cubic Hermite interpolation on [r0, r1].
struct Hermite {
    double r0, h, u0, u1, d0, d1;
    [[nodiscard]] double value(double r) const {
        const double t = (r - r0) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * u0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * u1 + (t3 - t2) * h * d1;
    }
    [[nodiscard]] double slope(double r) const {
        const double t = (r - r0) / h;
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * u0 + (-6 * t2 + 6 * t) * u1) / h + (3 * t2 - 4 * t + 1) * d0 + (3 * t2 - 2 * t) * d1;
    }
};

// Interpolates the regular factor y = u rho^{-e}; u = rho^e y.
struct Piece {
    Hermite y;
    double e;
    [[nodiscard]] double value(double r) const { return e == 0.0 ? y.value(r) : std::pow(r, e) * y.value(r); }
    [[nodiscard]] double slope(double r) const {
        if (e == 0.0) return y.slope(r);
        const double re = std::pow(r, e);
        return e * re / r * y.value(r) + re * y.slope(r);
    }
};

Piece piece(const RadialSolution& s, std::size_t i) {
    const double e = s.exponent;
    auto factor = [&](std::size_t j) {
        if (e == 0.0) return std::pair{s.u[j], s.du[j]};
        const double r = s.rho[j], re = std::pow(r, -e);
        return std::pair{s.u[j] * re, (s.du[j] - e * s.u[j] / r) * re};
    };
    const auto [y0, d0] = factor(i);
    const auto [y1, d1] = factor(i + 1);
    return {{s.rho[i], s.rho[i + 1] - s.rho[i], y0, y1, d0, d1}, e};
}

// ---- second-order shooting (p = 2) in y = u rho^{-e} ----

struct Shot {
    std::vector<double> y, z;
    bool crossed = false;
    std::size_t crossing = 0;  // first node with y <= 0
};

struct LinearShooter {
    const RadialBvp& bvp;
    std::vector<double> rho;
    double mb, e, sign_lambda, exponent, s;
    bool nonlinear;

    LinearShooter(const RadialBvp& b, bool eigen_sign)
        : bvp(b), rho(b.grid(b.start(), b.radius)), mb(b.mu_bar()), e(b.frobenius_exponent()),
          sign_lambda(eigen_sign ? -1.0 : 1.0),
          exponent(b.nonlinearity.kind == Nonlinearity::Kind::power ? b.nonlinearity.exponent : 0.0),
          s(exponent > 0.0 ? e * (exponent - 2.0) : 0.0), nonlinear(exponent > 0.0) {}

    // y'' + (2 mu_bar + 1) / r y' = g(r, y).
    [[nodiscard]] double forcing(double r, double y, double lambda) const {
        double g = sign_lambda * lambda * y;
        if (nonlinear && y > 0.0) g -= std::pow(r, s) * std::pow(y, exponent - 1.0);
        return g;
    }

    [[nodiscard]] Shot run(double a, double lambda, bool keep) const {
        Shot out;
        const double r0 = rho.front();
        const double c2 = sign_lambda * lambda * a / (4.0 * (1.0 + mb));
        double y = a + c2 * r0 * r0, z = 2.0 * c2 * r0;
        if (nonlinear) {
            const double cs = -std::pow(a, exponent - 1.0) / ((s + 2.0) * (s + 2.0 + 2.0 * mb));
            y += cs * std::pow(r0, s + 2.0);
            z += cs * (s + 2.0) * std::pow(r0, s + 1.0);
        }
        const double k = 2.0 * mb + 1.0;
        auto f = [&](double r, double yy, double zz) { return -k / r * zz + forcing(r, yy, lambda); };
        if (keep) {
            out.y.reserve(rho.size());
            out.z.reserve(rho.size());
            out.y.push_back(y);
            out.z.push_back(z);
        }
        for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
            const double r = rho[i], h = rho[i + 1] - rho[i];
            const double k1y = z, k1z = f(r, y, z);
            const double k2y = z + 0.5 * h * k1z, k2z = f(r + 0.5 * h, y + 0.5 * h * k1y, z + 0.5 * h * k1z);
            const double k3y = z + 0.5 * h * k2z, k3z = f(r + 0.5 * h, y + 0.5 * h * k2y, z + 0.5 * h * k2z);
            const double k4y = z + h * k3z, k4z = f(r + h, y + h * k3y, z + h * k3z);
            y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
            z += h / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z);
            if (keep) {
                out.y.push_back(y);
                out.z.push_back(z);
            }
            if (y <= 0.0 && !out.crossed) {
                out.crossed = true;
                out.crossing = i + 1;
                if (!keep) return out;
            }
        }
        return out;
    }

    [[nodiscard]] RadialSolution solution(const Shot& shot) const {
        RadialSolution sol;
        sol.rho = rho;
        sol.exponent = e;
        sol.u.resize(rho.size());
        sol.du.resize(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) {
            const double re = std::pow(rho[i], e);
            sol.u[i] = re * shot.y[i];
            sol.du[i] = e * re / rho[i] * shot.y[i] + re * shot.z[i];
        }
        sol.u.back() = 0.0;
        return sol;
    }
};

// ---- p-Laplacian shooting in (u, w), w = r^{n-1} |u'|^{p-2} u' ----

struct PShot {
    std::vector<double> rho, u, du;
    bool crossed = false;
    double zero = std::numeric_limits<double>::infinity();
};

class PShooter {
public:
    PShooter(const RadialBvp& bvp, std::function<double(double)> h) : bvp_(bvp), h_(std::move(h)) {}

    [[nodiscard]] double slope(double r, double w) const {
        if (w == 0.0) return 0.0;
        return std::copysign(std::pow(std::abs(w) / std::pow(r, bvp_.n - 1), 1.0 / (bvp_.p - 1.0)), w);
    }

    // Integrates from (r0, u0, w0) over `rho` (rho[0] = r0), stopping after the first zero.
    [[nodiscard]] PShot run(const std::vector<double>& rho, double u0, double w0, bool keep) const {
        PShot out;
        const int n = bvp_.n;
        const double lam = bvp_.lambda;
        auto fu = [&](double r, double w) { return slope(r, w); };
        auto fw = [&](double r, double u) { return -lam * std::pow(r, n - 1) * h_(u); };
        double u = u0, w = w0;
        if (keep) push(out, rho[0], u, fu(rho[0], w));
        for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
            const double r = rho[i], h = rho[i + 1] - rho[i];
            const double k1u = fu(r, w), k1w = fw(r, u);
            const double k2u = fu(r + 0.5 * h, w + 0.5 * h * k1w), k2w = fw(r + 0.5 * h, u + 0.5 * h * k1u);
            const double k3u = fu(r + 0.5 * h, w + 0.5 * h * k2w), k3w = fw(r + 0.5 * h, u + 0.5 * h * k2u);
            const double k4u = fu(r + h, w + h * k3w), k4w = fw(r + h, u + h * k3u);
            const double un = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
            const double wn = w + h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
            if (un <= 0.0) {
                out.crossed = true;
                const Hermite hp{r, h, u, un, fu(r, w), fu(r + h, wn)};
                double lo = r, hi = r + h;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (hp.value(mid) > 0.0 ? lo : hi) = mid;
                }
                out.zero = 0.5 * (lo + hi);
                if (keep) push(out, rho[i + 1], un, fu(r + h, wn));
                return out;
            }
            u = un;
            w = wn;
            if (keep) push(out, rho[i + 1], u, fu(rho[i + 1], w));
        }
        return out;
    }

    // Regular start u(0) = c.
    [[nodiscard]] PShot from_origin(double c, double to, bool keep) const {
        const double r0 = bvp_.start();
        const int n = bvp_.n;
        const double q = bvp_.p / (bvp_.p - 1.0);
        const double f = bvp_.lambda * h_(c) / n;
        const double u0 = c - (f > 0.0 ? (bvp_.p - 1.0) / bvp_.p * std::pow(f, 1.0 / (bvp_.p - 1.0)) * std::pow(r0, q) : 0.0);
        const double w0 = -f * std::pow(r0, n);
        return run(bvp_.grid(r0, to), u0, w0, keep);
    }

    // Flat top u = a on [0, core], leaving a with a - u ~ A (r - core)^{p/(p-2)}.
    [[nodiscard]] PShot from_core(double a, double core, double to, bool keep) const {
        const double p = bvp_.p;
        const double gamma = p / (p - 2.0);
        const double d = 1e-6 * a;
        const double c = h_(a - d) / d;  // h(s) ~ c (a - s) below a
        const double amp = std::pow(bvp_.lambda * c / (std::pow(gamma, p - 1.0) * (gamma - 1.0) * (p - 1.0)), 1.0 / (p - 2.0));
        const double delta = 1e-6 * bvp_.radius;
        const double r0 = std::max(core, bvp_.start()) + delta;
        const double v = amp * std::pow(delta, gamma);
        const double du = -amp * gamma * std::pow(delta, gamma - 1.0);
        const double w0 = std::pow(r0, bvp_.n - 1) * signed_power(du, p);
        PShot shot = run(lead_in(r0, to), a - v, w0, keep);
        if (keep && core > bvp_.start()) {
            RadialBvp coarse = bvp_;
            coarse.nodes = std::max(16, bvp_.nodes / 8);
            std::vector<double> flat = coarse.grid(bvp_.start(), core);
            PShot merged;
            for (double r : flat) push(merged, r, a, 0.0);
            for (std::size_t i = 0; i < shot.rho.size(); ++i) push(merged, shot.rho[i], shot.u[i], shot.du[i]);
            merged.crossed = shot.crossed;
            merged.zero = shot.zero;
            return merged;
        }
        return shot;
    }

    [[nodiscard]] bool dead_core_possible() const { return bvp_.p > 2.0; }

    // Geometric steps of ratio 1.05 away from a flat top, then the graded grid.
    [[nodiscard]] std::vector<double> lead_in(double r0, double to) const {
        const double core = r0 - 1e-6 * bvp_.radius;
        const double switch_at = core + 1e-2 * (to - core);
        std::vector<double> g;
        for (double s = r0 - core; core + s < switch_at; s *= 1.05) g.push_back(core + s);
        const std::vector<double> rest = bvp_.grid(switch_at, to);
        g.insert(g.end(), rest.begin(), rest.end());
        return g;
    }

private:
    static void push(PShot& s, double r, double u, double du) {
        s.rho.push_back(r);
        s.u.push_back(u);
        s.du.push_back(du);
    }

    const RadialBvp& bvp_;
    std::function<double(double)> h_;
};

RadialSolution to_solution(const PShot& shot) {
    RadialSolution s;
    s.rho = shot.rho;
    s.u = shot.u;
    s.du = shot.du;
    s.exponent = 0.0;
    if (!s.u.empty()) s.u.back() = 0.0;
    return s;
}

// ---- truncated energy for L-BFGS ----

class TruncatedEnergy final : public ceres::FirstOrderFunction {
public:
    TruncatedEnergy(const RadialBvp& bvp, std::vector<double> rho, double plateau, double cut)
        : bvp_(bvp), rho_(std::move(rho)), a_(plateau), cut_(cut) {
        const int n = bvp_.n;
        const std::size_t m = rho_.size() - 1;
        cell_.resize(m);
        mass_.assign(m, 0.0);
        for (std::size_t c = 0; c < m; ++c) {
            cell_[c] = (std::pow(rho_[c + 1], n) - std::pow(rho_[c], n)) / n;
            mass_[c] += 0.5 * cell_[c];
            if (c + 1 < m) mass_[c + 1] += 0.5 * cell_[c];
        }
        scale_ = n * constants::omega(n);
    }

    bool Evaluate(const double* v, double* cost, double* gradient) const override {
        const std::size_t m = cell_.size();
        const double p = bvp_.p;
        const double ap = std::pow(a_, p);
        double e = 0.0;
        if (gradient) std::fill(gradient, gradient + m, 0.0);
        for (std::size_t c = 0; c < m; ++c) {
            const double h = rho_[c + 1] - rho_[c];
            const double right = c + 1 < m ? v[c + 1] : 0.0;
            const double slope = (right - v[c]) / h;
            e += std::pow(std::abs(slope), p) / p * cell_[c];
            if (gradient) {
                const double g = signed_power(slope, p) * cell_[c] / h;
                gradient[c] -= g;
                if (c + 1 < m) gradient[c + 1] += g;
            }
        }
        const Nonlinearity& nl = bvp_.nonlinearity;
        for (std::size_t i = 0; i < m; ++i) {
            const double s = std::min(a_ * v[i], cut_);
            e -= bvp_.lambda * nl.integral(s) / ap * mass_[i];
            if (gradient && a_ * v[i] < cut_) gradient[i] -= bvp_.lambda * nl.value(s) * a_ / ap * mass_[i];
        }
        *cost = scale_ * e;
        if (gradient)
            for (std::size_t i = 0; i < m; ++i) gradient[i] *= scale_;
        return true;
    }

    [[nodiscard]] int NumParameters() const override { return static_cast<int>(cell_.size()); }

private:
    const RadialBvp& bvp_;
    std::vector<double> rho_, cell_, mass_;
    double a_, cut_, scale_ = 1.0;
};

template <class F>
double bisect(F&& positive_side, double lo, double hi, int iterations = 200) {
    for (int it = 0; it < iterations && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (positive_side(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

// ---------------------------------------------------------------------------

Nonlinearity Nonlinearity::eigen() { return {}; }

Nonlinearity Nonlinearity::power(double q) {
    if (!(q > 1.0)) throw DomainError("power nonlinearity needs q > 1");
    Nonlinearity nl;
    nl.kind = Kind::power;
    nl.exponent = q;
    nl.name = "power";
    return nl;
}

Nonlinearity Nonlinearity::general(std::function<double(double)> h, std::function<double(double)> primitive,
                                   std::string name, std::vector<std::pair<double, double>> plateaus) {
    Nonlinearity nl;
    nl.kind = Kind::general;
    nl.h = std::move(h);
    nl.primitive = std::move(primitive);
    nl.name = std::move(name);
    nl.plateaus = std::move(plateaus);
    return nl;
}

Nonlinearity Nonlinearity::oscillatory(double p, int levels) {
    if (!(p > 1.0) || levels < 1) throw DomainError("oscillatory nonlinearity needs p > 1 and levels >= 1");
    auto osc = std::make_shared<Oscillatory>();
    osc->p = p;
    osc->a = {0.0};
    osc->b = {0.0};
    std::vector<std::pair<double, double>> plateaus;
    for (int k = 1; k <= levels; ++k) {
        osc->a.push_back(std::ldexp(1.0, k * k));
        osc->b.push_back(std::ldexp(1.0, k * k + k));
        plateaus.emplace_back(osc->a.back(), osc->b.back());
    }
    Nonlinearity nl = general([osc](double s) { return osc->value(s); }, [osc](double s) { return osc->primitive(s); },
                              "oscillatory", std::move(plateaus));
    nl.exponent = p;
    return nl;
}

double Nonlinearity::value(double s) const {
    switch (kind) {
        case Kind::eigen: return s;
        case Kind::power: return positive_power(s, exponent - 1.0);
        case Kind::general: return h ? h(s) : 0.0;
    }
    return 0.0;
}

double Nonlinearity::integral(double s) const {
    switch (kind) {
        case Kind::eigen: return 0.5 * s * s;
        case Kind::power: return positive_power(s, exponent) / exponent;
        case Kind::general: return primitive ? primitive(s) : 0.0;
    }
    return 0.0;
}

nlohmann::json Nonlinearity::descriptor() const {
    nlohmann::json d{{"kind", name}};
    if (kind == Kind::power) d["q"] = exponent;
    if (!plateaus.empty()) {
        nlohmann::json pl = nlohmann::json::array();
        for (const auto& [a, b] : plateaus) pl.push_back({a, b});
        d["plateaus"] = pl;
    }
    return d;
}

void RadialBvp::validate() const {
    if (n < 2) throw DomainError("pde: n must be >= 2");
    if (!(radius > 0.0)) throw DomainError("pde: radius must be positive");
    if (nodes < 16 || nodes % 2 != 0) throw DomainError("pde: nodes must be even and >= 16");
    if (mu < 0.0) throw DomainError("pde: mu must be >= 0");
    if (n == 2 && mu != 0.0) throw DomainError("pde: mu must be 0 when n = 2");
    if (mu > constants::mu_max(n, 1.0)) throw DomainError("pde: mu beyond (n - 2)^2 / 4");
    if (nonlinearity.kind == Nonlinearity::Kind::general) {
        if (!(p > 1.0)) throw DomainError("pde: operator exponent must exceed 1");
        if (mu != 0.0) throw DomainError("pde: the p-Laplacian problem has no Hardy term");
    } else {
        if (p != 2.0) throw DomainError("pde: eigen and power problems use p = 2");
    }
    if (nonlinearity.kind == Nonlinearity::Kind::power) {
        const double q = nonlinearity.exponent;
        if (!(q > 2.0)) throw DomainError("pde: power exponent must exceed 2");
        if (n > 2 && !(q < 2.0 * n / (n - 2.0))) throw DomainError("pde: power exponent must be below 2n / (n - 2)");
        if (mu >= constants::mu_max(n, 1.0) && n > 2) throw DomainError("pde: mu must be below (n - 2)^2 / 4");
    }
}

double RadialBvp::mu_bar() const {
    const double m = 0.25 * (n - 2) * (n - 2) - mu;
    return std::sqrt(std::max(0.0, m));
}

double RadialBvp::frobenius_exponent() const { return -0.5 * (n - 2) + mu_bar(); }

std::vector<double> RadialBvp::grid(double a, double b) const {
    std::vector<double> g(static_cast<std::size_t>(nodes) + 1);
    for (int i = 0; i <= nodes; ++i) g[i] = a + (b - a) * smoothstep(static_cast<double>(i) / nodes);
    g.front() = a;
    g.back() = b;
    return g;
}

nlohmann::json RadialBvp::descriptor() const {
    return {{"n", n},         {"R", radius}, {"mu", mu}, {"lambda", lambda}, {"p", p},
            {"nonlinearity", nonlinearity.descriptor()}, {"nodes", nodes}};
}

double RadialSolution::sup() const { return u.empty() ? 0.0 : *std::max_element(u.begin(), u.end()); }
double RadialSolution::min() const { return u.empty() ? 0.0 : *std::min_element(u.begin(), u.end()); }

double RadialSolution::operator()(double r) const {
    if (rho.empty() || r >= rho.back()) return 0.0;
    if (r <= rho.front()) return u.front() * (exponent == 0.0 ? 1.0 : std::pow(r / rho.front(), exponent));
    const auto it = std::upper_bound(rho.begin(), rho.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - rho.begin()) - 1;
    return piece(*this, i).value(r);
}

RadialSolution RadialSolution::from_profile(const Profile& g, const RadialBvp& bvp) {
    RadialSolution s;
    const bool singular = g.value_power_at_zero < 0.0;
    s.rho = bvp.grid(singular ? bvp.start() : 0.0, bvp.radius);
    s.exponent = singular ? g.value_power_at_zero : 0.0;
    for (double r : s.rho) {
        s.u.push_back(g(r));
        s.du.push_back(r == 0.0 ? 0.0 : g.slope(r));
    }
    s.u.back() = 0.0;
    return s;
}

std::string RadialSolution::to_csv() const {
    std::ostringstream out;
    out << "rho,u,du\n";
    for (std::size_t i = 0; i < rho.size(); ++i)
        out << format_double(rho[i]) << ',' << format_double(u[i]) << ',' << format_double(du[i]) << '\n';
    return out.str();
}

nlohmann::json EnergyValue::to_json() const {
    return {{"total", total},   {"quadratic", quadratic}, {"nonlinear", nonlinear}, {"dirichlet", dirichlet},
            {"hardy", hardy},   {"l2", l2},               {"rayleigh", rayleigh},   {"residual", residual},
            {"divergent", divergent}};
}

EnergyValue radial_energy(const RadialSolution& u, const RadialBvp& bvp, int tests, std::uint64_t seed) {
    if (u.rho.size() < 2) throw DomainError("radial_energy: empty profile");
    Accumulator acc(bvp, test_profiles(tests, bvp.radius, seed));
    const auto xg = gauss_nodes();
    const auto wg = gauss_weights();
    for (std::size_t i = 0; i + 1 < u.rho.size(); ++i) {
        const Piece pc = piece(u, i);
        const double r0 = pc.y.r0, h = pc.y.h;
        for (int k = 0; k < 5; ++k) {
            const double r = r0 + 0.5 * h * (1.0 + xg[k]);
            acc.add(r, pc.value(r), pc.slope(r), 0.5 * h * wg[k]);
        }
    }
    acc.add_tail(u.rho.front(), u.u.front(), u.exponent);
    return acc.finish();
}

EnergyValue radial_energy(const Profile& g, const RadialBvp& bvp, int tests, std::uint64_t seed) {
    Accumulator acc(bvp, test_profiles(tests, bvp.radius, seed));
    const auto xg = gauss_nodes();
    const auto wg = gauss_weights();
    std::vector<double> pts;
    for (double r : g.pieces())
        if (r < bvp.radius) pts.push_back(r);
    pts.push_back(std::min(bvp.radius, g.support));
    const int sub = std::max(64, bvp.nodes / static_cast<int>(pts.size()));
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double a = pts[j], b = pts[j + 1];
        if (!(b > a)) continue;
        // graded at both ends of the piece; stronger at a singular origin
        const double k = (a == 0.0 && g.value_power_at_zero < 0.0) ? 6.0 : 2.0;
        auto map = [&](double t) {
            const double x = t < 0.5 ? 0.5 * std::pow(2.0 * t, k) : 1.0 - 0.5 * std::pow(2.0 * (1.0 - t), k);
            return a + (b - a) * x;
        };
        for (int i = 0; i < sub; ++i) {
            const double r0 = map(static_cast<double>(i) / sub), r1 = map(static_cast<double>(i + 1) / sub);
            const double h = r1 - r0;
            for (int q = 0; q < 5; ++q) {
                const double r = r0 + 0.5 * h * (1.0 + xg[q]);
                acc.add(r, g(r), g.slope(r), 0.5 * h * wg[q]);
            }
        }
    }
    return acc.finish();
}

nlohmann::json Eigenpair::to_json() const {
    return {{"lambda_1", lambda},     {"closed_form", closed_form}, {"mu_bar", mu_bar},
            {"error", std::abs(lambda - closed_form)}, {"iterations", iterations}, {"energy", energy.to_json()}};
}

Eigenpair first_eigenvalue(const RadialBvp& bvp_in) {
    RadialBvp bvp = bvp_in;
    bvp.nonlinearity = Nonlinearity::eigen();
    bvp.p = 2.0;
    bvp.validate();
    const LinearShooter shooter(bvp, true);
    auto crosses = [&](double lam) { return shooter.run(1.0, lam, false).crossed; };
    double lo = 0.0, hi = 1.0 / (bvp.radius * bvp.radius);
    int expansions = 0;
    while (!crosses(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 200) throw NumericalError("first_eigenvalue: no bracket for lambda_1", hi);
    }
    int iterations = 0;
    const double lam = bisect(
        [&](double l) {
            ++iterations;
            return !crosses(l);
        },
        lo, hi);
    Eigenpair out;
    out.lambda = lam;
    out.iterations = iterations;
    const auto c = constants::bpv(bvp.mu, bvp.n, 1.0, constants::omega(bvp.n) * std::pow(bvp.radius, bvp.n));
    out.closed_form = c.value;
    out.mu_bar = c.mu_bar;
    out.profile = shooter.solution(shooter.run(1.0, lam, true));
    bvp.lambda = lam;
    out.energy = radial_energy(out.profile, bvp);
    return out;
}

nlohmann::json MountainPass::to_json() const {
    return {{"height", height},         {"energy_level", energy_level}, {"min_value", min_value},
            {"residual", energy.residual}, {"iterations", iterations},  {"energy", energy.to_json()}};
}

MountainPass mountain_pass_solve(const RadialBvp& bvp) {
    bvp.validate();
    const LinearShooter shooter(bvp, false);
    auto crosses = [&](double a) { return shooter.run(a, bvp.lambda, false).crossed; };
    double lo = 1.0, hi = 1.0;
    int steps = 0;
    while (crosses(lo)) {
        lo *= 0.5;
        if (++steps > 60)
            throw NumericalError("mountain_pass_solve: no solution found in bracket (first zero before R for every height down to " +
                                 format_double(lo) + ")");
    }
    hi = 2.0 * lo;
    steps = 0;
    while (!crosses(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++steps > 120)
            throw NumericalError("mountain_pass_solve: no solution found in bracket (no zero in (0, R] for heights up to " +
                                 format_double(hi) + ")");
    }
    int iterations = 0;
    const double a = bisect(
        [&](double x) {
            ++iterations;
            return !crosses(x);
        },
        lo, hi);
    MountainPass out;
    out.height = a;
    out.iterations = iterations;
    out.profile = shooter.solution(shooter.run(a, bvp.lambda, true));
    out.energy = radial_energy(out.profile, bvp);
    out.energy_level = out.energy.total;
    out.min_value = out.profile.min();
    return out;
}

double coercivity_constant(int n, double mu, double lambda, double radius) {
    const auto c = constants::bpv(mu, n, 1.0, constants::omega(n) * std::pow(radius, n));
    const double base = std::min(1.0, 1.0 + lambda / c.value);
    if (n == 2) return base;
    return 4.0 / ((n - 2.0) * (n - 2.0)) * c.mu_bar * c.mu_bar * base;
}

nlohmann::json CoercivityCheck::to_json() const {
    return {{"constant", constant}, {"worst_ratio", worst_ratio}, {"cases", cases}, {"pass", pass}};
}

CoercivityCheck coercivity_check(const RadialBvp& bvp_in, int cases, std::uint64_t seed) {
    RadialBvp bvp = bvp_in;
    bvp.nonlinearity = Nonlinearity::power(bvp.n == 2 ? 4.0 : 0.5 * (2.0 + 2.0 * bvp.n / (bvp.n - 2.0)));
    bvp.validate();
    CoercivityCheck out;
    out.constant = coercivity_constant(bvp.n, bvp.mu, bvp.lambda, bvp.radius);
    out.cases = cases;
    out.worst_ratio = std::numeric_limits<double>::infinity();
    profiles::RandomSpec spec;
    spec.max_support = bvp.radius;
    for (int i = 0; i < cases; ++i) {
        const Profile g = profiles::random_profile(kernels::block_seed(seed, static_cast<std::uint64_t>(i)), spec);
        const EnergyValue e = radial_energy(g, bvp, 0);
        if (e.dirichlet > 0.0) out.worst_ratio = std::min(out.worst_ratio, e.quadratic / e.dirichlet);
    }
    out.pass = out.worst_ratio >= out.constant * (1.0 - 1e-9);
    return out;
}

nlohmann::json CriticalProfile::to_json() const {
    return {{"level", level},
            {"plateau", plateau},
            {"truncation", truncation},
            {"sup", sup},
            {"energy", energy},
            {"residual", residual},
            {"minimizer_sup", minimizer_sup},
            {"polish_distance", polish_distance},
            {"core_radius", core_radius},
            {"iterations", iterations},
            {"zero", zero}};
}

nlohmann::json MultiplicityResult::to_json() const {
    nlohmann::json d{{"count", profiles.size()}};
    d["profiles"] = nlohmann::json::array();
    for (const auto& p : profiles) d["profiles"].push_back(p.to_json());
    d["rejected"] = nlohmann::json::array();
    for (const auto& p : rejected) d["rejected"].push_back(p.to_json());
    d["warnings"] = warnings;
    return d;
}

MultiplicityResult multiplicity_explore(const RadialBvp& bvp, const MultiplicityOptions& opts) {
    bvp.validate();
    if (bvp.nonlinearity.kind != Nonlinearity::Kind::general)
        throw DomainError("multiplicity_explore: needs a general nonlinearity");
    const Nonlinearity& nl = bvp.nonlinearity;
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<std::pair<double, double>> levels;
    if (nl.plateaus.empty()) {
        levels.emplace_back(1.0, inf);
    } else {
        if (static_cast<int>(nl.plateaus.size()) < opts.k_max)
            throw DomainError("multiplicity_explore: fewer plateaus than k_max");
        levels.assign(nl.plateaus.begin(), nl.plateaus.begin() + opts.k_max);
    }

    RadialBvp coarse = bvp;
    coarse.nodes = opts.minimizer_nodes;
    const std::vector<double> mesh = coarse.grid(0.0, bvp.radius);

    MultiplicityResult out;
    const PShooter shooter(bvp, [&nl](double s) { return nl.value(s); });
    bool zero_found = false;
    for (std::size_t idx = 0; idx < levels.size(); ++idx) {
        const auto [a, b] = levels[idx];
        CriticalProfile cp;
        cp.level = nl.plateaus.empty() ? 0 : static_cast<int>(idx) + 1;
        cp.plateau = a;
        cp.truncation = b;

        const std::size_t m = mesh.size() - 1;
        std::vector<double> v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = std::min(1.0, 2.0 * (1.0 - mesh[i] / bvp.radius));
        ceres::GradientProblem problem(new TruncatedEnergy(bvp, mesh, a, b));
        ceres::GradientProblemSolver::Options so;
        so.line_search_direction_type = ceres::LBFGS;
        so.max_num_iterations = opts.max_iterations;
        so.function_tolerance = 1e-15;
        so.gradient_tolerance = 1e-12;
        so.parameter_tolerance = 1e-14;
        so.logging_type = ceres::SILENT;
        so.minimizer_progress_to_stdout = false;
        ceres::GradientProblemSolver::Summary summary;
        ceres::Solve(so, problem, v.data(), &summary);
        cp.iterations = static_cast<int>(summary.iterations.size());
        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, x);
        cp.minimizer_sup = a * vmax;

        if (cp.minimizer_sup < 1e-8 * a) {
            cp.zero = true;
            cp.profile.rho = {0.0, bvp.radius};
            cp.profile.u = {0.0, 0.0};
            cp.profile.du = {0.0, 0.0};
            if (!zero_found) {
                zero_found = true;
                out.profiles.push_back(cp);
            }
            continue;
        }

        // Polish: flat top at a, else regular shooting near the minimizer height.
        const double R = bvp.radius;
        auto reach = [&](const PShot& s) { return s.crossed ? s.zero : inf; };
        std::optional<PShot> polished;
        const bool flat_top = vmax > 1.0 - 2e-3;
        if (flat_top && shooter.dead_core_possible() && reach(shooter.from_core(a, 0.0, 4.0 * R, false)) <= R) {
            auto f = [&](double core) { return reach(shooter.from_core(a, core, 4.0 * R, false)) <= R; };
            const double core = bisect(f, 0.0, R);
            cp.core_radius = core;
            polished = shooter.from_core(a, core, R, true);
        } else {
            const double lo_h = idx == 0 || nl.plateaus.empty() ? 0.0 : levels[idx - 1].second;
            const double hi_h = std::isfinite(b) ? a : 4.0 * cp.minimizer_sup;
            const int scan = 64;
            double best = inf;
            for (int i = 0; i < scan; ++i) {
                const double c0 = lo_h + (hi_h - lo_h) * (i + 0.5) / (scan + 1);
                const double c1 = lo_h + (hi_h - lo_h) * (i + 1.5) / (scan + 1);
                const bool s0 = reach(shooter.from_origin(c0, 4.0 * R, false)) <= R;
                const bool s1 = reach(shooter.from_origin(c1, 4.0 * R, false)) <= R;
                if (s0 == s1) continue;
                const double root = bisect([&](double c) { return (reach(shooter.from_origin(c, 4.0 * R, false)) <= R) == s0; },
                                           c0, c1);
                if (std::abs(root - cp.minimizer_sup) < std::abs(best - cp.minimizer_sup)) best = root;
            }
            if (std::isfinite(best)) polished = shooter.from_origin(best, R, true);
        }

        if (!polished) {
            out.rejected.push_back(cp);
            out.warnings.push_back("level " + std::to_string(cp.level) + ": minimizer could not be polished by shooting");
            continue;
        }
        cp.profile = to_solution(*polished);
        cp.sup = cp.profile.sup();
        double dist = 0.0;
        for (std::size_t i = 0; i < m; ++i) dist = std::max(dist, std::abs(cp.profile(mesh[i]) - a * v[i]) / a);
        cp.polish_distance = dist;
        const EnergyValue e = radial_energy(cp.profile, bvp);
        cp.energy = e.total;
        cp.residual = e.residual;
        const bool increasing = out.profiles.empty() || out.profiles.back().zero ||
                                cp.sup > out.profiles.back().sup * (1.0 + 1e-6);
        if (cp.residual < 1e-6 && cp.polish_distance < 0.05 && increasing && cp.sup <= a * (1.0 + 1e-9)) {
            out.profiles.push_back(cp);
        } else {
            out.rejected.push_back(cp);
        }
    }
    int nonzero = 0;
    for (const auto& p : out.profiles) nonzero += p.zero ? 0 : 1;
    if (nonzero < 2) out.warnings.push_back("fewer than two distinct nonzero critical profiles found");
    return out;
}

RadialBvp bvp_from_descriptor(const nlohmann::json& d) {
    if (!d.is_object()) throw ConfigError("pde descriptor must be an object");
    static const std::vector<std::string> keys = {"n", "R", "mu", "lambda", "p", "nonlinearity", "q", "nodes", "levels"};
    for (const auto& [k, _] : d.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("pde descriptor: unknown key '" + k + "'");
    RadialBvp bvp;
    try {
        bvp.n = d.value("n", 2);
        bvp.radius = d.value("R", 1.0);
        bvp.mu = d.value("mu", 0.0);
        bvp.lambda = d.value("lambda", 0.0);
        bvp.nodes = d.value("nodes", 4096);
        const std::string kind = d.value("nonlinearity", std::string("eigen"));
        if (kind == "eigen") {
            bvp.nonlinearity = Nonlinearity::eigen();
        } else if (kind == "power") {
            if (!d.contains("q")) throw ConfigError("pde descriptor: power nonlinearity needs 'q'");
            bvp.nonlinearity = Nonlinearity::power(d.at("q").get<double>());
        } else if (kind == "oscillatory") {
            bvp.p = d.value("p", 4.0);
            bvp.nonlinearity = Nonlinearity::oscillatory(bvp.p, d.value("levels", 6));
        } else if (kind == "zero") {
            bvp.p = d.value("p", 4.0);
            bvp.nonlinearity = Nonlinearity::general([](double) { return 0.0; }, [](double) { return 0.0; }, "zero");
        } else {
            throw ConfigError("pde descriptor: unknown nonlinearity '" + kind + "'");
        }
        if (d.contains("p") && bvp.nonlinearity.kind != Nonlinearity::Kind::general) bvp.p = d.at("p").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("pde descriptor: ") + e.what());
    }
    return bvp;
}

}  // namespace finsler::pde
