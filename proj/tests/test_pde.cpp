#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/pde.hpp"
#include "finsler/profiles.hpp"
#include "finsler/special.hpp"

using namespace finsler;
using namespace finsler::pde;

namespace {

constexpr double kPi = std::numbers::pi;

RadialBvp eigen_bvp(int n, double radius, double mu) {
    RadialBvp b;
    b.n = n;
    b.radius = radius;
    b.mu = mu;
    return b;
}

RadialBvp power_bvp(int n, double radius, double mu, double lambda, double q) {
    RadialBvp b = eigen_bvp(n, radius, mu);
    b.lambda = lambda;
    b.nonlinearity = Nonlinearity::power(q);
    return b;
}

// Independent oracle for -(r^2 u')' = r^2 u^2 on (0, 1), u'(0) = 0, u(1) = 0:
// second-order finite differences on a uniform grid, Newton with a tridiagonal
// solve. Returns u(0) and the energy level 4 pi (1/2 - 1/3) int u'^2 r^2.
std::pair<double, double> lane_emden_fd(int cells) {
    const double h = 1.0 / cells;
    std::vector<double> u(cells + 1);
    for (int i = 0; i <= cells; ++i) u[i] = 19.0 * (1.0 - (i * h) * (i * h));
    for (int it = 0; it < 60; ++it) {
        std::vector<double> a(cells), b(cells), c(cells), f(cells);
        b[0] = 6.0 / (h * h) - 2.0 * u[0];
        c[0] = -6.0 / (h * h);
        f[0] = -(6.0 * (u[0] - u[1]) / (h * h) - u[0] * u[0]);
        for (int i = 1; i < cells; ++i) {
            const double r = i * h, rp = (r + h / 2) * (r + h / 2), rm = (r - h / 2) * (r - h / 2);
            a[i] = -rm / (h * h);
            c[i] = -rp / (h * h);
            b[i] = (rp + rm) / (h * h) - 2.0 * r * r * u[i];
            f[i] = (rp * (u[i + 1] - u[i]) - rm * (u[i] - u[i - 1])) / (h * h) + r * r * u[i] * u[i];
        }
        for (int i = 1; i < cells; ++i) {
            const double m = a[i] / b[i - 1];
            b[i] -= m * c[i - 1];
            f[i] -= m * f[i - 1];
        }
        std::vector<double> d(cells);
        d[cells - 1] = f[cells - 1] / b[cells - 1];
        for (int i = cells - 2; i >= 0; --i) d[i] = (f[i] - c[i] * d[i + 1]) / b[i];
        double step = 0.0;
        for (int i = 0; i < cells; ++i) {
            u[i] += d[i];
            step = std::max(step, std::abs(d[i]));
        }
        if (step < 1e-12) break;
    }
    double k = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double r = (i + 0.5) * h, du = (u[i + 1] - u[i]) / h;
        k += du * du * r * r * h;
    }
    return {u[0], 4.0 * kPi * k / 6.0};
}

}  // namespace

TEST(Eigen, ClosedForms) {
    const double j0 = special::bessel_first_zero(0.0);
    EXPECT_NEAR(first_eigenvalue(eigen_bvp(2, 1.0, 0.0)).lambda, 5.783186, 1e-6);
    EXPECT_NEAR(first_eigenvalue(eigen_bvp(2, 1.0, 0.0)).lambda, j0 * j0, 1e-9);
    EXPECT_NEAR(first_eigenvalue(eigen_bvp(3, 1.0, 0.0)).lambda, kPi * kPi, 1e-9);
    const double jm = special::bessel_first_zero(std::sqrt(0.5));
    const Eigenpair e = first_eigenvalue(eigen_bvp(4, 2.0, 0.5));
    EXPECT_NEAR(e.lambda, jm * jm / 4.0, 1e-9);
    EXPECT_NEAR(e.closed_form, jm * jm / 4.0, 1e-12);
    EXPECT_NEAR(e.mu_bar, std::sqrt(0.5), 1e-15);
}

TEST(Eigen, GridAgainstBessel) {
    for (int n : {2, 3, 4})
        for (double r : {0.5, 1.0, 3.0})
            for (double frac : {0.0, 0.3, 0.8}) {
                const double mu = n == 2 ? 0.0 : frac * (n - 2.0) * (n - 2.0) / 4.0;
                const Eigenpair e = first_eigenvalue(eigen_bvp(n, r, mu));
                const double j = special::bessel_first_zero(e.mu_bar);
                EXPECT_LT(std::abs(e.lambda * r * r - j * j), 1e-4) << n << ' ' << r << ' ' << mu;
                EXPECT_GE(e.energy.rayleigh, e.closed_form - 1e-6);
                EXPECT_NEAR(e.energy.rayleigh, e.closed_form, 1e-4 * e.closed_form);
            }
}

TEST(Energy, BesselRayleighQuotient) {
    const double j0 = special::bessel_first_zero(0.0);
    RadialBvp b = eigen_bvp(2, 1.0, 0.0);
    b.lambda = j0 * j0;
    const EnergyValue v = radial_energy(profiles::bessel_eigen(2, 0.0), b);
    EXPECT_NEAR(v.rayleigh, j0 * j0, 1e-4);
    EXPECT_LT(v.residual, 1e-6);
}

TEST(Energy, ConeClosedForm) {
    // n = 2: int |u'|^2 = 2 pi int rho = pi, int u^2 = 2 pi int (1 - rho)^2 rho = pi / 6.
    const EnergyValue v = radial_energy(profiles::cone(), eigen_bvp(2, 1.0, 0.0));
    EXPECT_NEAR(v.dirichlet, kPi, 1e-10);
    EXPECT_NEAR(v.l2, kPi / 6.0, 1e-10);
    EXPECT_NEAR(v.rayleigh, 6.0, 1e-9);
}

TEST(Energy, ZeroProfile) {
    RadialSolution zero;
    zero.rho = {1e-6, 0.5, 1.0};
    zero.u = {0.0, 0.0, 0.0};
    zero.du = {0.0, 0.0, 0.0};
    const EnergyValue v = radial_energy(zero, power_bvp(3, 1.0, 0.0, 0.0, 3.0));
    EXPECT_EQ(v.total, 0.0);
    EXPECT_EQ(v.dirichlet, 0.0);
    EXPECT_EQ(v.nonlinear, 0.0);
    EXPECT_EQ(v.l2, 0.0);
}

TEST(MountainPass, AgainstCollocation) {
    const double frozen_height = 18.94751725, frozen_level = 230.6863628;
    const auto [u1, e1] = lane_emden_fd(2000);
    const auto [u2, e2] = lane_emden_fd(4000);
    EXPECT_NEAR((4.0 * u2 - u1) / 3.0, frozen_height, 1e-5 * frozen_height);
    EXPECT_NEAR((4.0 * e2 - e1) / 3.0, frozen_level, 1e-6 * frozen_level);

    const MountainPass mp = mountain_pass_solve(power_bvp(3, 1.0, 0.0, 0.0, 3.0));
    EXPECT_NEAR(mp.height, frozen_height, 1e-7 * frozen_height);
    EXPECT_NEAR(mp.energy_level, frozen_level, 1e-7 * frozen_level);
    EXPECT_LT(mp.energy.residual, 1e-6);
    EXPECT_GE(mp.min_value, -1e-10);
}

TEST(MountainPass, ParameterSets) {
    const std::vector<RadialBvp> sets = {power_bvp(2, 1.0, 0.0, 1.0, 4.0), power_bvp(3, 1.0, 0.1, 0.0, 4.0),
                                         power_bvp(4, 2.0, 0.5, -1.0, 3.0), power_bvp(3, 2.0, 0.2, 2.0, 5.0)};
    for (const RadialBvp& b : sets) {
        const MountainPass mp = mountain_pass_solve(b);
        EXPECT_LT(mp.energy.residual, 1e-6);
        EXPECT_GE(mp.min_value, -1e-10);
        EXPECT_GT(mp.energy_level, 0.0);
        EXPECT_NEAR(mp.profile.u.back(), 0.0, 1e-12);
        EXPECT_TRUE(coercivity_check(b, 30).pass);
    }
}

TEST(MountainPass, BracketFailures) {
    // Linear problem with lambda <= -lambda_1: the first zero does not move with the height.
    RadialBvp lin = eigen_bvp(2, 1.0, 0.0);
    lin.lambda = -6.0;
    EXPECT_THROW(mountain_pass_solve(lin), NumericalError);
    EXPECT_THROW(mountain_pass_solve(power_bvp(2, 1.0, 0.0, -50.0, 4.0)), NumericalError);
}

TEST(Coercivity, Constant) {
    EXPECT_DOUBLE_EQ(coercivity_constant(2, 0.0, 1.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(coercivity_constant(3, 0.0, 0.0, 1.0), 1.0);
    const double j0 = special::bessel_first_zero(0.0);
    EXPECT_NEAR(coercivity_constant(2, 0.0, -2.0, 1.0), 1.0 - 2.0 / (j0 * j0), 1e-12);
    // n = 4, mu = 0.5: (4 / 4) (1 - 0.5) = 0.5.
    EXPECT_NEAR(coercivity_constant(4, 0.5, 0.0, 1.0), 0.5, 1e-12);
}

TEST(Oscillatory, Hypotheses) {
    const double p = 4.0;
    const Nonlinearity h = Nonlinearity::oscillatory(p, 4);
    ASSERT_GE(h.plateaus.size(), 3u);
    for (const auto& [a, b] : h.plateaus) {
        EXPECT_NEAR(h.integral(a), std::pow(a, p), 1e-9 * std::pow(a, p));
        for (double t : {0.0, 0.3, 0.7, 1.0}) EXPECT_LE(std::abs(h.value(a + t * (b - a))), 1e-9 * std::pow(b, p - 1.0));
        EXPECT_GT(b / a, 1.0);
    }
    for (double s = 0.0; s < 2000.0; s = s * 1.07 + 0.01) {
        EXPECT_GE(h.integral(s), 0.0);
        if (s >= h.plateaus.front().first) {
            EXPECT_GE(h.integral(s), std::pow(h.plateaus.front().first, p) - 1e-9);
            EXPECT_LE(h.integral(s), (1.0 + p) * std::pow(s, p) * (1.0 + 1e-12));
        }
    }
}

TEST(Multiplicity, TrivialCases) {
    RadialBvp zero;
    zero.p = 4.0;
    zero.lambda = 100.0;
    zero.nonlinearity = Nonlinearity::general([](double) { return 0.0; }, [](double) { return 0.0; }, "zero");
    const MultiplicityResult r0 = multiplicity_explore(zero);
    for (const auto& c : r0.profiles) EXPECT_TRUE(c.zero);
    EXPECT_FALSE(r0.warnings.empty());

    RadialBvp off = zero;
    off.lambda = 0.0;
    off.nonlinearity = Nonlinearity::oscillatory(4.0);
    const MultiplicityResult r1 = multiplicity_explore(off);
    for (const auto& c : r1.profiles) EXPECT_TRUE(c.zero);
}

TEST(Multiplicity, ShippedOscillatory) {
    RadialBvp b;
    b.p = 4.0;
    b.lambda = 100.0;
    b.nonlinearity = Nonlinearity::oscillatory(4.0);
    const MultiplicityResult r = multiplicity_explore(b);
    std::vector<double> sups;
    for (const auto& c : r.profiles) {
        if (c.zero) continue;
        EXPECT_LT(c.residual, 1e-6);
        EXPECT_LE(c.sup, c.plateau * (1.0 + 1e-9));
        sups.push_back(c.sup);
    }
    ASSERT_GE(sups.size(), 3u);
    for (std::size_t i = 1; i < sups.size(); ++i) EXPECT_GT(sups[i], sups[i - 1]);
}

TEST(Bvp, DescriptorsAndValidation) {
    const RadialBvp b = bvp_from_descriptor({{"n", 3}, {"R", 2.0}, {"nonlinearity", "power"}, {"q", 4.0}});
    EXPECT_EQ(b.n, 3);
    EXPECT_EQ(b.nonlinearity.kind, Nonlinearity::Kind::power);
    EXPECT_THROW(bvp_from_descriptor({{"n", 3}, {"colour", 1}}), ConfigError);
    EXPECT_THROW(bvp_from_descriptor({{"nonlinearity", "power"}}), ConfigError);
    EXPECT_THROW(eigen_bvp(2, 1.0, 0.1).validate(), DomainError);
    EXPECT_THROW(eigen_bvp(3, 1.0, 0.3).validate(), DomainError);
    const Eigenpair e = first_eigenvalue(eigen_bvp(2, 1.0, 0.0));
    const std::string csv = e.profile.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "rho,u,du");
}
