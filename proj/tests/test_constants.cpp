#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <numbers>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/kernels.hpp"
#include "finsler/profiles.hpp"
#include "finsler/special.hpp"

using namespace finsler;
using mp = boost::multiprecision::cpp_dec_float_50;

namespace {

constexpr double kPi = std::numbers::pi;

mp omega50(int n) {
    const mp h = mp(n) / 2;
    return pow(boost::math::constants::pi<mp>(), h) / boost::math::tgamma(h + 1);
}

mp talenti_support50(int p, int n) {
    const mp P = p, N = n;
    return pow(N, -1 / P) * pow(omega50(n), -1 / N) * pow((P - 1) / (P - N), (P - 1) / P);
}

mp talenti_l1_50(int p, int n) {
    const mp P = p, N = n, pc = P / (P - 1);
    const mp a = (1 - N) * pc / N + 1, b = pc + 1;
    const mp B = boost::math::tgamma(a) * boost::math::tgamma(b) / boost::math::tgamma(a + b);
    return pow(N * pow(omega50(n), 1 / N), -N * pc / (N + pc)) * (1 / N + 1 / pc) *
           pow(1 / N - 1 / P, ((N - 1) * pc - N) / (N + pc)) * pow(B, N / (N + pc));
}

// Ascending series for J_nu in long double and bisection for its first zero.
long double series_j(long double nu, long double x) {
    long double term = std::pow(x / 2.0L, nu) / std::tgamma(nu + 1.0L), sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -(x * x) / (4.0L * k * (k + nu));
        sum += term;
    }
    return sum;
}

double series_zero(double nu, long double a, long double b) {
    const bool neg = series_j(nu, a) < 0;
    for (int i = 0; i < 200; ++i) {
        const long double m = 0.5L * (a + b);
        if ((series_j(nu, m) < 0) == neg)
            a = m;
        else
            b = m;
    }
    return static_cast<double>(0.5L * (a + b));
}

}  // namespace

TEST(Omega, SmallDimensions) {
    EXPECT_NEAR(constants::omega(2), kPi, 1e-15);
    EXPECT_NEAR(constants::omega(3), 4.0 * kPi / 3.0, 1e-15);
    EXPECT_NEAR(constants::omega(4), kPi * kPi / 2.0, 1e-14);
    for (int n = 1; n <= 10; ++n) EXPECT_NEAR(constants::omega(n), static_cast<double>(omega50(n)), 1e-14);
}

TEST(Morrey, TalentiSupportAgainstHighPrecision) {
    const double frozen42 = 0.64303706857874378;
    EXPECT_NEAR(static_cast<double>(talenti_support50(4, 2)), frozen42, 1e-16);
    EXPECT_NEAR(constants::talenti_support(4.0, 2), frozen42, 1e-14);
    EXPECT_NEAR(constants::talenti_support(5.0, 3), static_cast<double>(talenti_support50(5, 3)), 1e-14);
    EXPECT_NEAR(constants::talenti_support(7.0, 4), static_cast<double>(talenti_support50(7, 4)), 1e-14);
}

TEST(Morrey, TalentiL1AgainstHighPrecision) {
    const double frozen42 = 0.94066603838457796;
    EXPECT_NEAR(static_cast<double>(talenti_l1_50(4, 2)), frozen42, 1e-16);
    EXPECT_NEAR(constants::talenti_l1(4.0, 2), frozen42, 1e-13);
    EXPECT_NEAR(constants::talenti_l1(5.0, 3), static_cast<double>(talenti_l1_50(5, 3)), 1e-13);
    EXPECT_NEAR(constants::talenti_l1(7.0, 4), static_cast<double>(talenti_l1_50(7, 4)), 1e-13);
}

TEST(Morrey, DomainAndMonotonicity) {
    EXPECT_THROW(constants::talenti_support(2.0, 2), DomainError);
    EXPECT_THROW(constants::talenti_l1(3.0, 3), DomainError);
    // Blows up like (p - n)^{-1/2} at n = 2.
    EXPECT_GT(constants::talenti_support(2.00001, 2) / constants::talenti_support(2.001, 2), 9.9);
    EXPECT_NEAR(constants::morrey_support(4.0, 2, 1.0), constants::talenti_support(4.0, 2), 0.0);
    EXPECT_NEAR(constants::morrey_support(4.0, 2, 0.5), constants::talenti_support(4.0, 2) * std::sqrt(2.0), 1e-14);
    EXPECT_THROW(constants::morrey_support(4.0, 2, 0.0), DomainError);
    double prev = HUGE_VAL;
    for (double a : {1e-6, 1e-3, 0.1, 0.5, 1.0}) {
        const double t = constants::morrey_support(4.0, 2, a), c = constants::morrey_l1(4.0, 2, a);
        EXPECT_LT(t, prev);
        prev = t;
        EXPECT_GT(c, 0.0);
    }
}

TEST(Morrey, Eta) {
    EXPECT_NEAR(constants::eta(4.0, 2), 0.8, 1e-15);
    EXPECT_NEAR(constants::eta(3.0, 2), 6.0 / 7.0, 1e-15);
    EXPECT_NEAR(constants::eta(1e9, 3), 0.75, 1e-8);
}

TEST(Morrey, SharpnessLimits) {
    const constants::SharpnessLimits s = constants::sharpness_limits(4.0, 2, 1.0);
    EXPECT_NEAR(s.support_energy, 2.0 * kPi * std::pow(2.0 / 3.0, 3), 1e-13);
    // H(1) identity: int_0^1 r^{(1-n)/(p-1)} (1 - r^n)^{1/(p-1)} dr = (1/n) B((1-n)p'/n + 1, p').
    for (auto [p, n] : std::vector<std::pair<double, int>>{{4.0, 2}, {5.0, 3}, {7.0, 4}}) {
        const double limit = constants::sharpness_limits(p, n, 1.0).l1_sup;
        EXPECT_NEAR(profiles::talenti_h_integral(p, n, 1.0), limit, 1e-9);
    }
    EXPECT_THROW(constants::sharpness_limits(2.0, 2, 1.0), DomainError);
}

TEST(Hardy, Values) {
    EXPECT_NEAR(constants::hardy(2.0, 4, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(constants::hardy(2.0, 3, 1.0), 0.25, 1e-15);
    EXPECT_NEAR(constants::hardy(2.0, 4, 0.5), std::pow(2.0, -0.5), 1e-15);
    EXPECT_THROW(constants::hardy(3.0, 3, 1.0), DomainError);
}

TEST(Bpv, Values) {
    const auto d = constants::bpv(0.0, 2, 1.0, kPi);
    EXPECT_EQ(d.mu_bar, 0.0);
    EXPECT_NEAR(d.value, 5.783185962946784, 1e-12);
    const auto b = constants::bpv(0.0, 3, 1.0, constants::omega(3));
    EXPECT_NEAR(b.mu_bar, 0.5, 1e-15);
    EXPECT_NEAR(b.value, kPi * kPi, 1e-12);
    const auto e = constants::bpv(1.0, 4, 1.0, constants::omega(4));
    EXPECT_NEAR(e.mu_bar, 0.0, 1e-15);
    EXPECT_NEAR(e.value, 5.783185962946784, 1e-12);
    EXPECT_THROW(constants::bpv(0.1, 2, 1.0, kPi), DomainError);
    EXPECT_THROW(constants::bpv(1.01, 4, 1.0, 1.0), DomainError);
    // Strictly decreasing in the volume and in mu.
    EXPECT_GT(constants::bpv(0.0, 3, 1.0, 1.0).value, constants::bpv(0.0, 3, 1.0, 2.0).value);
    EXPECT_GT(constants::bpv(0.0, 3, 1.0, 1.0).value, constants::bpv(0.2, 3, 1.0, 1.0).value);
}

TEST(Special, BesselZerosAgainstSeries) {
    const double j0 = series_zero(0.0, 2.0L, 3.0L), j1 = series_zero(1.0, 3.5L, 4.0L);
    EXPECT_NEAR(j0, 2.404825557695773, 1e-12);
    EXPECT_NEAR(j1, 3.831705970207512, 1e-12);
    EXPECT_NEAR(special::bessel_first_zero(0.0), j0, 1e-9);
    EXPECT_NEAR(special::bessel_first_zero(1.0), j1, 1e-9);
    EXPECT_NEAR(special::bessel_first_zero(0.5), kPi, 1e-12);
    for (double nu : {0.1, 0.387, 1.5, 2.7}) {
        const double z = special::bessel_first_zero(nu);
        EXPECT_NEAR(z, series_zero(nu, z - 0.1L, z + 0.1L), 1e-9) << "nu " << nu;
    }
}

TEST(Special, BesselAgainstSeriesAndClosedForm) {
    for (double nu : {0.0, 0.5, 1.0, 2.5})
        for (double x : {0.01, 1.0, 5.0, 11.0}) EXPECT_NEAR(special::bessel_j(nu, x), static_cast<double>(series_j(nu, x)), 1e-12);
    // Schlafli and Hankel ranges against J_{1/2}(x) = sqrt(2 / (pi x)) sin x.
    for (double x : {13.0, 20.0, 40.0, 100.0}) EXPECT_NEAR(special::bessel_j(0.5, x), std::sqrt(2.0 / (kPi * x)) * std::sin(x), 1e-12);
}

TEST(Special, BetaIdentities) {
    kernels::SplitMix64 rng(99);
    for (int i = 0; i < 500; ++i) {
        const double a = 10.0 * rng.uniform() + 1e-3, b = 10.0 * rng.uniform() + 1e-3;
        const double B = special::beta(a, b);
        EXPECT_NEAR(B, std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b), 1e-12 * B);
        EXPECT_NEAR(B, special::beta(a + 1.0, b) + special::beta(a, b + 1.0), 1e-12 * B);
    }
    EXPECT_NEAR(special::beta(0.5, 0.5), kPi, 1e-14);
    EXPECT_THROW(special::beta(0.0, 1.0), DomainError);
}

TEST(Evaluate, Table) {
    const constants::SharpConstants c = constants::evaluate(4.0, 2, 1.0, 0.0, std::nullopt);
    ASSERT_TRUE(c.T_pn && c.C_pn && c.eta && c.S_muF);
    EXPECT_FALSE(c.hardy_const.has_value());
    EXPECT_NEAR(*c.eta, 0.8, 1e-15);
    EXPECT_NEAR(c.volume, kPi, 1e-15);
    const constants::SharpConstants h = constants::evaluate(2.0, 4, 1.0, 0.5, 2.0);
    EXPECT_FALSE(h.T_pn.has_value());
    EXPECT_NEAR(*h.hardy_const, 1.0, 1e-15);
    EXPECT_NEAR(*h.mu_bar, std::sqrt(0.5), 1e-15);
}
