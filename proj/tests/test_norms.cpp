#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "finsler/errors.hpp"
#include "finsler/kernels.hpp"
#include "finsler/norms.hpp"

using namespace finsler;

namespace {

constexpr double kPi = std::numbers::pi;

Vec random_vec(kernels::SplitMix64& rng, int n) {
    Vec v(n);
    for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
    return v;
}

// Brute-force polar transform in 2-D: dense angular sweep, then golden section.
double sweep_dual_2d(const MinkowskiNorm& h, double a0, double a1) {
    auto g = [&](double t) {
        const double y[2] = {std::cos(t), std::sin(t)};
        return (a0 * y[0] + a1 * y[1]) / h(y);
    };
    const int m = 1'000'000;
    double best = -1e300, bt = 0.0;
    for (int i = 0; i < m; ++i) {
        const double t = 2.0 * kPi * i / m;
        if (const double v = g(t); v > best) best = v, bt = t;
    }
    double lo = bt - 2.0 * kPi / m, hi = bt + 2.0 * kPi / m;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 0; k < 100; ++k) {
        const double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
        if (g(c) > g(d))
            hi = d;
        else
            lo = c;
    }
    return g(0.5 * (lo + hi));
}

}  // namespace

TEST(Dual, EuclideanSelfDual) {
    const double a[2] = {3.0, 4.0};
    EXPECT_NEAR(dual_norm(MinkowskiNorm::euclidean(2), a), 5.0, 1e-14);
}

TEST(Dual, L1IsMaxNorm) {
    const double a[2] = {1.0, -2.0};
    EXPECT_NEAR(dual_norm(MinkowskiNorm::lp(2, 1.0), a), 2.0, 1e-14);
}

TEST(Dual, FEpsFiberAgainstSweep) {
    const MinkowskiNorm h = MinkowskiNorm::f_eps_fiber(2, 1.0);
    const double frozen = 0.7071067811865475;
    EXPECT_NEAR(sweep_dual_2d(h, 1.0, 0.0), frozen, 1e-12);
    const double a[2] = {1.0, 0.0};
    EXPECT_NEAR(dual_norm(h, a), frozen, 1e-9);
}

TEST(Dual, NumericMatchesAnalyticForLp) {
    const MinkowskiNorm h = MinkowskiNorm::lp(3, 4.0);
    kernels::SplitMix64 rng(7);
    for (int i = 0; i < 20; ++i) {
        const Vec a = random_vec(rng, 3);
        EXPECT_NEAR(dual_norm_numeric(h, a).value, *h.analytic_dual(a), 1e-8);
    }
}

TEST(Dual, Homogeneity) {
    const MinkowskiNorm h = MinkowskiNorm::f_eps_fiber(2, 0.5);
    kernels::SplitMix64 rng(11);
    for (int i = 0; i < 10; ++i) {
        const Vec a = random_vec(rng, 2);
        const double lambda = -3.0 + 6.0 * rng.uniform();
        Vec b = a;
        for (double& x : b) x *= lambda;
        const double da = dual_norm(h, a);
        EXPECT_NEAR(dual_norm(h, b), std::abs(lambda) * da, 1e-8 * std::abs(lambda) * da);
    }
}

TEST(Dual, BidualRecoversNorm) {
    const MinkowskiNorm h = MinkowskiNorm::lp(2, 4.0);
    const MinkowskiNorm dual = MinkowskiNorm::lp(2, 4.0 / 3.0);
    kernels::SplitMix64 rng(13);
    for (int i = 0; i < 10; ++i) {
        const Vec y = random_vec(rng, 2);
        EXPECT_NEAR(dual_norm_numeric(dual, y).value, h(y), 1e-4 * h(y));
    }
}

TEST(Norm, Invariants) {
    for (const MinkowskiNorm& h : {MinkowskiNorm::euclidean(3), MinkowskiNorm::lp(3, 4.0), MinkowskiNorm::f_eps_fiber(3, 1.0)}) {
        kernels::SplitMix64 rng(17);
        for (int i = 0; i < 200; ++i) {
            const Vec y = random_vec(rng, 3), z = random_vec(rng, 3);
            const double lambda = -4.0 + 8.0 * rng.uniform();
            Vec ly = y, s = y;
            for (int k = 0; k < 3; ++k) ly[k] *= lambda, s[k] += z[k];
            EXPECT_GT(h(y), 0.0);
            EXPECT_NEAR(h(ly), std::abs(lambda) * h(y), 1e-12 * (1.0 + h(ly)));
            EXPECT_LE(h(s), h(y) + h(z) + 1e-12);
        }
    }
}

TEST(WulffVolume, ClosedForms) {
    EXPECT_NEAR(wulff_volume(MinkowskiNorm::euclidean(2)).value, kPi, 1e-10);
    EXPECT_NEAR(wulff_volume(MinkowskiNorm::lp(2, HUGE_VAL)).value, 4.0, 1e-10);
    EXPECT_NEAR(wulff_volume(MinkowskiNorm::lp(3, 1.0)).value, 4.0 / 3.0, 1e-10);
}

TEST(WulffVolume, MonteCarloWithinErrorBars) {
    VolumeOptions o;
    o.method = VolumeMethod::monte_carlo;
    o.samples = 400'000;
    const VolumeEstimate e = wulff_volume(MinkowskiNorm::f_eps_fiber(2, 1.0), o);
    const double q = wulff_volume(MinkowskiNorm::f_eps_fiber(2, 1.0), {.method = VolumeMethod::quadrature}).value;
    EXPECT_GT(e.std_error, 0.0);
    EXPECT_NEAR(e.value, q, 4.0 * e.std_error);
}

TEST(WulffVolume, Scaling) {
    const MinkowskiNorm h = MinkowskiNorm::lp(2, 3.0);
    const double v1 = wulff_volume(h).value;
    // W_H(R) = W_{H/R}(1).
    for (double r : {0.5, 2.0, 3.0}) EXPECT_NEAR(wulff_volume(h.scaled(1.0 / r)).value, r * r * v1, 1e-9 * r * r * v1);
}

TEST(Normalize, Scales) {
    EXPECT_NEAR(normalize(MinkowskiNorm::euclidean(3)).scale(), 1.0, 1e-12);
    EXPECT_NEAR(normalize(MinkowskiNorm::lp(2, HUGE_VAL)).scale(), 2.0 / std::sqrt(kPi), 1e-10);
    EXPECT_NEAR(normalize(MinkowskiNorm::lp(2, 1.0)).scale(), std::sqrt(2.0 / kPi), 1e-10);
}

TEST(Normalize, Idempotent) {
    const MinkowskiNorm h = normalize(MinkowskiNorm::f_eps_fiber(2, 1.0));
    const MinkowskiNorm hh = normalize(h);
    EXPECT_NEAR(hh.scale() / h.scale(), 1.0, 1e-6);
    EXPECT_NEAR(wulff_volume(h).value, kPi, 1e-8);
}

TEST(Eikonal, Residuals) {
    kernels::SplitMix64 rng(19);
    std::vector<Vec> s2, s3;
    for (int i = 0; i < 100; ++i) s2.push_back(random_vec(rng, 2)), s3.push_back(random_vec(rng, 3));
    EXPECT_LT(eikonal_residual(MinkowskiNorm::euclidean(2), s2), 1e-6);
    EXPECT_LT(eikonal_residual(normalize(MinkowskiNorm::lp(2, 4.0)), s2, true), 1e-4);
    EXPECT_LT(eikonal_residual(MinkowskiNorm::f_eps_fiber(3, 0.5), s3, true), 1e-3);
}

TEST(Descriptor, RoundTripAndErrors) {
    const MinkowskiNorm h = norm_from_descriptor({{"kind", "lp"}, {"n", 2}, {"p", 4.0}, {"normalized", true}});
    EXPECT_NEAR(wulff_volume(h).value, kPi, 1e-9);
    const MinkowskiNorm g = norm_from_descriptor(h.descriptor());
    const double y[2] = {0.3, -0.7};
    EXPECT_DOUBLE_EQ(g(y), h(y));
    EXPECT_THROW(norm_from_descriptor({{"kind", "lp"}, {"n", 2}}), ConfigError);
    EXPECT_THROW(norm_from_descriptor({{"kind", "banana"}, {"n", 2}}), ConfigError);
}
