#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/manifold.hpp"

using namespace finsler;

namespace {

constexpr double kPi = std::numbers::pi;

BallOptions monte_carlo(std::uint64_t samples = 400'000) {
    BallOptions o;
    o.force_monte_carlo = true;
    o.samples = samples;
    return o;
}

}  // namespace

TEST(Density, BusemannHausdorff) {
    const double x[2] = {0.3, -1.0};
    EXPECT_NEAR(bh_density(FinslerInstance::euclidean(2), x), 1.0, 1e-12);
    EXPECT_NEAR(bh_density(FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(2, 4.0))), x), 1.0, 1e-9);
    const double s = bh_density(FinslerInstance::f_eps(2, 1.0), x);
    EXPECT_GE(s, 1.0);
    EXPECT_LE(s, 2.0);
}

TEST(Distance, ClosedForms) {
    const double o[2] = {0.0, 0.0};
    const double a[2] = {3.0, 4.0}, b[2] = {1.0, 1.0}, c[2] = {1.0, 0.0};
    EXPECT_NEAR(distance(FinslerInstance::euclidean(2), o, a).value, 5.0, 1e-14);
    const auto linf = FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(2, HUGE_VAL)));
    EXPECT_NEAR(distance(linf, o, b).value, 2.0 / std::sqrt(kPi), 1e-10);
    const DistanceResult d = distance(FinslerInstance::f_eps(2, 1.0), o, c);
    EXPECT_TRUE(d.exact);
    EXPECT_NEAR(d.value, std::sqrt(2.0), 1e-14);
}

TEST(Distance, CurvedBaseGivesInterval) {
    const auto m = FinslerInstance::f_eps(3, 1.0, BaseMetric::parse("smoothed_cone:0.5"));
    const double x0[3] = {1.0, 0.0, 0.0}, x1[3] = {-1.0, 0.5, 0.3};
    const DistanceResult d = distance(m, x0, x1);
    EXPECT_FALSE(d.exact);
    EXPECT_LE(d.lo, d.value);
    EXPECT_LE(d.value, d.hi + 1e-12);
}

TEST(BallVolume, Exact) {
    const double o3[3] = {0, 0, 0}, o2[2] = {0, 0};
    EXPECT_NEAR(ball_volume(FinslerInstance::euclidean(3), o3, 2.0).value, 4.0 * kPi / 3.0 * 8.0, 1e-10);
    const auto m = FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(2, 4.0)));
    for (double r : {0.5, 1.0, 3.0}) EXPECT_NEAR(ball_volume(m, o2, r).value, kPi * r * r, 1e-9 * r * r);
}

TEST(BallVolume, FEpsMonteCarloInSandwich) {
    const double o[2] = {0, 0};
    const BallVolume v = ball_volume(FinslerInstance::f_eps(2, 1.0), o, 1.0, monte_carlo());
    EXPECT_GE(v.value + 3.0 * v.std_error, kPi / 2.0);
    EXPECT_LE(v.value - 3.0 * v.std_error, kPi);
    EXPECT_NEAR(v.value, kPi, 4.0 * v.std_error);
}

TEST(BallVolume, SmallBallLimit) {
    const double o[2] = {0.4, -0.2};
    const auto m = FinslerInstance::f_eps(2, 1.0);
    for (double r : {1e-1, 1e-2}) {
        const BallVolume v = ball_volume(m, o, r, monte_carlo());
        const double ratio = v.value / (kPi * r * r);
        EXPECT_NEAR(ratio, 1.0, 4.0 * v.std_error / (kPi * r * r));
    }
}

TEST(Avr, Estimates) {
    const double o2[2] = {0, 0};
    const std::vector<double> radii = {1.0, 2.0, 4.0};
    AvrOptions mc;
    mc.ball = monte_carlo(200'000);
    const AvrEstimate e = avr(FinslerInstance::euclidean(2), o2, radii, mc);
    EXPECT_NEAR(e.point, 1.0, 4.0 * e.std_error);
    EXPECT_TRUE(e.curve.bishop_gromov);

    const AvrEstimate x = avr(FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(2, 4.0))), o2, radii);
    EXPECT_EQ(x.method, "exact");
    EXPECT_DOUBLE_EQ(x.point, 1.0);

    const AvrEstimate f = avr(FinslerInstance::f_eps(2, 1.0), o2, radii, mc);
    EXPECT_GE(f.point + 3.0 * f.std_error, 0.5);
    EXPECT_LE(f.point - 3.0 * f.std_error, 1.0);
}

TEST(Avr, CurvedBaseInterval) {
    const auto m = FinslerInstance::f_eps(3, 1.0, BaseMetric::parse("smoothed_cone:0.5"));
    const double o[3] = {0, 0, 0};
    AvrOptions opts;
    opts.ball.samples = 20'000;
    opts.base_avr = m.base().avr(3);
    opts.throw_on_violation = false;
    const std::vector<double> radii = {2.0, 4.0};
    const AvrEstimate e = avr(m, o, radii, opts);
    EXPECT_NEAR(e.hi, 0.5, 1e-12);
    EXPECT_NEAR(e.lo, 0.5 / std::pow(2.0, 1.5), 1e-12);
}

TEST(Gradient, Legendre) {
    const double o[2] = {0, 0};
    const double du[2] = {3.0, 4.0};
    const Vec g = finsler_gradient(FinslerInstance::euclidean(2), o, du);
    EXPECT_NEAR(g[0], 3.0, 1e-12);
    EXPECT_NEAR(g[1], 4.0, 1e-12);

    // Oracle: maximizer of <du, y> - |y|_4^2 / 2 by a dense grid and Newton polish.
    const double du2[2] = {1.0, 2.0};
    const Vec y = finsler_gradient(FinslerInstance::minkowski(MinkowskiNorm::lp(2, 4.0)), o, du2);
    EXPECT_NEAR(y[0], 1.876124223, 1e-7);
    EXPECT_NEAR(y[1], 2.363768401, 1e-7);

    const double zero[2] = {0, 0};
    const Vec z = finsler_gradient(FinslerInstance::euclidean(2), o, zero);
    EXPECT_EQ(z[0], 0.0);
    EXPECT_EQ(z[1], 0.0);
}

TEST(Instance, Descriptors) {
    const auto m = instance_from_descriptor(
        {{"kind", "minkowski"}, {"n", 2}, {"norm", {{"kind", "lp"}, {"n", 2}, {"p", 4.0}, {"normalized", true}}}});
    EXPECT_EQ(m.dim(), 2);
    EXPECT_EQ(instance_from_descriptor(m.descriptor()).descriptor(), m.descriptor());
    const auto f = instance_from_descriptor({{"kind", "f_eps"}, {"n", 3}, {"eps", 0.5}});
    EXPECT_EQ(f.kind(), InstanceKind::f_eps);
    EXPECT_THROW(instance_from_descriptor({{"kind", "torus"}, {"n", 2}}), ConfigError);
    EXPECT_THROW(FinslerInstance::f_eps(2, -1.0), DomainError);
}
