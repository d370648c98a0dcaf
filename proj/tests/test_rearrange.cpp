#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "finsler/constants.hpp"
#include "finsler/profiles.hpp"
#include "finsler/rearrange.hpp"

using namespace finsler;

namespace {

constexpr double kPi = std::numbers::pi;

FinslerInstance l4(int n) { return FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(n, 4.0))); }

RadialFunction centered(Profile g, int n) { return {std::move(g), Vec(n, 0.0), {}}; }

}  // namespace

TEST(Distribution, Cone) {
    const auto e2 = FinslerInstance::euclidean(2);
    RadialLevelSets ls(profiles::cone(), level_set_growth(e2, centered(profiles::cone(), 2)));
    EXPECT_NEAR(ls.mu(0.5), kPi * 0.25, 1e-14);
    const auto m3 = l4(3);
    RadialLevelSets l3(profiles::cone(), level_set_growth(m3, centered(profiles::cone(), 3)));
    EXPECT_NEAR(l3.mu(0.5), constants::omega(3) / 8.0, 1e-12);
}

TEST(Distribution, PlateauStrictAndInclusiveLevels) {
    const auto e2 = FinslerInstance::euclidean(2);
    const Profile g = profiles::plateau();
    RadialLevelSets ls(g, level_set_growth(e2, centered(g, 2)));
    for (double t : {0.1, 0.5, 0.9}) EXPECT_NEAR(ls.mu(t), kPi * std::pow(1.0 - t / 2.0, 2), 1e-13);
    EXPECT_NEAR(ls.mu(1.0), 0.0, 1e-14);
    EXPECT_NEAR(ls.mu_at_least(1.0), kPi / 4.0, 1e-13);
}

TEST(Rearrange, FixesRadialDecreasing) {
    const auto m = l4(2);
    const Profile g = profiles::power_bump(2.0, 1.5);
    const DecreasingProfile us = rearrange(centered(g, 2), m, m.norm());
    for (double rho : {0.0, 0.1, 0.4, 0.7, 0.95}) EXPECT_NEAR(us.radial(rho), g(rho), 1e-9);
}

TEST(Rearrange, SampledAgainstSortOracle) {
    const auto e2 = FinslerInstance::euclidean(2);
    const Profile ring = profiles::ring(0.5, 0.3);
    SampledFunction s;
    s.f = [&](std::span<const double> x) { return ring(std::hypot(x[0], x[1])); };
    s.box = {{-1.0, -1.0}, {1.0, 1.0}};
    s.cells = {256, 256};
    const DecreasingProfile us = rearrange(s, e2, e2.norm());

    // Sort the cell values; the k-th largest value sits at volume k * cell area.
    std::vector<double> vals = kernels::evaluate_cells(s.f, s.box, s.cells, kernels::Execution::serial);
    std::sort(vals.begin(), vals.end(), std::greater<>());
    const double cell = 4.0 / vals.size();
    for (double vol : {0.05, 0.3, 0.8, 1.2, 1.6}) {
        const auto k = static_cast<std::size_t>(vol / cell);
        EXPECT_NEAR(us.at_volume(vol), vals[k], 5e-3) << "volume " << vol;
    }
}

TEST(Rearrange, LqNormsPreserved) {
    const auto e2 = FinslerInstance::euclidean(2);
    const RadialFunction u = centered(profiles::plateau(), 2);
    const DecreasingProfile us = rearrange(u, e2, e2.norm());
    const std::vector<double> qs = {1.0, 2.0, HUGE_VAL};
    for (const NormPair& n : lq_norms(u, e2, us, qs)) EXPECT_NEAR(n.rearranged, n.source, 1e-6 * n.source);
}

TEST(Energy, ClosedForms) {
    const auto e2 = MinkowskiNorm::euclidean(2);
    EXPECT_NEAR(radial_dirichlet_energy(profiles::cone(), e2, 4.0).value, kPi, 1e-10);
    // n omega_n ((p - n) / (p - 1))^p int_0^1 rho^{(1 - n) p' + n - 1}: 2 pi (2/3)^4 (3/2).
    const double morrey = 2.0 * kPi * std::pow(2.0 / 3.0, 4) * 1.5;
    EXPECT_NEAR(radial_dirichlet_energy(profiles::morrey_extremal(4.0, 2), e2, 4.0).value, morrey, 1e-9);
}

TEST(Energy, NormIndependence) {
    const MinkowskiNorm h = normalize(MinkowskiNorm::lp(2, 4.0));
    for (const Profile& g : {profiles::cone(), profiles::power_bump(1.5, 2.0), profiles::ring(0.5, 0.2)}) {
        const double a = radial_dirichlet_energy(g, MinkowskiNorm::euclidean(2), 3.0).value;
        EXPECT_NEAR(radial_dirichlet_energy(g, h, 3.0).value, a, 1e-8 * a);
    }
}

TEST(LayerCake, Identities) {
    const VolumeGrowth v = VolumeGrowth::power_law(2, kPi);
    const LayerCake one = layer_cake_integral(v, [](double) { return 1.0; }, [](double) { return 0.0; }, 1.5);
    EXPECT_NEAR(one.lhs, kPi * 2.25, 1e-12);
    EXPECT_NEAR(one.rhs, kPi * 2.25, 1e-12);

    const LayerCake sq = layer_cake_integral(v, [](double r) { return r * r; }, [](double r) { return 2.0 * r; }, 1.0);
    EXPECT_NEAR(sq.lhs, kPi / 2.0, 1e-12);
    EXPECT_NEAR(sq.rhs, kPi / 2.0, 1e-12);

    // f(r) = r^{(1 - n) p'} with p = 4, n = 2: lhs = 2 pi int_0^1 r^{-1/3} dr = 3 pi.
    const double k = -4.0 / 3.0;
    const LayerCake sing = layer_cake_integral(
        v, [k](double r) { return std::pow(r, k); }, [k](double r) { return k * std::pow(r, k - 1.0); }, 1.0, k);
    EXPECT_NEAR(sing.lhs, 3.0 * kPi, 1e-9);
    EXPECT_NEAR(sing.rhs, sing.lhs, 1e-6 * sing.lhs);
}

TEST(PolyaSzego, EqualityAndStrict) {
    const auto m = l4(2);
    const InequalityReport eq = polya_szego_check(centered(profiles::cone(), 2), m, m.norm(), 2.0);
    EXPECT_TRUE(eq.pass);
    EXPECT_NEAR(eq.ratio, 1.0, 1e-6);
    const auto e2 = FinslerInstance::euclidean(2);
    const InequalityReport strict = polya_szego_check(centered(profiles::ring(0.5, 0.3), 2), e2, e2.norm(), 2.0);
    EXPECT_TRUE(strict.pass);
    EXPECT_GT(std::abs(strict.ratio - 1.0), 1e-3);
}

TEST(Hlp, CenteredShiftedAndConstantWeight) {
    const auto e2 = FinslerInstance::euclidean(2);
    const double o[2] = {0.0, 0.0};
    const InequalityReport centred = hlp_check(centered(profiles::cone(), 2), e2, e2.norm(), Weight::power(-1.0), 2.0, o);
    EXPECT_TRUE(centred.pass);
    EXPECT_NEAR(centred.ratio, 1.0, 1e-6);

    const RadialFunction shifted{profiles::cone(), {0.4, 0.0}, {}};
    const InequalityReport s = hlp_check(shifted, e2, e2.norm(), Weight::power(-1.0), 2.0, o);
    EXPECT_TRUE(s.pass);
    EXPECT_LT(s.lhs, s.rhs * (1.0 - 1e-3));

    const InequalityReport c = hlp_check(shifted, e2, e2.norm(), Weight::constant(), 2.0, o);
    EXPECT_NEAR(c.lhs, c.rhs, 1e-6 * c.rhs);
}
