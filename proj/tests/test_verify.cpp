#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/profiles.hpp"
#include "finsler/verify.hpp"

using namespace finsler;

namespace {

constexpr double kPi = std::numbers::pi;

RadialFunction centered(Profile g, int n) { return {std::move(g), Vec(n, 0.0), {}}; }

std::vector<double> radii() { return {1, 2, 4, 8, 16, 32, 64}; }

}  // namespace

TEST(MorreySupport, ExtremalEquality) {
    for (auto [p, n] : std::vector<std::pair<double, int>>{{4.0, 2}, {5.0, 3}, {7.0, 4}}) {
        const InequalityReport r = verify_morrey_support(FinslerInstance::euclidean(n), centered(profiles::morrey_extremal(p, n), n), p);
        EXPECT_TRUE(r.pass);
        EXPECT_NEAR(r.ratio, 1.0, 1e-3);
    }
}

TEST(MorreySupport, ConeStrict) {
    // sup = 1, Vol(supp) = pi, E_4 = pi: rhs = T pi^{1/2 - 1/4} pi^{1/4} = T sqrt(pi).
    const InequalityReport r = verify_morrey_support(FinslerInstance::euclidean(2), centered(profiles::cone(), 2), 4.0);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.ratio, 1.0 / (constants::talenti_support(4.0, 2) * std::sqrt(kPi)), 1e-9);
    EXPECT_LT(r.ratio, 1.0);
}

TEST(MorreyL1, ExtremalEquality) {
    const auto m = FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(2, 4.0)));
    const InequalityReport r = verify_morrey_l1(m, centered(profiles::talenti_l1_extremal(4.0, 2), 2), 4.0);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.ratio, 1.0, 1e-3);
}

TEST(Sweep, SupportLimit) {
    const auto rs = radii();
    const SweepResult s = sharpness_sweep_support(FinslerInstance::euclidean(2), 4.0, rs);
    EXPECT_TRUE(s.pass);
    EXPECT_NEAR(s.limit, 2.0 * kPi * std::pow(2.0 / 3.0, 3), 1e-3 * s.target);
    EXPECT_NEAR(s.constant_limit, constants::talenti_support(4.0, 2), 1e-3);
    const std::string csv = s.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "R,lhs,rhs,ratio,target");
}

TEST(Sweep, L1BetaLimits) {
    const auto rs = radii();
    const SweepResult s = sharpness_sweep_l1(FinslerInstance::euclidean(2), 4.0, rs);
    EXPECT_TRUE(s.pass);
    const constants::SharpnessLimits lim = constants::sharpness_limits(4.0, 2, 1.0);
    EXPECT_NEAR(s.limit, s.target, 1e-3 * s.target);
    EXPECT_GT(lim.l1_mass, 0.0);
}

TEST(Hardy, ConeClosedForm) {
    // n = 3, p = 2: E = 4 pi / 3 and (1/4) int (1 - rho)^2 rho^{-2} dx = pi / 3.
    const double o[3] = {0, 0, 0};
    const InequalityReport r = verify_hardy(FinslerInstance::euclidean(3), centered(profiles::cone(), 3), 2.0, o);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.lhs, 4.0 * kPi / 3.0, 1e-9);
    EXPECT_NEAR(r.rhs, kPi / 3.0, 1e-9);
}

TEST(Hardy, NearExtremalMonotone) {
    const std::vector<double> deltas = {0.2, 0.1, 0.05};
    for (auto [p, n] : std::vector<std::pair<double, int>>{{2.0, 3}, {2.0, 4}, {3.0, 4}}) {
        const SweepResult s = hardy_near_extremal(FinslerInstance::euclidean(n), p, deltas);
        EXPECT_TRUE(s.pass);
        for (std::size_t i = 1; i < s.scaled.size(); ++i) {
            EXPECT_GT(s.scaled[i], s.scaled[i - 1]);
            EXPECT_LE(s.scaled[i], 1.0);
        }
    }
}

TEST(Bpv, DiskEigenfunctionAndCone) {
    const auto e2 = FinslerInstance::euclidean(2);
    const double o[2] = {0, 0};
    const InequalityReport eq = verify_bpv(e2, 1.0, centered(profiles::bessel_eigen(2, 0.0), 2), 0.0, o);
    EXPECT_TRUE(eq.pass);
    EXPECT_NEAR(eq.ratio, 1.0, 1e-4);
    const InequalityReport cone = verify_bpv(e2, 1.0, centered(profiles::cone(), 2), 0.0, o);
    EXPECT_TRUE(cone.pass);
    // Rayleigh quotient of the cone: (2 pi / 2) / (2 pi / 12) = 6 > j_0^2.
    EXPECT_GT(cone.ratio, 1.0 + 1e-3);
}

TEST(Isoperimetric, EqualityAndStrict) {
    const auto e2 = FinslerInstance::euclidean(2);
    EXPECT_NEAR(verify_isoperimetric(e2, Domain::ball(1.0)).ratio, 1.0, 1e-6);
    const InequalityReport rect = verify_isoperimetric(e2, Domain::box({1.0, 0.5}));
    EXPECT_TRUE(rect.pass);
    EXPECT_NEAR(rect.ratio, 6.0 / (2.0 * std::sqrt(2.0 * kPi)), 1e-12);
    const InequalityReport ell = verify_isoperimetric(e2, Domain::ellipsoid({2.0, 1.0}));
    EXPECT_TRUE(ell.pass);
    EXPECT_GT(ell.ratio, 1.0);
    const auto l4 = FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(2, 4.0)));
    EXPECT_NEAR(verify_isoperimetric(l4, Domain::wulff(1.3)).ratio, 1.0, 1e-6);
    EXPECT_THROW(verify_isoperimetric(e2, Domain::box({1.0})), DomainError);
}

TEST(Suite, SmallRandomSuitesPass) {
    SuiteOptions o;
    o.cases = 12;
    const auto l4 = FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(2, 4.0)));
    for (SuiteKind k : {SuiteKind::morrey_support, SuiteKind::morrey_l1, SuiteKind::bpv, SuiteKind::polya_szego,
                        SuiteKind::layer_cake, SuiteKind::equimeasurability}) {
        const SuiteSummary s = random_suite(k, l4, o);
        EXPECT_TRUE(s.pass()) << to_string(k);
        EXPECT_EQ(s.cases, 12);
    }
    SuiteOptions h = o;
    h.p = 2.0;
    EXPECT_TRUE(random_suite(SuiteKind::hardy, FinslerInstance::euclidean(3), h).pass());
    EXPECT_EQ(suite_kind_from_string("polya-szego"), SuiteKind::polya_szego);
    EXPECT_THROW(suite_kind_from_string("nope"), ConfigError);
}
