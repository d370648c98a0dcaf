// The OpenMP kernels must reproduce the serial reference bit for bit.

#include <gtest/gtest.h>

#include <cmath>

#include "finsler/kernels.hpp"
#include "finsler/manifold.hpp"
#include "finsler/profiles.hpp"
#include "finsler/rearrange.hpp"
#include "finsler/verify.hpp"

using namespace finsler;

namespace {

class Threads : public ::testing::TestWithParam<int> {
protected:
    void SetUp() override { kernels::set_threads(GetParam()); }
    void TearDown() override { kernels::set_threads(0); }
};

double bump(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::exp(-s) * (1.0 + 0.3 * std::sin(5.0 * x[0]));
}

}  // namespace

TEST_P(Threads, IntegrateIdentical) {
    const kernels::Box box{{-1.0, -2.0, 0.0}, {1.0, 1.0, 0.5}};
    // 100'003 samples leaves a partial last block.
    const auto s = kernels::integrate(bump, box, 100'003, 42, kernels::Execution::serial);
    const auto p = kernels::integrate(bump, box, 100'003, 42, kernels::Execution::parallel);
    EXPECT_EQ(s.value, p.value);
    EXPECT_EQ(s.std_error, p.std_error);
    EXPECT_EQ(s.samples, p.samples);
}

TEST_P(Threads, CellsIdentical) {
    const kernels::Box box{{-1.0, -1.0}, {1.0, 1.0}};
    const std::vector<int> cells = {97, 64};
    EXPECT_EQ(kernels::evaluate_cells(bump, box, cells, kernels::Execution::serial),
              kernels::evaluate_cells(bump, box, cells, kernels::Execution::parallel));
}

TEST_P(Threads, VolumesIdentical) {
    VolumeOptions o;
    o.method = VolumeMethod::monte_carlo;
    o.samples = 50'000;
    o.execution = kernels::Execution::serial;
    const MinkowskiNorm h = MinkowskiNorm::f_eps_fiber(3, 1.0);
    const double a = wulff_volume(h, o).value;
    o.execution = kernels::Execution::parallel;
    EXPECT_EQ(wulff_volume(h, o).value, a);

    BallOptions b;
    b.force_monte_carlo = true;
    b.samples = 50'000;
    b.execution = kernels::Execution::serial;
    const double x0[2] = {0.2, 0.1};
    const auto m = FinslerInstance::f_eps(2, 1.0);
    const BallVolume vs = ball_volume(m, x0, 1.5, b);
    b.execution = kernels::Execution::parallel;
    const BallVolume vp = ball_volume(m, x0, 1.5, b);
    EXPECT_EQ(vs.value, vp.value);
    EXPECT_EQ(vs.std_error, vp.std_error);
}

TEST_P(Threads, SampledRearrangementIdentical) {
    const auto e2 = FinslerInstance::euclidean(2);
    SampledFunction u;
    u.f = bump;
    u.box = {{-2.0, -2.0}, {2.0, 2.0}};
    u.cells = {80, 80};
    const DecreasingProfile s = rearrange(u, e2, e2.norm(), 512, kernels::Execution::serial);
    const DecreasingProfile p = rearrange(u, e2, e2.norm(), 512, kernels::Execution::parallel);
    EXPECT_EQ(s.grid.mu, p.grid.mu);
    for (double v : {0.1, 1.0, 5.0}) EXPECT_EQ(s.at_volume(v), p.at_volume(v));
}

TEST_P(Threads, SuiteIndependentOfWorkers) {
    SuiteOptions o;
    o.cases = 8;
    const auto m = FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(2, 4.0)));
    nlohmann::json a = random_suite(SuiteKind::equimeasurability, m, o).to_json();
    kernels::set_threads(1);
    nlohmann::json b = random_suite(SuiteKind::equimeasurability, m, o).to_json();
    a.erase("workers");
    b.erase("workers");
    EXPECT_EQ(a.dump(), b.dump());
}

INSTANTIATE_TEST_SUITE_P(Workers, Threads, ::testing::Values(1, 2, 4));
