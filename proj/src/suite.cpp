#include "finsler/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/kernels.hpp"
#include "finsler/manifold.hpp"
#include "finsler/pde.hpp"
#include "finsler/profiles.hpp"
#include "finsler/report.hpp"
#include "finsler/special.hpp"
#include "finsler/verify.hpp"

namespace finsler {

namespace {

using json = nlohmann::json;

json parse_scalar(const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used == v.size()) return i;
    } catch (const std::exception&) {
    }
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    if (v == "inf") return "inf";
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
auto timed(CriterionResult& r, const std::string& task, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto value = f();
    r.timings.emplace_back(task, seconds_since(t0));
    return value;
}

FinslerInstance euclidean(int n) { return FinslerInstance::euclidean(n); }
FinslerInstance l4(int n) { return FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(n, 4.0))); }
FinslerInstance feps2() { return FinslerInstance::f_eps(2, 1.0); }

struct Named {
    std::string name;
    FinslerInstance m;
};

std::vector<Named> suite_instances() {
    return {{"euclidean-2", euclidean(2)}, {"l4-2", l4(2)}, {"f_eps-2", feps2()}, {"euclidean-3", euclidean(3)},
            {"euclidean-4", euclidean(4)}};
}

const std::vector<std::pair<double, int>> kMorreyCases = {{4.0, 2}, {5.0, 3}, {7.0, 4}};

std::string pass_word(bool b) { return b ? "pass" : "FAIL"; }

// ---- independent special-function oracle: ascending series and bisection ----

long double series_j(long double nu, long double x) {
    long double term = std::pow(x / 2.0L, nu) / std::tgamma(nu + 1.0L);
    long double sum = term;
    const long double q = -(x * x) / 4.0L;
    for (int k = 1; k < 200; ++k) {
        term *= q / (k * (k + nu));
        sum += term;
        if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
    }
    return sum;
}

double series_zero(double nu, double lo, double hi) {
    long double a = lo, b = hi;
    const long double fa = series_j(nu, a);
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (a + b);
        if ((series_j(nu, mid) > 0) == (fa > 0))
            a = mid;
        else
            b = mid;
    }
    return static_cast<double>(0.5L * (a + b));
}

// ---- criteria ----

CriterionResult criterion_morrey_equality(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "Morrey support-bound equality";
    r.pass = true;
    json cases = json::array();
    double worst = 0.0;
    for (auto [p, n] : kMorreyCases) {
        for (int inst = 0; inst < 2; ++inst) {
            const FinslerInstance m = inst == 0 ? euclidean(n) : l4(n);
            const std::string task = (inst == 0 ? "euclidean" : "l4") + std::string(" p=") + format_double(p) +
                                     " n=" + std::to_string(n);
            const auto t0 = std::chrono::steady_clock::now();
            const InequalityReport rep = verify_morrey_support(m, {profiles::morrey_extremal(p, n, 1.0), Vec(n, 0.0), {}}, p);
            const double dt = seconds_since(t0);
            r.timings.emplace_back(task, dt);
            const double err = std::abs(rep.ratio - 1.0);
            const bool ok = err <= 1e-3 && rep.pass;
            const bool fast = dt < cfg.case_budget;
            r.pass = r.pass && ok && fast;
            worst = std::max(worst, err);
            cases.push_back({{"p", p}, {"n", n}, {"instance", m.descriptor()}, {"ratio", rep.ratio}, {"pass", ok},
                             {"within_budget", fast}});
        }
    }
    r.details = {{"cases", cases}, {"tolerance", 1e-3}, {"worst_ratio_error", worst}};
    r.summary = "6 cases, max |ratio - 1| = " + format_double(worst);
    return r;
}

CriterionResult criterion_support_sweep(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "Support-bound sharpness limit";
    r.pass = true;
    const Schedule sched = parse_schedule(cfg.sweep);
    json sweeps = json::array();
    double worst_energy = 0.0, worst_constant = 0.0;
    for (auto [p, n] : kMorreyCases) {
        for (int inst = 0; inst < 2; ++inst) {
            const FinslerInstance m = inst == 0 ? euclidean(n) : l4(n);
            const SweepResult s = timed(r, "sweep p=" + format_double(p) + " n=" + std::to_string(n),
                                        [&] { return sharpness_sweep_support(m, p, sched.values); });
            r.pass = r.pass && s.pass;
            worst_energy = std::max(worst_energy, std::abs(s.limit - s.target) / s.target);
            worst_constant = std::max(worst_constant, std::abs(s.constant_limit - s.constant_target) / s.constant_target);
            sweeps.push_back(s.to_json());
        }
    }
    r.details = {{"sweeps", sweeps}, {"schedule", cfg.sweep}};
    r.summary = "energy limit rel err " + format_double(worst_energy) + ", T_{p,n} rel err " + format_double(worst_constant);
    return r;
}

CriterionResult criterion_l1(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "L1 bound and Beta limits";
    r.pass = true;
    const Schedule sched = parse_schedule(cfg.sweep);
    json cases = json::array();
    double worst_ratio = 0.0;
    for (auto [p, n] : kMorreyCases) {
        for (int inst = 0; inst < 2; ++inst) {
            const FinslerInstance m = inst == 0 ? euclidean(n) : l4(n);
            const std::string task = "l1 p=" + format_double(p) + " n=" + std::to_string(n);
            const InequalityReport rep = timed(r, task, [&] {
                return verify_morrey_l1(m, {profiles::talenti_l1_extremal(p, n, 1.0), Vec(n, 0.0), {}}, p);
            });
            const SweepResult s = timed(r, task + " sweep", [&] { return sharpness_sweep_l1(m, p, sched.values); });
            const bool ok = std::abs(rep.ratio - 1.0) <= 1e-3 && s.pass;
            r.pass = r.pass && ok;
            worst_ratio = std::max(worst_ratio, std::abs(rep.ratio - 1.0));
            cases.push_back({{"p", p}, {"n", n}, {"instance", m.descriptor()}, {"ratio", rep.ratio}, {"sweep", s.to_json()},
                             {"pass", ok}});
        }
    }
    r.details = {{"cases", cases}};
    r.summary = "max |ratio - 1| = " + format_double(worst_ratio) + ", Beta limits and sup checked";
    return r;
}

CriterionResult criterion_special(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "Special functions";
    struct Zero {
        double nu, lo, hi, frozen;
    };
    const std::vector<Zero> zeros = {{0.0, 2.0, 3.0, 2.404825557695773},
                                     {0.5, 3.0, 3.3, std::numbers::pi},
                                     {1.0, 3.5, 4.0, 3.831705970207512}};
    json zj = json::array();
    bool zeros_ok = true;
    for (const Zero& z : zeros) {
        const double lib = special::bessel_first_zero(z.nu);
        const double oracle = series_zero(z.nu, z.lo, z.hi);
        const bool ok = std::abs(lib - oracle) <= 1e-9 && std::abs(lib - z.frozen) <= 1e-9;
        zeros_ok = zeros_ok && ok;
        zj.push_back({{"nu", z.nu}, {"library", lib}, {"oracle", oracle}, {"reference", z.frozen}, {"pass", ok}});
    }
    // Beta/Gamma identities on seeded random arguments.
    kernels::SplitMix64 rng(kernels::block_seed(cfg.seed, 4));
    double worst = 0.0;
    int checks = 0;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    for (int i = 0; i < 200; ++i) {
        const double a = 0.1 + 9.9 * rng.uniform(), b = 0.1 + 9.9 * rng.uniform();
        const double B = special::beta(a, b);
        worst = std::max(worst, rel(B, std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b)));
        worst = std::max(worst, rel(B, special::beta(b, a)));
        worst = std::max(worst, rel(B, special::beta(a + 1.0, b) + special::beta(a, b + 1.0)));
        worst = std::max(worst, rel(special::beta(a, 1.0), 1.0 / a));
        checks += 4;
    }
    worst = std::max(worst, rel(special::beta(0.5, 0.5), std::numbers::pi));
    for (int n = 3; n <= 12; ++n) {
        worst = std::max(worst, rel(constants::omega(n), 2.0 * std::numbers::pi / n * constants::omega(n - 2)));
        checks += 1;
    }
    const bool identities_ok = worst <= 1e-12;
    // J_nu against the series at moderate arguments.
    double jworst = 0.0;
    for (double nu : {0.0, 0.5, 1.0, 2.5})
        for (double x : {0.3, 1.7, 4.2, 7.9})
            jworst = std::max(jworst, std::abs(special::bessel_j(nu, x) - static_cast<double>(series_j(nu, x))));
    const bool j_ok = jworst <= 1e-12;
    r.pass = zeros_ok && identities_ok && j_ok;
    r.details = {{"zeros", zj},
                 {"identity_checks", checks + 1},
                 {"identity_max_relative_error", worst},
                 {"bessel_series_max_abs_error", jworst}};
    r.summary = "zeros " + pass_word(zeros_ok) + ", Beta/Gamma identities max rel err " + format_double(worst);
    return r;
}

struct EigenCase {
    int n;
    double R, mu;
};

CriterionResult criterion_eigen(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "Eigenvalue solver vs closed form";
    const std::vector<EigenCase> grid = {{2, 1.0, 0.0}, {2, 2.0, 0.0}, {2, 0.5, 0.0}, {2, 3.0, 0.0},
                                         {3, 1.0, 0.0}, {3, 1.0, 0.1}, {3, 2.0, 0.2}, {3, 0.5, 0.24},
                                         {4, 2.0, 0.5}, {4, 1.0, 0.0}, {4, 1.0, 0.9}, {4, 3.0, 0.3}};
    r.pass = true;
    json cases = json::array();
    double worst = 0.0;
    double disk = 0.0, ball = 0.0;
    for (const EigenCase& c : grid) {
        pde::RadialBvp bvp;
        bvp.n = c.n;
        bvp.radius = c.R;
        bvp.mu = c.mu;
        const auto t0 = std::chrono::steady_clock::now();
        const pde::Eigenpair e = pde::first_eigenvalue(bvp);
        const double dt = seconds_since(t0);
        r.timings.emplace_back("n=" + std::to_string(c.n) + " R=" + format_double(c.R) + " mu=" + format_double(c.mu), dt);
        const double j = special::bessel_first_zero(e.mu_bar);
        const double err = std::abs(e.lambda * c.R * c.R - j * j);
        const bool ok = err < 1e-4 && dt < cfg.case_budget;
        r.pass = r.pass && ok;
        worst = std::max(worst, err);
        if (c.n == 2 && c.R == 1.0) disk = e.lambda;
        if (c.n == 3 && c.R == 1.0 && c.mu == 0.0) ball = e.lambda;
        cases.push_back({{"n", c.n},
                         {"R", c.R},
                         {"mu", c.mu},
                         {"lambda_1", e.lambda},
                         {"j_mu_bar_squared", j * j},
                         {"error", err},
                         {"rayleigh", e.energy.rayleigh},
                         {"pass", ok}});
    }
    const bool disk_ok = std::abs(disk - 5.783186) < 1e-6;
    const bool ball_ok = std::abs(ball - std::numbers::pi * std::numbers::pi) < 1e-4;
    r.pass = r.pass && disk_ok && ball_ok;
    r.details = {{"cases", cases}, {"unit_disk", disk}, {"unit_ball_n3", ball}, {"tolerance", 1e-4}};
    r.summary = "12 cases, max |lambda R^2 - j^2| = " + format_double(worst) + ", disk " + format_double(disk);
    return r;
}

CriterionResult criterion_bpv(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "BPV inequality";
    r.pass = true;
    json suites = json::array();
    SuiteOptions so;
    so.cases = cfg.cases;
    so.seed = cfg.seed;
    for (const Named& inst : suite_instances()) {
        const SuiteSummary s = timed(r, "bpv " + inst.name, [&] { return random_suite(SuiteKind::bpv, inst.m, so); });
        r.pass = r.pass && s.pass();
        suites.push_back(s.to_json());
    }
    // Equality for the first eigenfunction on Wulff balls.
    struct Eq {
        std::string name;
        FinslerInstance m;
        double R, mu;
    };
    const std::vector<Eq> eqs = {{"euclidean-2", euclidean(2), 1.0, 0.0}, {"l4-2", l4(2), 1.0, 0.0},
                                 {"f_eps-2", feps2(), 1.0, 0.0},          {"euclidean-3", euclidean(3), 1.0, 0.1},
                                 {"l4-3", l4(3), 1.0, 0.0},               {"euclidean-4", euclidean(4), 2.0, 0.5}};
    json equality = json::array();
    double worst = 0.0;
    for (const Eq& e : eqs) {
        const int n = e.m.dim();
        const double mu_bar = constants::bpv(e.mu, n, 1.0, constants::omega(n)).mu_bar;
        const Vec x0(n, 0.0);
        const InequalityReport rep = timed(r, "equality " + e.name, [&] {
            return verify_bpv(e.m, e.R, {profiles::bessel_eigen(n, mu_bar, e.R), x0, {}}, e.mu, x0);
        });
        const double err = std::abs(rep.ratio - 1.0);
        worst = std::max(worst, err);
        const bool ok = err <= 1e-4;
        r.pass = r.pass && ok;
        equality.push_back({{"instance", e.name}, {"R", e.R}, {"mu", e.mu}, {"ratio", rep.ratio}, {"pass", ok}});
    }
    // Rayleigh quotients of computed eigenprofiles against S_mu.
    json rayleigh = json::array();
    for (const EigenCase& c : std::vector<EigenCase>{{2, 1.0, 0.0}, {3, 1.0, 0.1}, {4, 2.0, 0.5}}) {
        pde::RadialBvp bvp;
        bvp.n = c.n;
        bvp.radius = c.R;
        bvp.mu = c.mu;
        const pde::Eigenpair e = timed(r, "eigenprofile n=" + std::to_string(c.n), [&] { return pde::first_eigenvalue(bvp); });
        const double S = constants::bpv(c.mu, c.n, 1.0, constants::omega(c.n) * std::pow(c.R, c.n)).value;
        const bool ok = e.energy.rayleigh >= S - 1e-6 && std::abs(e.energy.rayleigh - S) <= 1e-4 * S;
        r.pass = r.pass && ok;
        rayleigh.push_back({{"n", c.n}, {"R", c.R}, {"mu", c.mu}, {"rayleigh", e.energy.rayleigh}, {"S", S}, {"pass", ok}});
    }
    r.details = {{"suites", suites}, {"eigenfunction_equality", equality}, {"eigenprofile_rayleigh", rayleigh}};
    r.summary = std::to_string(suites.size()) + " suites x " + std::to_string(cfg.cases) +
                " cases, eigenfunction max |ratio - 1| = " + format_double(worst);
    return r;
}

CriterionResult criterion_hardy(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "Hardy inequality";
    r.pass = true;
    json suites = json::array();
    struct H {
        std::string name;
        FinslerInstance m;
        double p;
    };
    const std::vector<H> hs = {{"euclidean-3", euclidean(3), 2.0},
                               {"l4-3", l4(3), 2.0},
                               {"euclidean-4", euclidean(4), 2.0},
                               {"euclidean-4", euclidean(4), 3.0},
                               {"l4-4", FinslerInstance::minkowski(normalize(MinkowskiNorm::lp(4, 4.0))), 3.0}};
    int failures = 0;
    for (const H& h : hs) {
        SuiteOptions so;
        so.cases = cfg.cases;
        so.seed = cfg.seed;
        so.p = h.p;
        const SuiteSummary s =
            timed(r, "hardy " + h.name + " p=" + format_double(h.p), [&] { return random_suite(SuiteKind::hardy, h.m, so); });
        r.pass = r.pass && s.pass();
        failures += s.failures;
        json j = s.to_json();
        j["p"] = h.p;
        suites.push_back(j);
    }
    json families = json::array();
    bool monotone = true;
    for (auto [p, n] : std::vector<std::pair<double, int>>{{2.0, 3}, {2.0, 4}, {3.0, 4}}) {
        const SweepResult s = timed(r, "near-extremal p=" + format_double(p) + " n=" + std::to_string(n),
                                    [&] { return hardy_near_extremal(euclidean(n), p, cfg.hardy_deltas); });
        monotone = monotone && s.pass;
        families.push_back(s.to_json());
    }
    r.pass = r.pass && monotone;
    r.details = {{"suites", suites}, {"near_extremal", families}};
    r.summary = std::to_string(failures) + " violations in " + std::to_string(hs.size()) + " suites, near-extremal family " +
                (monotone ? "monotone" : "NOT monotone");
    return r;
}

CriterionResult criterion_rearrangement(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "Rearrangement property suites";
    r.pass = true;
    json suites = json::array();
    SuiteOptions so;
    so.cases = cfg.cases;
    so.seed = cfg.seed;
    int failures = 0, total = 0;
    for (SuiteKind k : {SuiteKind::polya_szego, SuiteKind::hlp, SuiteKind::layer_cake, SuiteKind::equimeasurability}) {
        for (const Named& inst : suite_instances()) {
            const SuiteSummary s = timed(r, to_string(k) + " " + inst.name, [&] { return random_suite(k, inst.m, so); });
            r.pass = r.pass && s.pass();
            failures += s.failures;
            ++total;
            suites.push_back(s.to_json());
        }
    }
    r.details = {{"suites", suites}};
    r.summary = std::to_string(total) + " suites x " + std::to_string(cfg.cases) + " cases, " + std::to_string(failures) +
                " failures";
    return r;
}

CriterionResult criterion_isoperimetric(const ReproConfig&) {
    CriterionResult r;
    r.title = "Isoperimetric inequality";
    r.pass = true;
    struct Iso {
        std::string name;
        FinslerInstance m;
        Domain omega;
        bool equality;
    };
    const std::vector<Iso> cases = {
        {"euclidean-2 disk", euclidean(2), Domain::wulff(1.0), true},
        {"euclidean-3 ball", euclidean(3), Domain::wulff(1.0), true},
        {"l4-2 Wulff", l4(2), Domain::wulff(1.3), true},
        {"l4-3 Wulff", l4(3), Domain::wulff(1.0), true},
        {"f_eps-2 Wulff", FinslerInstance::minkowski(normalize(MinkowskiNorm::f_eps_fiber(2, 1.0))), Domain::wulff(1.0), true},
        {"euclidean-2 rectangle 2x1", euclidean(2), Domain::box({1.0, 0.5}), false},
        {"euclidean-2 ellipse (2,1)", euclidean(2), Domain::ellipsoid({2.0, 1.0}), false},
        {"l4-2 ellipse (2,1)", l4(2), Domain::ellipsoid({2.0, 1.0}), false},
        {"euclidean-3 box", euclidean(3), Domain::box({1.0, 0.5, 0.25}), false},
    };
    json out = json::array();
    for (const Iso& c : cases) {
        const InequalityReport rep = timed(r, c.name, [&] { return verify_isoperimetric(c.m, c.omega); });
        const bool ok = c.equality ? std::abs(rep.ratio - 1.0) <= 1e-3 : (rep.pass && rep.ratio > 1.0 + 1e-6);
        r.pass = r.pass && ok;
        out.push_back({{"case", c.name}, {"domain", c.omega.descriptor()}, {"ratio", rep.ratio},
                       {"equality_expected", c.equality}, {"pass", ok}});
    }
    r.details = {{"cases", out}};
    r.summary = std::to_string(cases.size()) + " domains, Wulff equality and strict cases checked";
    return r;
}

CriterionResult criterion_avr(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "F_eps AVR sandwich";
    r.pass = true;
    json out = json::array();
    for (double eps : cfg.avr_eps) {
        for (int n : cfg.avr_dims) {
            const FinslerInstance m = FinslerInstance::f_eps(n, eps);
            AvrOptions o;
            o.ball.force_monte_carlo = true;
            o.ball.samples = cfg.avr_samples;
            o.ball.seed = kernels::block_seed(cfg.seed, static_cast<std::uint64_t>(100 * n + std::lround(10 * eps)));
            o.throw_on_violation = false;
            const Vec x0(n, 0.0);
            const AvrEstimate e = timed(r, "avr eps=" + format_double(eps) + " n=" + std::to_string(n),
                                        [&] { return avr(m, x0, cfg.avr_radii, o); });
            const double lo = std::pow(1.0 + eps, -0.5 * n);
            const bool inside = e.point + 3.0 * e.std_error >= lo && e.point - 3.0 * e.std_error <= 1.0;
            const bool ok = inside && e.curve.bishop_gromov;
            r.pass = r.pass && ok;
            out.push_back({{"eps", eps},
                           {"n", n},
                           {"estimate", e.point},
                           {"std_error", e.std_error},
                           {"interval", {lo, 1.0}},
                           {"ratios", e.curve.ratios},
                           {"ratio_errors", e.curve.ratio_errors},
                           {"bishop_gromov", e.curve.bishop_gromov},
                           {"pass", ok}});
        }
    }
    r.details = {{"cases", out}, {"samples", cfg.avr_samples}, {"radii", cfg.avr_radii}};
    r.summary = std::to_string(out.size()) + " (eps, n) pairs inside the sandwich with monotone ratio curves";
    return r;
}

struct MpCase {
    int n;
    double R, mu, lambda, q;
};

CriterionResult criterion_mountain_pass(const ReproConfig& cfg) {
    CriterionResult r;
    r.title = "Mountain-pass solver and multiplicity";
    r.pass = true;
    const std::vector<MpCase> sets = {{3, 1.0, 0.0, 0.0, 3.0}, {2, 1.0, 0.0, 1.0, 4.0},  {3, 1.0, 0.1, 0.0, 4.0},
                                      {4, 2.0, 0.5, -1.0, 3.0}, {2, 0.5, 0.0, -2.0, 6.0}, {3, 2.0, 0.2, 2.0, 5.0}};
    json solutions = json::array();
    double worst = 0.0;
    for (const MpCase& c : sets) {
        pde::RadialBvp bvp;
        bvp.n = c.n;
        bvp.radius = c.R;
        bvp.mu = c.mu;
        bvp.lambda = c.lambda;
        bvp.nonlinearity = pde::Nonlinearity::power(c.q);
        const std::string task = "mp n=" + std::to_string(c.n) + " q=" + format_double(c.q);
        const pde::MountainPass mp = timed(r, task, [&] { return pde::mountain_pass_solve(bvp); });
        const pde::CoercivityCheck cc = timed(r, task + " coercivity", [&] { return pde::coercivity_check(bvp, 50, cfg.seed); });
        const bool ok = mp.energy.residual < 1e-6 && mp.min_value >= -1e-10 && mp.energy_level > 0.0 && cc.pass;
        r.pass = r.pass && ok;
        worst = std::max(worst, mp.energy.residual);
        json j = mp.to_json();
        j["bvp"] = bvp.descriptor();
        j["coercivity"] = cc.to_json();
        j["pass"] = ok;
        solutions.push_back(j);
    }
    pde::RadialBvp d;
    d.n = 2;
    d.p = 4.0;
    d.radius = 1.0;
    d.lambda = cfg.multiplicity_lambda;
    d.nonlinearity = pde::Nonlinearity::oscillatory(4.0);
    pde::MultiplicityOptions mo;
    mo.k_max = cfg.multiplicity_k_max;
    const pde::MultiplicityResult mr = timed(r, "multiplicity", [&] { return pde::multiplicity_explore(d, mo); });
    int nonzero = 0;
    for (const auto& p : mr.profiles) nonzero += p.zero ? 0 : 1;
    r.warning = nonzero < 3;
    json mj = mr.to_json();
    mj["bvp"] = d.descriptor();
    r.details = {{"solutions", solutions}, {"multiplicity", mj}};
    r.summary = "6 solutions, max residual " + format_double(worst) + "; " + std::to_string(nonzero) +
                " distinct critical profiles" + (r.warning ? " (warning: fewer than 3)" : "");
    return r;
}

}  // namespace

json parse_descriptor(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\n");
    if (first == std::string::npos) throw ConfigError("empty descriptor");
    if (text[first] == '{') {
        try {
            return json::parse(text);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("descriptor: ") + e.what());
        }
    }
    const std::vector<std::string> parts = split(text, ':');
    json d{{"kind", parts.front()}};
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("descriptor: expected key=value, got '" + parts[i] + "'");
        d[parts[i].substr(0, eq)] = parse_scalar(parts[i].substr(eq + 1));
    }
    return d;
}

json parse_instance_descriptor(const std::string& text) {
    json d = parse_descriptor(text);
    if (d.value("kind", "") != "minkowski" || (d.contains("norm") && d["norm"].is_object())) return d;
    json norm = json::object();
    if (d.contains("norm")) norm["kind"] = d["norm"];
    for (const char* k : {"p", "eps", "scale", "matrix"}) {
        if (d.contains(k)) {
            norm[k] = d[k];
            d.erase(k);
        }
    }
    if (d.contains("n")) norm["n"] = d["n"];
    d["norm"] = norm;
    return d;
}

Schedule parse_schedule(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("schedule: expected NAME=spec, got '" + text + "'");
    Schedule s;
    s.variable = text.substr(0, eq);
    const std::string spec = text.substr(eq + 1);
    auto num = [&](const std::string& v) {
        const json j = parse_scalar(v);
        if (!j.is_number()) throw ConfigError("schedule: '" + v + "' is not a number");
        return j.get<double>();
    };
    if (spec.find(':') == std::string::npos) {
        for (const std::string& v : split(spec, ',')) s.values.push_back(num(v));
    } else {
        const std::vector<std::string> p = split(spec, ':');
        if (p.size() < 3 || p.size() > 4) throw ConfigError("schedule: expected lo:hi:kind[:count]");
        const double lo = num(p[0]), hi = num(p[1]);
        if (!(hi > lo)) throw ConfigError("schedule: needs hi > lo");
        if (p[2] == "geometric") {
            if (!(lo > 0.0)) throw ConfigError("schedule: geometric needs lo > 0");
            if (p.size() == 4) {
                const int count = static_cast<int>(num(p[3]));
                if (count < 2) throw ConfigError("schedule: count must be >= 2");
                for (int i = 0; i < count; ++i) s.values.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
            } else {
                for (double v = lo; v <= hi * (1.0 + 1e-12); v *= 2.0) s.values.push_back(v);
            }
        } else if (p[2] == "linear") {
            if (p.size() != 4) throw ConfigError("schedule: linear needs a count");
            const int count = static_cast<int>(num(p[3]));
            if (count < 2) throw ConfigError("schedule: count must be >= 2");
            for (int i = 0; i < count; ++i) s.values.push_back(lo + (hi - lo) * i / (count - 1));
        } else {
            throw ConfigError("schedule: unknown spacing '" + p[2] + "'");
        }
    }
    if (s.values.empty()) throw ConfigError("schedule: no values");
    return s;
}

ReproConfig ReproConfig::from_json(const json& d) {
    if (!d.is_object()) throw ConfigError("config must be a JSON object");
    if (d.empty()) throw ConfigError("config is empty");
    static const std::vector<std::string> keys = {"seed",         "threads",        "cases",
                                                  "criteria",     "sweep",          "hardy_deltas",
                                                  "avr",          "multiplicity",   "case_budget",
                                                  "runtime_budget"};
    for (const auto& [k, _] : d.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("config: unknown key '" + k + "'");
    ReproConfig c;
    try {
        c.seed = d.value("seed", c.seed);
        c.threads = d.value("threads", c.threads);
        c.cases = d.value("cases", c.cases);
        c.criteria = d.value("criteria", c.criteria);
        c.sweep = d.value("sweep", c.sweep);
        c.hardy_deltas = d.value("hardy_deltas", c.hardy_deltas);
        c.case_budget = d.value("case_budget", c.case_budget);
        c.runtime_budget = d.value("runtime_budget", c.runtime_budget);
        if (d.contains("avr")) {
            const json& a = d["avr"];
            for (const auto& [k, _] : a.items())
                if (k != "eps" && k != "dims" && k != "radii" && k != "samples")
                    throw ConfigError("config: unknown key 'avr." + k + "'");
            c.avr_eps = a.value("eps", c.avr_eps);
            c.avr_dims = a.value("dims", c.avr_dims);
            c.avr_radii = a.value("radii", c.avr_radii);
            c.avr_samples = a.value("samples", c.avr_samples);
        }
        if (d.contains("multiplicity")) {
            const json& m = d["multiplicity"];
            for (const auto& [k, _] : m.items())
                if (k != "lambda" && k != "k_max") throw ConfigError("config: unknown key 'multiplicity." + k + "'");
            c.multiplicity_lambda = m.value("lambda", c.multiplicity_lambda);
            c.multiplicity_k_max = m.value("k_max", c.multiplicity_k_max);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.cases < 1) throw ConfigError("config: cases must be positive");
    for (int id : c.criteria)
        if (id < 1 || id > 12) throw ConfigError("config: criteria are numbered 1-12");
    parse_schedule(c.sweep);
    return c;
}

json ReproConfig::to_json() const {
    return {{"seed", seed},
            {"threads", threads},
            {"cases", cases},
            {"criteria", criteria},
            {"sweep", sweep},
            {"hardy_deltas", hardy_deltas},
            {"avr", {{"eps", avr_eps}, {"dims", avr_dims}, {"radii", avr_radii}, {"samples", avr_samples}}},
            {"multiplicity", {{"lambda", multiplicity_lambda}, {"k_max", multiplicity_k_max}}},
            {"case_budget", case_budget},
            {"runtime_budget", runtime_budget}};
}

json CriterionResult::to_json() const {
    return {{"criterion", id}, {"title", title}, {"pass", pass}, {"warning", warning}, {"summary", summary},
            {"details", details}};
}

CriterionResult run_criterion(int id, const ReproConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        switch (id) {
            case 1: r = criterion_morrey_equality(cfg); break;
            case 2: r = criterion_support_sweep(cfg); break;
            case 3: r = criterion_l1(cfg); break;
            case 4: r = criterion_special(cfg); break;
            case 5: r = criterion_eigen(cfg); break;
            case 6: r = criterion_bpv(cfg); break;
            case 7: r = criterion_hardy(cfg); break;
            case 8: r = criterion_rearrangement(cfg); break;
            case 9: r = criterion_isoperimetric(cfg); break;
            case 10: r = criterion_avr(cfg); break;
            case 11: r = criterion_mountain_pass(cfg); break;
            default: throw DomainError("run_criterion: criterion " + std::to_string(id) + " is not standalone");
        }
    } catch (const NumericalError& e) {
        r.pass = false;
        r.summary = std::string("numerical failure: ") + e.what();
        r.details = {{"error", e.what()}, {"type", "numerical"}};
    } catch (const DataError& e) {
        r.pass = false;
        r.summary = std::string("data failure: ") + e.what();
        r.details = {{"error", e.what()}, {"type", "data"}};
    }
    r.id = id;
    r.seconds = seconds_since(t0);
    return r;
}

bool ReproResult::pass() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

json ReproResult::report() const {
    json j{{"schema", 1}, {"config", config.to_json()}, {"pass", pass()}};
    json list = json::array();
    for (const auto& c : criteria) list.push_back(c.to_json());
    j["criteria"] = list;
    return j;
}

std::string ReproResult::summary_csv() const {
    std::ostringstream out;
    out << "criterion,title,pass,warning,summary\n";
    for (const auto& c : criteria) {
        std::string s = c.summary;
        std::replace(s.begin(), s.end(), '"', '\'');
        out << c.id << ",\"" << c.title << "\"," << (c.pass ? "true" : "false") << ',' << (c.warning ? "true" : "false")
            << ",\"" << s << "\"\n";
    }
    return out.str();
}

std::string ReproResult::timing_csv() const {
    std::ostringstream out;
    out << "criterion,task,seconds\n";
    for (const auto& c : criteria) {
        for (const auto& [task, s] : c.timings) out << c.id << ",\"" << task << "\"," << format_double(s) << '\n';
        out << c.id << ",total," << format_double(c.seconds) << '\n';
    }
    out << "all,total," << format_double(seconds) << '\n';
    return out.str();
}

ReproResult run_repro(const ReproConfig& cfg, const std::function<void(const CriterionResult&)>& progress) {
    if (cfg.threads > 0) kernels::set_threads(cfg.threads);
    ReproResult out;
    out.config = cfg;
    const auto t0 = std::chrono::steady_clock::now();
    bool want12 = false;
    for (int id : cfg.criteria) {
        if (id == 12) {
            want12 = true;
            continue;
        }
        CriterionResult r = run_criterion(id, cfg);
        if (progress) progress(r);
        out.criteria.push_back(std::move(r));
    }
    const double elapsed = seconds_since(t0);
    if (want12) {
        const auto t1 = std::chrono::steady_clock::now();
        CriterionResult r;
        r.id = 12;
        r.title = "Reproducibility";
        bool identical = true;
        json reruns = json::array();
        for (int id : {1, 4, 5}) {
            const auto first = std::find_if(out.criteria.begin(), out.criteria.end(),
                                            [id](const CriterionResult& c) { return c.id == id; });
            const std::string a = dump_report(first != out.criteria.end() ? first->to_json() : run_criterion(id, cfg).to_json());
            const std::string b = dump_report(run_criterion(id, cfg).to_json());
            identical = identical && a == b;
            reruns.push_back({{"criterion", id}, {"identical", a == b}});
        }
        const bool covered = out.criteria.size() == 11;
        const bool fast = elapsed < cfg.runtime_budget;
        r.pass = identical && fast;
        r.details = {{"reruns", reruns}, {"all_criteria_run", covered}, {"within_budget", fast},
                     {"budget_seconds", cfg.runtime_budget}};
        r.summary = std::string("reruns ") + (identical ? "byte-identical" : "DIFFER") + ", runtime " +
                    (fast ? "within" : "OVER") + " budget";
        r.timings.emplace_back("criteria 1-11", elapsed);
        r.seconds = seconds_since(t1);
        if (progress) progress(r);
        out.criteria.push_back(std::move(r));
    }
    out.seconds = seconds_since(t0);
    return out;
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

}  // namespace finsler
