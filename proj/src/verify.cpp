#include "finsler/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/kernels.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

void require_flat(const FinslerInstance& m, const char* what) {
    if (!m.x_independent())
        throw DomainError(std::string(what) + ": needs an x-independent instance (curved F_eps supplies AVR intervals only)");
}

double instance_avr(const FinslerInstance& m) {
    const auto a = m.exact_avr();
    if (!a) throw DomainError("AVR of the instance is not known exactly");
    return *a;
}

void require_morrey(double p, int n) {
    if (!(p > n)) throw DomainError("Morrey bounds require p > n");
    if (n < 2) throw DomainError("Morrey bounds require n >= 2");
}

nlohmann::json base_parameters(const FinslerInstance& m, const RadialFunction& u, double p) {
    nlohmann::json j = {{"p", p}, {"n", m.dim()}, {"instance", m.descriptor()}, {"profile", u.profile.descriptor()},
                        {"center", u.center}};
    if (u.shape) j["shape"] = u.shape->descriptor();
    return j;
}

std::vector<double> ratios_of(const std::vector<double>& grid) {
    std::vector<double> r;
    for (std::size_t i = 1; i < grid.size(); ++i) r.push_back(grid[i] / grid[i - 1]);
    return r;
}

double grid_ratio(const std::vector<double>& grid) {
    const auto r = ratios_of(grid);
    return r.empty() ? 1.0 : r.back();
}

bool close(double value, double target, double tol) { return std::abs(value - target) <= tol * std::abs(target); }

}  // namespace

InequalityReport verify_morrey_support(const FinslerInstance& m, const RadialFunction& u, double p) {
    require_flat(m, "verify_morrey_support");
    const int n = m.dim();
    require_morrey(p, n);
    const double avr = instance_avr(m);
    InequalityReport rep;
    rep.id = "morrey-support";
    rep.direction = InequalityReport::Direction::upper;
    rep.parameters = base_parameters(m, u, p);
    rep.parameters["avr"] = avr;
    const RadialLevelSets sets(u.profile, level_set_growth(m, u));
    const RadialIntegral e = source_energy(u, m, p);
    const double vol = sets.support_volume();
    rep.reference = constants::morrey_support(p, n, avr);
    rep.lhs = sets.sup();
    rep.rhs = rep.reference * std::pow(vol, 1.0 / n - 1.0 / p) * std::pow(e.value, 1.0 / p);
    rep.divergent = e.divergent;
    rep.diagnostics = {{"support_volume", vol}, {"energy", e.value}, {"energy_error", e.error}};
    rep.evaluate();
    return rep;
}

InequalityReport verify_morrey_l1(const FinslerInstance& m, const RadialFunction& u, double p) {
    require_flat(m, "verify_morrey_l1");
    const int n = m.dim();
    require_morrey(p, n);
    const double avr = instance_avr(m);
    InequalityReport rep;
    rep.id = "morrey-l1";
    rep.direction = InequalityReport::Direction::upper;
    rep.parameters = base_parameters(m, u, p);
    rep.parameters["avr"] = avr;
    const double eta = constants::eta(p, n);
    const RadialIntegral e = source_energy(u, m, p);
    const double l1 = source_lq_norm(u, m, 1.0);
    rep.reference = constants::morrey_l1(p, n, avr);
    rep.lhs = source_lq_norm(u, m, HUGE_VAL);
    rep.rhs = rep.reference * std::pow(l1, 1.0 - eta) * std::pow(e.value, eta / p);
    rep.divergent = e.divergent;
    rep.diagnostics = {{"l1_norm", l1}, {"energy", e.value}, {"energy_error", e.error}, {"eta", eta}};
    rep.evaluate();
    return rep;
}

SweepResult sharpness_sweep_support(const FinslerInstance& m, double p, std::span<const double> radii) {
    require_flat(m, "sharpness_sweep_support");
    const int n = m.dim();
    require_morrey(p, n);
    if (radii.empty()) throw DomainError("sharpness sweep: empty R grid");
    const double avr = instance_avr(m);
    SweepResult s;
    s.id = "morrey-support-sweep";
    s.variable = "R";
    s.parameters = {{"p", p}, {"n", n}, {"avr", avr}, {"instance", m.descriptor()}, {"family", "morrey_extremal"}};
    s.grid.assign(radii.begin(), radii.end());
    s.target = constants::sharpness_limits(p, n, avr).support_energy;
    s.constant_target = constants::morrey_support(p, n, avr);
    Vec x0(n, 0.0);
    for (double r : s.grid) {
        const RadialFunction u{profiles::morrey_extremal(p, n, r), x0, std::nullopt};
        const InequalityReport rep = verify_morrey_support(m, u, p);
        const double energy = rep.diagnostics["energy"].get<double>();
        const double vol = rep.diagnostics["support_volume"].get<double>();
        s.lhs.push_back(rep.lhs);
        s.rhs.push_back(rep.rhs);
        s.ratio.push_back(rep.ratio);
        s.scaled.push_back(std::pow(r, p - n) * energy);
        s.inferred.push_back(rep.lhs / (std::pow(vol, 1.0 / n - 1.0 / p) * std::pow(energy, 1.0 / p)));
    }
    const double q = grid_ratio(s.grid);
    std::tie(s.limit, s.order) = extrapolate(s.scaled, q);
    s.constant_limit = extrapolate(s.inferred, q).first;
    s.extrapolated = s.grid.size() >= 3;
    s.pass = close(s.limit, s.target, s.tolerance) && close(s.constant_limit, s.constant_target, s.tolerance);
    return s;
}

SweepResult sharpness_sweep_l1(const FinslerInstance& m, double p, std::span<const double> radii) {
    require_flat(m, "sharpness_sweep_l1");
    const int n = m.dim();
    require_morrey(p, n);
    if (radii.empty()) throw DomainError("sharpness sweep: empty R grid");
    const double avr = instance_avr(m);
    const auto lim = constants::sharpness_limits(p, n, avr);
    SweepResult s;
    s.id = "morrey-l1-sweep";
    s.variable = "R";
    s.parameters = {{"p", p}, {"n", n}, {"avr", avr}, {"instance", m.descriptor()}, {"family", "talenti_l1_extremal"}};
    s.grid.assign(radii.begin(), radii.end());
    s.target = lim.l1_energy;
    s.constant_target = constants::morrey_l1(p, n, avr);
    const double eta = constants::eta(p, n);
    std::vector<double> mass_scaled, sups;
    Vec x0(n, 0.0);
    for (double r : s.grid) {
        const RadialFunction u{profiles::talenti_l1_extremal(p, n, r), x0, std::nullopt};
        const InequalityReport rep = verify_morrey_l1(m, u, p);
        const double energy = rep.diagnostics["energy"].get<double>();
        const double l1 = rep.diagnostics["l1_norm"].get<double>();
        s.lhs.push_back(rep.lhs);
        s.rhs.push_back(rep.rhs);
        s.ratio.push_back(rep.ratio);
        s.scaled.push_back(std::pow(r, p - n) * energy);
        mass_scaled.push_back(std::pow(r, -n) * l1);
        sups.push_back(rep.lhs);
        s.inferred.push_back(rep.lhs / (std::pow(l1, 1.0 - eta) * std::pow(energy, eta / p)));
    }
    const double q = grid_ratio(s.grid);
    std::tie(s.limit, s.order) = extrapolate(s.scaled, q);
    const double mass_limit = extrapolate(mass_scaled, q).first;
    s.constant_limit = extrapolate(s.inferred, q).first;
    s.extrapolated = s.grid.size() >= 3;
    double sup_error = 0.0;
    for (double v : sups) sup_error = std::max(sup_error, std::abs(v - lim.l1_sup) / lim.l1_sup);
    s.extra = {{"mass_scaled", mass_scaled},  {"mass_limit", mass_limit}, {"mass_target", lim.l1_mass},
               {"sup", sups},                 {"sup_target", lim.l1_sup}, {"sup_max_relative_error", sup_error},
               {"identity_residual", 1.0 - eta + eta / p - eta / n}};
    s.pass = close(s.limit, s.target, s.tolerance) && close(mass_limit, lim.l1_mass, s.tolerance) &&
             close(s.constant_limit, s.constant_target, s.tolerance) && sup_error <= 1e-9;
    return s;
}

InequalityReport verify_hardy(const FinslerInstance& m, const RadialFunction& u, double p, std::span<const double> x0) {
    require_flat(m, "verify_hardy");
    const int n = m.dim();
    if (!(p > 1.0 && p < n)) throw DomainError("Hardy inequality requires n > p > 1");
    const double avr = instance_avr(m);
    InequalityReport rep;
    rep.id = "hardy";
    rep.direction = InequalityReport::Direction::lower;
    rep.parameters = base_parameters(m, u, p);
    rep.parameters["avr"] = avr;
    rep.parameters["x0"] = Vec(x0.begin(), x0.end());
    const RadialIntegral e = source_energy(u, m, p);
    const RadialIntegral w = weighted_power_integral(u, m, Weight::power(-p), p, x0);
    rep.reference = constants::hardy(p, n, avr);
    rep.lhs = e.value;
    rep.rhs = rep.reference * w.value;
    rep.divergent = e.divergent;
    if (w.divergent && !e.divergent) {
        rep.pass = false;
        rep.ratio = 0.0;
        rep.diagnostics = {{"error", "singular integral diverges while the energy is finite"}};
        return rep;
    }
    rep.diagnostics = {{"energy_error", e.error}, {"singular_integral", w.value}, {"singular_error", w.error}};
    rep.evaluate();
    return rep;
}

double hardy_family_cap(double delta) { return std::exp(1.0 / delta); }

SweepResult hardy_near_extremal(const FinslerInstance& m, double p, std::span<const double> deltas) {
    const int n = m.dim();
    SweepResult s;
    s.id = "hardy-near-extremal";
    s.variable = "delta";
    s.parameters = {{"p", p}, {"n", n}, {"instance", m.descriptor()}, {"family", "hardy_cap"}, {"cap", "exp(1/delta)"}};
    s.grid.assign(deltas.begin(), deltas.end());
    s.target = 1.0;
    Vec x0(n, 0.0);
    bool all_hold = true;
    for (double d : s.grid) {
        const RadialFunction u{profiles::hardy_cap(p, n, d, hardy_family_cap(d)), x0, std::nullopt};
        const InequalityReport rep = verify_hardy(m, u, p, x0);
        all_hold = all_hold && rep.pass;
        s.lhs.push_back(rep.lhs);
        s.rhs.push_back(rep.rhs);
        s.ratio.push_back(rep.ratio);
        s.scaled.push_back(rep.rhs / rep.lhs);
        s.inferred.push_back(rep.reference * rep.lhs / rep.rhs);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < s.grid.size(); ++i) {
        const bool finer = s.grid[i] < s.grid[i - 1];
        monotone = monotone && (finer ? s.scaled[i] > s.scaled[i - 1] : s.scaled[i] < s.scaled[i - 1]);
    }
    s.limit = s.scaled.empty() ? 0.0 : s.scaled.back();
    s.constant_target = constants::hardy(p, n, instance_avr(m));
    s.constant_limit = s.inferred.empty() ? 0.0 : s.inferred.back();
    s.extrapolated = false;
    s.extra = {{"monotone", monotone}, {"all_hold", all_hold}};
    s.pass = monotone && all_hold;
    return s;
}

InequalityReport verify_bpv(const FinslerInstance& m, double radius, const RadialFunction& u, double mu,
                            std::span<const double> x0) {
    require_flat(m, "verify_bpv");
    const int n = m.dim();
    if (!(radius > 0.0)) throw DomainError("verify_bpv: radius must be positive");
    if (u.shape && u.shape->descriptor() != m.norm().descriptor())
        throw DomainError("verify_bpv: u must be radial in the instance norm");
    if (x0.size() != static_cast<std::size_t>(n) || u.center.size() != static_cast<std::size_t>(n))
        throw DomainError("verify_bpv: point dimension mismatch");
    const double avr = instance_avr(m);
    Vec offset(n);
    for (int i = 0; i < n; ++i) offset[i] = u.center[i] - x0[i];
    if (m.norm()(offset) + u.profile.support > radius * (1.0 + 1e-12))
        throw DomainError("verify_bpv: u is not supported in the Wulff ball");
    const double volume = constants::omega(n) * std::pow(radius, n);
    const auto c = constants::bpv(mu, n, avr, volume);
    InequalityReport rep;
    rep.id = "bpv";
    rep.direction = InequalityReport::Direction::lower;
    rep.parameters = base_parameters(m, u, 2.0);
    rep.parameters["avr"] = avr;
    rep.parameters["mu"] = mu;
    rep.parameters["radius"] = radius;
    rep.parameters["x0"] = Vec(x0.begin(), x0.end());
    const RadialIntegral e = source_energy(u, m, 2.0);
    RadialIntegral w;
    if (mu > 0.0) w = weighted_power_integral(u, m, Weight::power(-2.0), 2.0, x0);
    const double l2 = std::pow(source_lq_norm(u, m, 2.0), 2);
    rep.reference = c.value;
    rep.lhs = e.value - mu * w.value;
    rep.rhs = c.value * l2;
    rep.divergent = e.divergent;
    rep.diagnostics = {{"energy", e.value}, {"hardy_term", w.value}, {"l2_squared", l2},
                       {"mu_bar", c.mu_bar}, {"j_mu_bar", c.j_mu_bar}, {"rayleigh_quotient", rep.lhs / l2}};
    rep.evaluate();
    return rep;
}

Domain Domain::wulff(double radius, std::optional<MinkowskiNorm> norm) {
    if (!(radius > 0.0)) throw DomainError("Domain: radius must be positive");
    Domain d;
    d.kind = Kind::wulff;
    d.radius = radius;
    d.norm = std::move(norm);
    return d;
}

Domain Domain::ball(double radius) {
    Domain d = wulff(radius);
    d.kind = Kind::ball;
    return d;
}

Domain Domain::ellipsoid(std::vector<double> semi_axes) {
    for (double a : semi_axes)
        if (!(a > 0.0)) throw DomainError("Domain: semi-axes must be positive");
    Domain d;
    d.kind = Kind::ellipsoid;
    d.axes = std::move(semi_axes);
    return d;
}

Domain Domain::box(std::vector<double> half_widths) {
    Domain d = ellipsoid(std::move(half_widths));
    d.kind = Kind::box;
    return d;
}

nlohmann::json Domain::descriptor() const {
    switch (kind) {
        case Kind::wulff: {
            nlohmann::json j = {{"kind", "wulff"}, {"radius", radius}};
            if (norm) j["norm"] = norm->descriptor();
            return j;
        }
        case Kind::ball: return {{"kind", "ball"}, {"radius", radius}};
        case Kind::ellipsoid: return {{"kind", "ellipsoid"}, {"axes", axes}};
        case Kind::box: return {{"kind", "box"}, {"axes", axes}};
    }
    return {};
}

Domain domain_from_descriptor(const nlohmann::json& d) {
    if (!d.is_object() || !d.contains("kind") || !d["kind"].is_string())
        throw ConfigError("domain descriptor: missing string 'kind'");
    const std::string kind = d["kind"].get<std::string>();
    for (auto it = d.begin(); it != d.end(); ++it) {
        const std::string& k = it.key();
        if (k != "kind" && k != "radius" && k != "axes" && k != "norm")
            throw ConfigError("domain descriptor: unknown key '" + k + "'");
    }
    try {
        if (kind == "wulff") {
            std::optional<MinkowskiNorm> norm;
            if (d.contains("norm")) norm = norm_from_descriptor(d["norm"]);
            return Domain::wulff(d.value("radius", 1.0), norm);
        }
        if (kind == "ball") return Domain::ball(d.value("radius", 1.0));
        if (kind == "ellipsoid" || kind == "ellipse") return Domain::ellipsoid(d.at("axes").get<std::vector<double>>());
        if (kind == "box" || kind == "rectangle") return Domain::box(d.at("axes").get<std::vector<double>>());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("domain descriptor: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("domain descriptor: ") + e.what());
    }
    throw ConfigError("domain descriptor: unsupported shape '" + kind + "'");
}

InequalityReport verify_isoperimetric(const FinslerInstance& m, const Domain& omega) {
    require_flat(m, "verify_isoperimetric");
    const int n = m.dim();
    if (n < 2) throw DomainError("verify_isoperimetric: requires n >= 2");
    const MinkowskiNorm& h = m.norm();
    const double avr = instance_avr(m);
    const double w = constants::omega(n);
    const double sigma = w / wulff_volume(h).value;
    double perimeter = 0.0, volume = 0.0;
    bool wulff_of_instance = false;
    if (omega.kind == Domain::Kind::box) {
        if (omega.axes.size() != static_cast<std::size_t>(n)) throw DomainError("box: need one half-width per axis");
        double total = 1.0;
        for (double a : omega.axes) total *= 2.0 * a;
        volume = sigma * total;
        for (int i = 0; i < n; ++i) {
            Vec e(n, 0.0);
            e[i] = 1.0;
            const double face = total / (2.0 * omega.axes[i]);
            perimeter += 2.0 * face * dual_norm(h, e);
        }
        perimeter *= sigma;
    } else {
        // Wulff shape {K < R}: area element of the radial graph gives
        // P = R^{n-1} sigma int_S H*(DK) K^{-n}, i.e. energy_factor with p = 1.
        MinkowskiNorm k = h;
        double r = omega.radius;
        double base_volume = 0.0;
        if (omega.kind == Domain::Kind::wulff) {
            if (omega.norm) {
                if (omega.norm->dim() != n) throw DomainError("wulff domain: norm dimension mismatch");
                k = *omega.norm;
            }
            wulff_of_instance = k.descriptor() == h.descriptor();
            base_volume = wulff_of_instance ? w / sigma : wulff_volume(k).value;
        } else if (omega.kind == Domain::Kind::ball) {
            k = MinkowskiNorm::euclidean(n);
            base_volume = w;
        } else {
            if (omega.axes.size() != static_cast<std::size_t>(n)) throw DomainError("ellipsoid: need one semi-axis per axis");
            std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
            base_volume = w;
            for (int i = 0; i < n; ++i) {
                inv[i * n + i] = 1.0 / omega.axes[i];
                base_volume *= omega.axes[i];
            }
            k = MinkowskiNorm::linear_image(n, inv, 2.0);
            r = 1.0;
        }
        volume = sigma * base_volume * std::pow(r, n);
        perimeter = std::pow(r, n - 1) * energy_factor(h, k, 1.0);
    }
    InequalityReport rep;
    rep.id = "isoperimetric";
    rep.direction = InequalityReport::Direction::lower;
    rep.parameters = {{"n", n}, {"avr", avr}, {"instance", m.descriptor()}, {"domain", omega.descriptor()}};
    rep.reference = n * std::pow(w * avr, 1.0 / n);
    rep.lhs = perimeter;
    rep.rhs = rep.reference * std::pow(volume, (n - 1.0) / n);
    rep.evaluate();
    rep.diagnostics = {{"perimeter", perimeter},
                       {"volume", volume},
                       {"equality_expected", wulff_of_instance},
                       {"equality_attained", std::abs(rep.ratio - 1.0) <= 1e-3}};
    return rep;
}

std::string to_string(SuiteKind kind) {
    switch (kind) {
        case SuiteKind::morrey_support: return "morrey-support";
        case SuiteKind::morrey_l1: return "morrey-l1";
        case SuiteKind::hardy: return "hardy";
        case SuiteKind::bpv: return "bpv";
        case SuiteKind::polya_szego: return "polya-szego";
        case SuiteKind::hlp: return "hlp";
        case SuiteKind::layer_cake: return "layer-cake";
        case SuiteKind::equimeasurability: return "equimeasurability";
    }
    return "unknown";
}

SuiteKind suite_kind_from_string(const std::string& name) {
    for (SuiteKind k : {SuiteKind::morrey_support, SuiteKind::morrey_l1, SuiteKind::hardy, SuiteKind::bpv,
                        SuiteKind::polya_szego, SuiteKind::hlp, SuiteKind::layer_cake, SuiteKind::equimeasurability})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown suite '" + name + "'");
}

nlohmann::json SuiteSummary::to_json() const {
    nlohmann::json j = {{"suite", to_string(kind)}, {"instance", instance}, {"cases", cases},
                        {"failures", failures},     {"worst_margin", worst_margin}, {"pass", pass()},
                        {"seed", seed},             {"workers", workers}};
    nlohmann::json f = nlohmann::json::array();
    for (const auto& r : failed) f.push_back(r.to_json());
    j["failed"] = f;
    return j;
}

namespace {

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    double uni(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
    bool coin(double prob) { return rng_.uniform() < prob; }
    std::uint64_t next() { return rng_.next(); }
    int pick(int count) { return static_cast<int>(rng_.next() % static_cast<std::uint64_t>(count)); }

private:
    kernels::SplitMix64 rng_;
};

Vec random_direction(Draw& d, int n) {
    Vec v(n);
    double s = 0.0;
    do {
        s = 0.0;
        for (double& x : v) {
            x = d.uni(-1.0, 1.0);
            s += x * x;
        }
    } while (s < 1e-4 || s > 1.0);
    for (double& x : v) x /= std::sqrt(s);
    return v;
}

/// A point at H-distance `dist` from the origin in a random direction.
Vec point_at(Draw& d, const MinkowskiNorm& h, double dist) {
    Vec v = random_direction(d, h.dim());
    const double scale = dist / h(v);
    for (double& x : v) x *= scale;
    return v;
}

MinkowskiNorm random_shape(Draw& d, int n) {
    switch (d.pick(4)) {
        case 0: return MinkowskiNorm::lp(n, 1.0);
        case 1: return MinkowskiNorm::lp(n, HUGE_VAL);
        case 2: return MinkowskiNorm::lp(n, d.uni(1.2, 6.0));
        default: {
            std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
            for (int i = 0; i < n; ++i) {
                a[i * n + i] = d.uni(0.5, 2.0);
                for (int j = i + 1; j < n; ++j) a[i * n + j] = d.uni(-0.5, 0.5);
            }
            return MinkowskiNorm::linear_image(n, a, 2.0);
        }
    }
}

/// Off-centre and cross-norm functions are evaluated where an independent
/// multi-dimensional quadrature exists.
bool offcentre_ok(const FinslerInstance& m) {
    const MinkowskiNorm& h = m.norm();
    return m.dim() == 2 || (m.dim() == 3 && h.kind() == NormKind::euclidean && h.scale() == 1.0);
}

bool cross_ok(const FinslerInstance& m) { return m.dim() == 2 && m.norm().has_analytic_dual(); }

double margin_of(const InequalityReport& r) {
    const double scale = std::max(std::abs(r.rhs), 1e-300);
    if (r.divergent) return 0.0;
    switch (r.direction) {
        case InequalityReport::Direction::upper: return (r.rhs - r.lhs) / scale;
        case InequalityReport::Direction::lower: return (r.lhs - r.rhs) / scale;
        case InequalityReport::Direction::equal: return -std::abs(r.lhs - r.rhs) / scale;
    }
    return 0.0;
}

/// Independent lhs of the layer-cake identity: direction-by-direction radial quadrature.
double polar_ball_integral(const FinslerInstance& m, const std::function<double(double)>& f, double left_power,
                           double radius) {
    const MinkowskiNorm& h = m.norm();
    const int n = m.dim();
    const double sigma = constants::omega(n) / wulff_volume(h).value;
    quad::Options o;
    o.abs_tol = 0.0;
    o.rel_tol = 1e-12;
    o.left_power = std::min(0.0, left_power + n - 1);
    auto ray = [&](std::span<const double> theta) {
        const double ht = h(theta);
        return quad::integrate([&](double r) { return f(r * ht) * std::pow(r, n - 1); }, 0.0, radius / ht, o).value;
    };
    return sigma * sphere_integral(n, ray, 1e-11);
}

struct CaseContext {
    const FinslerInstance& m;
    std::optional<double> p;
    std::optional<MinkowskiNorm> target;  ///< normalized target norm for rearrangements
};

RadialFunction random_function(Draw& d, const CaseContext& c, double max_support, bool allow_offcentre,
                               bool allow_cross, bool monotone_only = false) {
    const int n = c.m.dim();
    profiles::RandomSpec spec;
    spec.max_support = max_support;
    spec.monotone_only = monotone_only;
    RadialFunction u{profiles::random_profile(d.next(), spec), Vec(n, 0.0), std::nullopt};
    if (allow_cross && cross_ok(c.m) && d.coin(1.0 / 3.0)) u.shape = random_shape(d, n);
    if (allow_offcentre && offcentre_ok(c.m) && d.coin(0.5)) u.center = point_at(d, c.m.norm(), d.uni(0.05, 1.5));
    return u;
}

Weight random_weight(Draw& d, int n) {
    switch (d.pick(3)) {
        case 0: return Weight::power(-d.uni(0.0, n - 0.3));
        case 1: {
            const double c = d.uni(0.2, 3.0);
            Weight w;
            w.f = [c](double r) { return std::exp(-c * r); };
            w.name = "exp(-" + format_double(c) + " r)";
            return w;
        }
        default: {
            const double k = d.uni(0.5, 3.0);
            Weight w;
            w.f = [k](double r) { return std::pow(1.0 + r, -k); };
            w.name = "(1+r)^-" + format_double(k);
            return w;
        }
    }
}

InequalityReport equimeasurability_case(Draw& d, const CaseContext& c, double p) {
    const FinslerInstance& m = c.m;
    RadialFunction u = random_function(d, c, d.uni(0.5, 2.0), false, true);
    const DecreasingProfile us = rearrange(u, m, *c.target);
    const RadialLevelSets sets(u.profile, level_set_growth(m, u));
    double worst = 0.0;
    const double support = sets.support_volume();
    for (int i = 0; i < 16; ++i) {
        const double t = sets.sup() * d.uni(0.0, 1.0);
        worst = std::max(worst, std::abs(sets.mu(t) - us.superlevel_volume(t)) / support);
    }
    worst = std::max(worst, std::abs(us.support_volume - support) / support);
    const std::array<double, 4> qs{1.0, 2.0, p, HUGE_VAL};
    for (const NormPair& np : lq_norms(u, m, us, qs))
        worst = std::max(worst, std::abs(np.source - np.rearranged) / np.source);
    InequalityReport rep;
    rep.id = "equimeasurability";
    rep.direction = InequalityReport::Direction::upper;
    rep.parameters = base_parameters(m, u, p);
    rep.parameters["target_norm"] = c.target->descriptor();
    rep.lhs = worst;
    rep.rhs = 1e-8;
    rep.tolerance = 0.0;
    rep.diagnostics = {{"measure", "max relative deviation of level volumes and L^q norms"}};
    rep.evaluate();
    return rep;
}

InequalityReport layer_cake_case(Draw& d, const CaseContext& c) {
    const FinslerInstance& m = c.m;
    const int n = m.dim();
    const double k = d.coin(0.3) ? d.uni(-n + 0.3, 0.0) : d.uni(0.0, 3.0);
    const double decay = d.uni(0.0, 2.0);
    const double radius = d.uni(0.3, 3.0);
    auto f = [k, decay](double r) { return std::pow(r, k) * std::exp(-decay * r); };
    auto df = [k, decay](double r) { return (k / r - decay) * std::pow(r, k) * std::exp(-decay * r); };
    Vec x0(n, 0.0);
    const LayerCake lc = layer_cake_integral(m, x0, f, df, radius, k);
    InequalityReport rep;
    rep.id = "layer-cake";
    rep.direction = InequalityReport::Direction::equal;
    rep.parameters = {{"n", n}, {"instance", m.descriptor()}, {"weight_power", k}, {"decay", decay}, {"R", radius}};
    rep.lhs = n <= 3 ? polar_ball_integral(m, f, k, radius) : lc.lhs;
    rep.rhs = lc.rhs;
    rep.tolerance = 1e-6;
    rep.diagnostics = {{"radial_lhs", lc.lhs}, {"lhs_method", n <= 3 ? "polar" : "radial"}};
    rep.evaluate();
    return rep;
}

InequalityReport run_case(SuiteKind kind, const CaseContext& c, std::uint64_t seed) {
    Draw d(seed);
    const FinslerInstance& m = c.m;
    const int n = m.dim();
    Vec x0(n, 0.0);
    switch (kind) {
        case SuiteKind::morrey_support:
        case SuiteKind::morrey_l1: {
            const double p = c.p.value_or(d.uni(n + 0.2, n + 4.0));
            const RadialFunction u = random_function(d, c, d.uni(0.5, 3.0), true, true);
            return kind == SuiteKind::morrey_support ? verify_morrey_support(m, u, p) : verify_morrey_l1(m, u, p);
        }
        case SuiteKind::hardy: {
            const double p = c.p.value_or(d.uni(1.1, n - 0.2));
            const RadialFunction u = random_function(d, c, d.uni(0.5, 3.0), true, true);
            return verify_hardy(m, u, p, x0);
        }
        case SuiteKind::bpv: {
            const double mu_top = n == 2 ? 0.0 : constants::mu_max(n, instance_avr(m));
            const double mu = n == 2 ? 0.0 : (d.coin(0.2) ? 0.0 : (d.coin(0.1) ? mu_top : d.uni(0.0, mu_top)));
            if (d.coin(0.1)) {
                const double mu_bar = constants::bpv(mu, n, instance_avr(m), constants::omega(n)).mu_bar;
                if (mu_bar > 0.0 || n == 2) return verify_bpv(m, 1.0, {profiles::bessel_eigen(n, mu_bar, 1.0), x0, {}}, mu, x0);
            }
            const double support = d.uni(0.2, 1.0);
            RadialFunction u = random_function(d, c, support, false, false);
            if (offcentre_ok(m) && d.coin(0.5)) u.center = point_at(d, m.norm(), d.uni(0.0, 1.0 - u.profile.support));
            return verify_bpv(m, 1.0, u, mu, x0);
        }
        case SuiteKind::polya_szego: {
            const double p = c.p.value_or(d.uni(1.1, 6.0));
            const RadialFunction u = random_function(d, c, d.uni(0.5, 3.0), true, true);
            return polya_szego_check(u, m, *c.target, p);
        }
        case SuiteKind::hlp: {
            const double p = c.p.value_or(d.uni(1.0, 4.0));
            const Weight f = random_weight(d, n);
            const RadialFunction u = random_function(d, c, d.uni(0.5, 3.0), true, true);
            if (offcentre_ok(m) && d.coin(0.5)) x0 = point_at(d, m.norm(), d.uni(0.0, 1.0));
            return hlp_check(u, m, *c.target, f, p, x0);
        }
        case SuiteKind::layer_cake: return layer_cake_case(d, c);
        case SuiteKind::equimeasurability: return equimeasurability_case(d, c, c.p.value_or(d.uni(1.1, 6.0)));
    }
    throw DomainError("unknown suite");
}

}  // namespace

SuiteSummary random_suite(SuiteKind kind, const FinslerInstance& m, const SuiteOptions& opts) {
    require_flat(m, "random_suite");
    if (opts.cases < 1) throw DomainError("random_suite: needs at least one case");
    CaseContext ctx{m, opts.p, std::nullopt};
    if (kind == SuiteKind::polya_szego || kind == SuiteKind::hlp || kind == SuiteKind::equimeasurability) {
        // Rearrange onto the normalized instance norm where it is cheap to normalize.
        ctx.target = m.dim() <= 3 ? normalize(m.norm()) : MinkowskiNorm::euclidean(m.dim());
    }
    std::vector<InequalityReport> reports(static_cast<std::size_t>(opts.cases));
    kernels::omp::parallel_for(reports.size(), [&](std::size_t i) {
        const std::uint64_t s = kernels::block_seed(opts.seed, i);
        InequalityReport r = run_case(kind, ctx, s);
        r.seed = s;
        reports[i] = std::move(r);
    });
    SuiteSummary out;
    out.kind = kind;
    out.instance = m.descriptor();
    out.cases = opts.cases;
    out.seed = opts.seed;
    out.workers = kernels::threads();
    out.worst_margin = HUGE_VAL;
    for (const InequalityReport& r : reports) {
        out.worst_margin = std::min(out.worst_margin, margin_of(r));
        if (!r.pass) {
            ++out.failures;
            if (out.failed.size() < 5) out.failed.push_back(r);
        }
    }
    return out;
}

}  // namespace finsler
