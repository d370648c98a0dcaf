#include "finsler/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

constexpr double kRelTol = 1e-11;

double find_root(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

bool same_norm(const MinkowskiNorm& a, const MinkowskiNorm& b) {
    return a.dim() == b.dim() && a.descriptor() == b.descriptor();
}

quad::Options radial_options(double left_power, double right_power) {
    quad::Options o;
    o.abs_tol = 0.0;
    o.rel_tol = kRelTol;
    o.left_power = left_power;
    o.right_power = right_power;
    return o;
}

}  // namespace

VolumeGrowth VolumeGrowth::power_law(int n, double coefficient) {
    VolumeGrowth v;
    v.dim = n;
    v.coefficient = coefficient;
    v.volume = [n, coefficient](double r) { return coefficient * std::pow(r, n); };
    v.density = [n, coefficient](double r) { return n * coefficient * std::pow(r, n - 1); };
    return v;
}

VolumeGrowth level_set_growth(const FinslerInstance& m, const RadialFunction& u) {
    if (!m.x_independent())
        throw DomainError("function-side operations need an x-independent instance (curved F_eps supplies intervals only)");
    const int n = m.dim();
    const double w = constants::omega(n);
    if (!u.shape || same_norm(*u.shape, m.norm())) return VolumeGrowth::power_law(n, w);
    if (u.shape->dim() != n) throw DomainError("level_set_growth: shape norm has the wrong dimension");
    const double ratio = wulff_volume(*u.shape).value / wulff_volume(m.norm()).value;
    return VolumeGrowth::power_law(n, w * ratio);
}

RadialLevelSets::RadialLevelSets(Profile g, VolumeGrowth v) : g_(std::move(g)), v_(std::move(v)) {
    if (!std::isfinite(g_.sup)) throw DomainError("rearrangement needs a bounded function");
    // Split each smooth piece where g' changes sign.
    const auto pts = g_.pieces();
    std::vector<double> cuts{pts.front()};
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double a = pts[k], b = pts[k + 1];
        const int m = 96;
        double prev_x = a + (b - a) * 0.5 / m;
        double prev = g_.slope(prev_x);
        for (int i = 1; i < m; ++i) {
            const double x = a + (b - a) * (i + 0.5) / m;
            const double d = g_.slope(x);
            if ((prev < 0.0 && d > 0.0) || (prev > 0.0 && d < 0.0)) {
                double lo = prev_x, hi = x, dlo = prev;
                for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double dm = g_.slope(mid);
                    if ((dm < 0.0) == (dlo < 0.0) && dm != 0.0) {
                        lo = mid;
                        dlo = dm;
                    } else {
                        hi = mid;
                    }
                }
                cuts.push_back(0.5 * (lo + hi));
            }
            if (d != 0.0) {
                prev = d;
                prev_x = x;
            }
        }
        cuts.push_back(b);
    }
    sup_ = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (!(cuts[k + 1] > cuts[k])) continue;
        Segment s{cuts[k], cuts[k + 1], g_(cuts[k]), g_(cuts[k + 1])};
        // g(support) is 0 by definition; use the left limit at interior kinks.
        if (s.b < g_.support) s.gb = g_(s.b);
        segments_.push_back(s);
        sup_ = std::max({sup_, s.ga, s.gb});
    }
    sup_ = std::max(sup_, 0.0);
}

std::vector<double> RadialLevelSets::crossings(double t) const {
    std::vector<double> out;
    for (const Segment& s : segments_) {
        const double lo = std::min(s.ga, s.gb), hi = std::max(s.ga, s.gb);
        if (!(t > lo && t < hi)) continue;
        auto f = [&](double r) { return g_(r) - t; };
        out.push_back(find_root(f, s.a, s.b, s.ga - t, s.gb - t));
    }
    return out;
}

double RadialLevelSets::volume_above(double t, bool inclusive) const {
    auto above = [inclusive, t](double g) { return inclusive ? g >= t : g > t; };
    double total = 0.0;
    for (const Segment& s : segments_) {
        double lo = 0.0, hi = 0.0;
        if (s.ga == s.gb) {
            if (above(s.ga)) {
                lo = s.a;
                hi = s.b;
            }
        } else if (s.ga > s.gb) {  // decreasing
            if (above(s.gb)) {
                lo = s.a;
                hi = s.b;
            } else if (above(s.ga)) {
                lo = s.a;
                hi = find_root([&](double r) { return g_(r) - t; }, s.a, s.b, s.ga - t, s.gb - t);
            }
        } else {  // increasing
            if (above(s.ga)) {
                lo = s.a;
                hi = s.b;
            } else if (above(s.gb)) {
                lo = find_root([&](double r) { return g_(r) - t; }, s.a, s.b, s.ga - t, s.gb - t);
                hi = s.b;
            }
        }
        if (hi > lo) total += v_.volume(hi) - v_.volume(lo);
    }
    return total;
}

double RadialLevelSets::mu(double t) const { return volume_above(t, false); }

double RadialLevelSets::mu_at_least(double t) const { return volume_above(t, true); }

double RadialLevelSets::mu_rate(double t) const {
    double rate = 0.0;
    for (double r : crossings(t)) {
        const double d = std::abs(g_.slope(r));
        if (d == 0.0) return HUGE_VAL;
        rate += v_.density(r) / d;
    }
    return rate;
}

std::vector<double> RadialLevelSets::critical_values() const {
    std::vector<double> v{0.0, sup_};
    for (const Segment& s : segments_) {
        v.push_back(s.ga);
        v.push_back(s.gb);
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    while (!v.empty() && v.front() < 0.0) v.erase(v.begin());
    return v;
}

double DistributionFunction::operator()(double t) const {
    if (levels.empty()) return 0.0;
    if (t < levels.front()) return support_volume;
    const auto it = std::upper_bound(levels.begin(), levels.end(), t);
    return mu[static_cast<std::size_t>(it - levels.begin()) - 1];
}

std::vector<double> level_grid(double sup, int count) {
    if (!(sup > 0.0)) return {0.0};
    count = std::max(count, 16);
    const int geo = count / 4;
    const int uni = count - 2 * geo;
    std::vector<double> t{0.0, sup};
    for (int i = 0; i < geo; ++i) {
        const double frac = std::pow(10.0, -8.0 + 6.7 * i / std::max(1, geo - 1));  // 1e-8 .. 0.05
        t.push_back(sup * frac);
        t.push_back(sup * (1.0 - frac));
    }
    for (int i = 1; i < uni; ++i) t.push_back(sup * i / uni);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

DistributionFunction distribution(const RadialFunction& u, const FinslerInstance& m, std::span<const double> levels) {
    const RadialLevelSets sets(u.profile, level_set_growth(m, u));
    DistributionFunction d;
    d.levels.assign(levels.begin(), levels.end());
    std::sort(d.levels.begin(), d.levels.end());
    for (double t : d.levels) d.mu.push_back(sets.mu(t));
    d.sup = sets.sup();
    d.support_volume = sets.support_volume();
    return d;
}

namespace {

struct WeightedSamples {
    std::vector<double> values;  // descending
    double cell_measure = 0.0;
};

WeightedSamples sample_cells(const SampledFunction& u, const FinslerInstance& m, kernels::Execution exec) {
    if (!m.x_independent()) throw DomainError("sampled functions are supported on x-independent instances only");
    if (u.box.dim() != static_cast<std::size_t>(m.dim()) || u.cells.size() != u.box.dim())
        throw DomainError("sampled function: box and cell counts must match the instance dimension");
    WeightedSamples w;
    w.values = kernels::evaluate_cells(u.f, u.box, u.cells, exec);
    for (double x : w.values)
        if (!std::isfinite(x)) throw DomainError("sampled function must be bounded");
    std::sort(w.values.begin(), w.values.end(), std::greater<>());
    double cells = 1.0;
    for (int c : u.cells) cells *= c;
    const double sigma = constants::omega(m.dim()) / wulff_volume(m.norm()).value;
    w.cell_measure = sigma * u.box.volume() / cells;
    return w;
}

}  // namespace

DistributionFunction distribution(const SampledFunction& u, const FinslerInstance& m, std::span<const double> levels,
                                  kernels::Execution exec) {
    const WeightedSamples w = sample_cells(u, m, exec);
    DistributionFunction d;
    d.levels.assign(levels.begin(), levels.end());
    std::sort(d.levels.begin(), d.levels.end());
    for (double t : d.levels) {
        const auto above = std::upper_bound(w.values.begin(), w.values.end(), t, std::greater<>()) - w.values.begin();
        d.mu.push_back(static_cast<double>(above) * w.cell_measure);
    }
    d.sup = w.values.empty() ? 0.0 : std::max(0.0, w.values.front());
    const auto positive = std::upper_bound(w.values.begin(), w.values.end(), 0.0, std::greater<>()) - w.values.begin();
    d.support_volume = static_cast<double>(positive) * w.cell_measure;
    return d;
}

double DecreasingProfile::radial(double rho) const {
    return at_volume(constants::omega(dim) * std::pow(rho, dim));
}

double DecreasingProfile::operator()(std::span<const double> x) const {
    if (!norm) throw DomainError("DecreasingProfile: no norm attached");
    return radial((*norm)(x));
}

double DecreasingProfile::superlevel_volume(double t) const {
    if (t < 0.0) return support_volume;
    if (at_volume(0.0) <= t) return 0.0;
    double lo = 0.0, hi = support_volume;  // v(lo) > t >= v(hi)
    for (int it = 0; it < 200 && hi - lo > 1e-15 * support_volume; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (at_volume(mid) > t) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

void require_normalized(const MinkowskiNorm& h) {
    const double vol = wulff_volume(h).value;
    const double w = constants::omega(h.dim());
    if (std::abs(vol - w) > 1e-6 * w) {
        std::ostringstream os;
        os << "rearrange: target norm must be normalized (Vol W_H(1) = " << vol << ", omega_n = " << w << ")";
        throw DomainError(os.str());
    }
}

}  // namespace

DecreasingProfile rearrange(const RadialFunction& u, const FinslerInstance& m, const MinkowskiNorm& h, int levels) {
    if (h.dim() != m.dim()) throw DomainError("rearrange: norm dimension differs from instance");
    require_normalized(h);
    auto sets = std::make_shared<const RadialLevelSets>(u.profile, level_set_growth(m, u));
    DecreasingProfile out;
    out.dim = m.dim();
    out.norm = h;
    out.exact = true;
    out.source = sets;
    out.sup = sets->sup();
    out.support_volume = sets->support_volume();
    out.v = [sets](double s) {
        const double top = sets->sup();
        if (s >= sets->mu(0.0)) return 0.0;
        double lo = 0.0, hi = top;  // mu(lo) > s >= mu(hi)
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * top; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (sets->mu(mid) <= s) hi = mid;
            else lo = mid;
        }
        return hi;
    };
    const auto grid = level_grid(out.sup, levels);
    out.grid.levels = grid;
    for (double t : grid) out.grid.mu.push_back(sets->mu(t));
    out.grid.sup = out.sup;
    out.grid.support_volume = out.support_volume;
    return out;
}

DecreasingProfile rearrange(const SampledFunction& u, const FinslerInstance& m, const MinkowskiNorm& h, int levels,
                            kernels::Execution exec) {
    if (h.dim() != m.dim()) throw DomainError("rearrange: norm dimension differs from instance");
    require_normalized(h);
    const WeightedSamples w = sample_cells(u, m, exec);
    const double top = w.values.empty() ? 0.0 : std::max(0.0, w.values.front());
    const auto grid = level_grid(top, levels);
    DistributionFunction d = distribution(u, m, grid, exec);
    DecreasingProfile out;
    out.dim = m.dim();
    out.norm = h;
    out.exact = false;
    out.sup = d.sup;
    out.support_volume = d.support_volume;
    out.grid = d;
    out.v = [d](double s) {
        // Smallest grid level whose mu does not exceed s.
        const auto it = std::find_if(d.mu.begin(), d.mu.end(), [s](double m) { return m <= s; });
        if (it == d.mu.end()) return d.sup;
        return d.levels[static_cast<std::size_t>(it - d.mu.begin())];
    };
    return out;
}

namespace {

double power_integral(const Profile& g, const VolumeGrowth& v, double q) {
    const auto pts = g.pieces();
    const int n = v.dim;
    auto o = radial_options(q * g.value_power_at_zero + (n - 1), 0.0);
    return quad::integrate_pieces([&](double r) { return std::pow(g(r), q) * v.density(r); }, pts, o).value;
}

std::vector<double> volume_breaks(const DecreasingProfile& us) {
    std::vector<double> b{0.0, us.support_volume};
    if (us.source) {
        for (double c : us.source->critical_values()) {
            for (double m : {us.source->mu(c), us.source->mu_at_least(c)})
                if (m > 0.0 && m < us.support_volume) b.push_back(m);
        }
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

}  // namespace

std::vector<NormPair> lq_norms(const RadialFunction& u, const FinslerInstance& m, const DecreasingProfile& us,
                               std::span<const double> qs) {
    const VolumeGrowth v = level_set_growth(m, u);
    const RadialLevelSets sets(u.profile, v);
    const auto breaks = volume_breaks(us);
    std::vector<NormPair> out;
    for (double q : qs) {
        if (!(q > 0.0)) throw DomainError("lq_norms: q must be positive");
        NormPair np{q, 0.0, 0.0};
        if (std::isinf(q)) {
            np.source = sets.sup();
            np.rearranged = us.at_volume(0.0);
        } else {
            np.source = std::pow(power_integral(u.profile, v, q), 1.0 / q);
            quad::Options o;
            o.abs_tol = 0.0;
            o.rel_tol = 1e-10;
            const double mass =
                us.exact ? quad::integrate_pieces([&](double s) { return std::pow(us.at_volume(s), q); }, breaks, o).value
                         : 0.0;
            if (us.exact) {
                np.rearranged = std::pow(mass, 1.0 / q);
            } else {
                // Step profile: exact sum over grid plateaus.
                double acc = 0.0;
                const auto& d = us.grid;
                for (std::size_t k = 0; k + 1 < d.levels.size(); ++k) acc += std::pow(d.levels[k + 1], q) * (d.mu[k] - d.mu[k + 1]);
                np.rearranged = std::pow(acc, 1.0 / q);
            }
        }
        out.push_back(np);
    }
    return out;
}

RadialIntegral profile_energy(const Profile& g, int n, double p) {
    RadialIntegral r;
    const double left = g.derivative_power_at_zero != 0.0 ? p * g.derivative_power_at_zero + (n - 1) : (n - 1.0);
    const double right = p * g.derivative_power_at_support;
    if (left <= -1.0 || right <= -1.0) {
        r.value = HUGE_VAL;
        r.divergent = true;
        return r;
    }
    const auto res = quad::integrate_pieces(
        [&](double rho) { return std::pow(std::abs(g.slope(rho)), p) * std::pow(rho, n - 1); }, g.pieces(),
        radial_options(left < 0.0 ? left : 0.0, right < 0.0 ? right : 0.0));
    r.value = res.value;
    r.error = res.error;
    return r;
}

double energy_factor(const MinkowskiNorm& measure, const MinkowskiNorm& shape, double p) {
    const int n = measure.dim();
    if (shape.dim() != n) throw DomainError("energy_factor: dimension mismatch");
    const double w = constants::omega(n);
    if (same_norm(measure, shape)) {
        if (n > 3) return n * w;
    } else if (n > 3) {
        throw DomainError("energy_factor: cross-norm energies need n <= 3");
    }
    const double sigma = w / wulff_volume(measure).value;
    auto integrand = [&](std::span<const double> t) {
        const Vec grad = shape.gradient(t);
        return std::pow(dual_norm(measure, grad), p) * std::pow(shape(t), -static_cast<double>(n));
    };
    if (n == 1) {
        const double plus = 1.0, minus = -1.0;
        return sigma * (integrand(std::span<const double>(&plus, 1)) + integrand(std::span<const double>(&minus, 1)));
    }
    return sigma * sphere_integral(n, integrand, 1e-12);
}

RadialIntegral radial_dirichlet_energy(const Profile& g, const MinkowskiNorm& h, double p) {
    if (!(p > 1.0)) throw DomainError("radial_dirichlet_energy: requires p > 1");
    RadialIntegral r = profile_energy(g, h.dim(), p);
    if (r.divergent) return r;
    const double a = energy_factor(h, h, p);
    r.value *= a;
    r.error *= a;
    return r;
}

RadialIntegral source_energy(const RadialFunction& u, const FinslerInstance& m, double p) {
    if (!m.x_independent()) throw DomainError("source_energy: needs an x-independent instance");
    RadialIntegral r = profile_energy(u.profile, m.dim(), p);
    if (r.divergent) return r;
    const MinkowskiNorm& h = m.norm();
    const double a = (!u.shape || same_norm(*u.shape, h)) ? m.dim() * constants::omega(m.dim())
                                                          : energy_factor(h, *u.shape, p);
    r.value *= a;
    r.error *= a;
    return r;
}

RadialIntegral rearranged_energy(const DecreasingProfile& us, double p) {
    if (!us.exact || !us.source) throw DomainError("rearranged_energy: needs the exact rearrangement of a radial function");
    const RadialLevelSets& sets = *us.source;
    const int n = us.dim;
    const double w = constants::omega(n);
    const double perimeter_coef = n * std::pow(w, 1.0 / n);
    auto integrand = [&](double t) {
        const double m = sets.mu(t);
        const double rate = sets.mu_rate(t);
        if (m <= 0.0 || !(rate > 0.0)) return 0.0;
        if (std::isinf(rate)) return 0.0;
        const double per = perimeter_coef * std::pow(m, (n - 1.0) / n);
        return std::pow(per, p) * std::pow(rate, 1.0 - p);
    };
    const auto crit = sets.critical_values();
    RadialIntegral r;
    quad::Options o;
    o.abs_tol = 0.0;
    o.rel_tol = kRelTol;
    const auto res = quad::integrate_pieces(integrand, crit, o);
    r.value = res.value;
    r.error = res.error;
    return r;
}

LayerCake layer_cake_integral(const VolumeGrowth& v, const std::function<double(double)>& f,
                              const std::function<double(double)>& df, double radius, double left_power) {
    if (!(radius > 0.0)) throw DomainError("layer_cake_integral: radius must be positive");
    const int n = v.dim;
    LayerCake out;
    quad::Options o;
    o.abs_tol = 0.0;
    o.rel_tol = 1e-13;
    o.left_power = left_power + (n - 1);
    if (o.left_power > 0.0) o.left_power = 0.0;
    out.lhs = quad::integrate([&](double r) { return f(r) * v.density(r); }, 0.0, radius, o).value;
    quad::Options o2 = o;
    o2.left_power = left_power - 1.0 + n;
    if (o2.left_power > 0.0) o2.left_power = 0.0;
    out.rhs = f(radius) * v.volume(radius) -
              quad::integrate([&](double r) { return df(r) * v.volume(r); }, 0.0, radius, o2).value;
    return out;
}

LayerCake layer_cake_integral(const FinslerInstance& m, std::span<const double> x0,
                              const std::function<double(double)>& f, const std::function<double(double)>& df,
                              double radius, double left_power) {
    if (x0.size() != static_cast<std::size_t>(m.dim())) throw DomainError("layer_cake_integral: bad point");
    RadialFunction dummy;
    return layer_cake_integral(level_set_growth(m, dummy), f, df, radius, left_power);
}

Weight Weight::power(double k) {
    Weight w;
    w.f = [k](double r) { return std::pow(r, k); };
    w.power_at_zero = k;
    w.name = "r^" + format_double(k);
    return w;
}

Weight Weight::constant() {
    Weight w;
    w.f = [](double) { return 1.0; };
    w.name = "1";
    return w;
}

InequalityReport polya_szego_check(const RadialFunction& u, const FinslerInstance& m, const MinkowskiNorm& h,
                                   double p, std::optional<double> avr) {
    InequalityReport rep;
    rep.id = "polya-szego";
    rep.direction = InequalityReport::Direction::lower;
    const double a = avr.value_or(m.exact_avr().value_or(0.0));
    if (!(a > 0.0)) throw DomainError("polya_szego_check: AVR of the instance is unknown; pass it explicitly");
    const int n = m.dim();
    rep.parameters = {{"p", p}, {"n", n}, {"avr", a}, {"profile", u.profile.descriptor()},
                      {"instance", m.descriptor()}, {"target_norm", h.descriptor()}};
    const RadialIntegral lhs = source_energy(u, m, p);
    const DecreasingProfile us = rearrange(u, m, h);
    const RadialIntegral star = rearranged_energy(us, p);
    rep.lhs = lhs.value;
    rep.rhs = std::pow(a, p / n) * star.value;
    rep.reference = std::pow(a, p / n);
    rep.divergent = lhs.divergent && star.divergent;
    rep.diagnostics = {{"lhs_quadrature_error", lhs.error}, {"rearranged_energy_error", star.error}};
    rep.evaluate();
    return rep;
}

namespace {

/// Radii where the ray e + r theta (r >= 0) crosses the levels of the convex
/// function k(r) = K(e + r theta), sorted, starting at 0 and ending where the
/// ray leaves {K < levels.back()}. Empty if the ray misses the support.
std::vector<double> ray_breaks(const MinkowskiNorm& k, std::span<const double> e, std::span<const double> theta,
                               std::span<const double> levels) {
    const int n = k.dim();
    Vec y(n), minus_e(n);
    for (int i = 0; i < n; ++i) minus_e[i] = -e[i];
    auto at = [&](double r) {
        for (int i = 0; i < n; ++i) y[i] = e[i] + r * theta[i];
        return k(y);
    };
    const double kt = k(theta), ke = k(e), kme = k(minus_e);
    // k(r) >= r K(theta) - K(-e) bounds the minimiser and every crossing.
    double lo = 0.0, hi = (ke + kme) / kt;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = at(x1), f2 = at(x2);
    for (int it = 0; it < 90 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = at(x2);
        }
    }
    double rmin = 0.5 * (lo + hi), kmin = at(rmin);
    if (ke <= kmin) {
        rmin = 0.0;
        kmin = ke;
    }
    std::vector<double> out{0.0};
    if (kmin >= levels.back()) return {};
    auto g = [&](double b) { return [&, b](double r) { return at(r) - b; }; };
    for (double b : levels) {
        if (b <= kmin) continue;
        if (ke > b) out.push_back(find_root(g(b), 0.0, rmin, ke - b, kmin - b));
        // The bound is tight along flat faces of polyhedral norms; pad it.
        const double far = (b + kme) / kt * (1.0 + 1e-9) + 1e-12;
        out.push_back(find_root(g(b), rmin, far, kmin - b, at(far) - b));
    }
    std::sort(out.begin(), out.end());
    std::vector<double> cut;
    for (double r : out)
        if (cut.empty() || r > cut.back()) cut.push_back(r);
    return cut.size() >= 2 ? cut : std::vector<double>{};
}

/// int over R^2 of u(x)^p f(H(x - x0)) sigma dx in polar coordinates about x0.
double hlp_polar_2d(const RadialFunction& u, const FinslerInstance& m, const Weight& f, double p,
                    std::span<const double> x0, const MinkowskiNorm& shape) {
    const MinkowskiNorm& h = m.norm();
    const double sigma = constants::omega(2) / wulff_volume(h).value;
    const auto pts = u.profile.pieces();
    const std::vector<double> levels(pts.begin() + 1, pts.end());
    const double e[2] = {x0[0] - u.center[0], x0[1] - u.center[1]};
    quad::Options inner;
    inner.abs_tol = 0.0;
    inner.rel_tol = 1e-11;
    inner.left_power = std::min(0.0, f.power_at_zero + 1.0);
    quad::Options outer;
    outer.abs_tol = 0.0;
    outer.rel_tol = 1e-10;
    std::vector<double> phis;
    for (int k = 0; k <= 16; ++k) phis.push_back(k * std::numbers::pi / 8.0);
    return quad::integrate_pieces(
               [&](double phi) {
                   const double th[2] = {std::cos(phi), std::sin(phi)};
                   const auto breaks = ray_breaks(shape, e, th, levels);
                   if (breaks.empty()) return 0.0;
                   const double hth = h(th);
                   return quad::integrate_pieces(
                              [&](double r) {
                                  const double x[2] = {e[0] + r * th[0], e[1] + r * th[1]};
                                  const double val = u.profile(shape(x));
                                  if (val == 0.0) return 0.0;
                                  return std::pow(val, p) * f.f(r * hth) * r;
                              },
                              breaks, inner)
                       .value;
               },
               phis, outer)
               .value *
           sigma;
}

/// Euclidean n = 3: axisymmetric reduction about the line through x0 and the centre.
double hlp_axisymmetric_3d(const RadialFunction& u, const Weight& f, double p, std::span<const double> x0) {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) d += (u.center[i] - x0[i]) * (u.center[i] - x0[i]);
    d = std::sqrt(d);
    const auto pts = u.profile.pieces();
    const double support = pts.back();
    const double reach = d + support;
    quad::Options inner;
    inner.abs_tol = 0.0;
    inner.rel_tol = 1e-11;
    quad::Options outer;
    outer.abs_tol = 0.0;
    outer.rel_tol = 1e-10;
    outer.left_power = std::min(0.0, f.power_at_zero + 2.0);
    std::vector<double> rs{0.0, reach};
    if (d > 0.0) rs.push_back(d);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        rs.push_back(std::abs(d - pts[i]));
        rs.push_back(d + pts[i]);
    }
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    rs.erase(std::remove_if(rs.begin(), rs.end(), [&](double r) { return r > reach; }), rs.end());
    // Drop the leading piece when x0 lies outside the support.
    const double first = d > support ? d - support : 0.0;
    rs.erase(std::remove_if(rs.begin(), rs.end(), [&](double r) { return r < first; }), rs.end());
    if (rs.size() < 2) return 0.0;
    if (first > 0.0) outer.left_power = 0.0;
    return quad::integrate_pieces(
        [&](double r) {
            double inner_value = 0.0;
            if (d == 0.0 || r == 0.0) {
                inner_value = 2.0 * std::pow(u.profile(std::max(r, d)), p);
            } else {
                std::vector<double> psis{0.0};
                double top = std::numbers::pi;
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    const double c = (r * r + d * d - pts[i] * pts[i]) / (2.0 * r * d);
                    if (c > -1.0 && c < 1.0) psis.push_back(std::acos(c));
                    if (i + 1 == pts.size()) {
                        if (c >= 1.0) return 0.0;
                        if (c > -1.0) top = std::acos(c);
                    }
                }
                psis.push_back(top);
                std::sort(psis.begin(), psis.end());
                psis.erase(std::remove_if(psis.begin(), psis.end(), [&](double v) { return v > top; }), psis.end());
                psis.erase(std::unique(psis.begin(), psis.end()), psis.end());
                if (psis.size() < 2) return 0.0;
                inner_value =
                    quad::integrate_pieces(
                        [&](double psi) {
                            const double dist = std::sqrt(std::max(0.0, r * r + d * d - 2.0 * r * d * std::cos(psi)));
                            const double val = u.profile(dist);
                            return val == 0.0 ? 0.0 : std::pow(val, p) * std::sin(psi);
                        },
                        psis, inner)
                        .value;
            }
            return 2.0 * std::numbers::pi * r * r * f.f(r) * inner_value;
        },
        rs, outer)
        .value;
}

}  // namespace

double source_lq_norm(const RadialFunction& u, const FinslerInstance& m, double q) {
    if (!(q > 0.0)) throw DomainError("source_lq_norm: q must be positive");
    if (std::isinf(q)) return RadialLevelSets(u.profile, level_set_growth(m, u)).sup();
    return std::pow(power_integral(u.profile, level_set_growth(m, u), q), 1.0 / q);
}

RadialIntegral weighted_power_integral(const RadialFunction& u, const FinslerInstance& m, const Weight& f, double p,
                                       std::span<const double> x0) {
    const int n = m.dim();
    if (x0.size() != static_cast<std::size_t>(n) || u.center.size() != static_cast<std::size_t>(n))
        throw DomainError("weighted_power_integral: point dimension mismatch");
    RadialIntegral out;
    bool centred = true;
    for (int i = 0; i < n; ++i) centred = centred && u.center[i] == x0[i];
    const MinkowskiNorm shape = u.shape.value_or(m.norm());
    if (centred && same_norm(shape, m.norm())) {
        const VolumeGrowth v = level_set_growth(m, u);
        const double left = u.profile.value_power_at_zero * p + f.power_at_zero + (n - 1);
        if (left <= -1.0) {
            out.value = HUGE_VAL;
            out.divergent = true;
            return out;
        }
        const auto res = quad::integrate_pieces(
            [&](double r) { return std::pow(u.profile(r), p) * f.f(r) * v.density(r); }, u.profile.pieces(),
            radial_options(std::min(0.0, left), 0.0));
        out.value = res.value;
        out.error = res.error;
        return out;
    }
    if (!m.x_independent()) throw DomainError("weighted_power_integral: off-centre functions need an x-independent instance");
    if (f.power_at_zero + n <= 0.0) {
        out.value = HUGE_VAL;
        out.divergent = true;
        return out;
    }
    if (n == 2) {
        out.value = hlp_polar_2d(u, m, f, p, x0, shape);
    } else if (n == 3 && m.norm().kind() == NormKind::euclidean && shape.kind() == NormKind::euclidean &&
               m.norm().scale() == 1.0 && shape.scale() == 1.0) {
        out.value = hlp_axisymmetric_3d(u, f, p, x0);
    } else {
        throw DomainError("off-centre weighted integrals are supported for n = 2 or Euclidean n = 3");
    }
    return out;
}

InequalityReport hlp_check(const RadialFunction& u, const FinslerInstance& m, const MinkowskiNorm& h, const Weight& f,
                           double p, std::span<const double> x0) {
    InequalityReport rep;
    rep.id = "hlp";
    rep.direction = InequalityReport::Direction::upper;
    const int n = m.dim();
    if (x0.size() != static_cast<std::size_t>(n) || u.center.size() != static_cast<std::size_t>(n))
        throw DomainError("hlp_check: point dimension mismatch");
    rep.parameters = {{"p", p}, {"n", n}, {"weight", f.name}, {"profile", u.profile.descriptor()},
                      {"instance", m.descriptor()}, {"target_norm", h.descriptor()},
                      {"x0", Vec(x0.begin(), x0.end())}, {"center", u.center}};
    const DecreasingProfile us = rearrange(u, m, h);

    // Right side: int_0^S v(s)^p f((s / omega_n)^{1/n}) ds.
    const double w = constants::omega(n);
    const double rhs_power = f.power_at_zero / n;
    if (rhs_power <= -1.0) {
        rep.lhs = rep.rhs = HUGE_VAL;
        rep.divergent = true;
        rep.evaluate();
        return rep;
    }
    quad::Options o;
    o.abs_tol = 0.0;
    o.rel_tol = 1e-10;
    o.left_power = std::min(0.0, rhs_power);
    rep.rhs = quad::integrate_pieces(
                  [&](double s) { return std::pow(us.at_volume(s), p) * f.f(std::pow(s / w, 1.0 / n)); },
                  volume_breaks(us), o)
                  .value;

    const RadialIntegral lhs = weighted_power_integral(u, m, f, p, x0);
    rep.lhs = lhs.value;
    rep.divergent = lhs.divergent;
    rep.reference = 1.0;
    rep.tolerance = 1e-8;
    rep.evaluate();
    return rep;
}

}  // namespace finsler
