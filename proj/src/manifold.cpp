#include "finsler/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"

namespace finsler {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double euclid(std::span<const double> y) { return std::sqrt(dot(y, y)); }

/// g_x(v, v) for the rotationally symmetric base metric at x in R^{n-1}.
double base_quadratic(const BaseMetric& g, std::span<const double> x, std::span<const double> v) {
    const double vv = dot(v, v);
    if (g.flat()) return vv;
    const double r = euclid(x);
    if (r == 0.0) return vv;
    const double vr = dot(v, x) / r;
    const double k = g.warp(r) / r;
    return vr * vr + k * k * std::max(0.0, vv - vr * vr);
}

double f_eps_value(double gvv, double w, double eps) {
    const double w2 = w * w;
    return std::sqrt(gvv + w2 + eps * std::sqrt(gvv * gvv + w2 * w2));
}

void require_point(const FinslerInstance& m, std::span<const double> x, const char* who) {
    if (x.size() != static_cast<std::size_t>(m.dim())) {
        std::ostringstream os;
        os << who << ": point has dimension " << x.size() << ", instance has " << m.dim();
        throw DomainError(os.str());
    }
}

}  // namespace

double BaseMetric::warp(double r) const {
    if (flat()) return r;
    return cone_factor * r + (1.0 - cone_factor) * std::tanh(r);
}

double BaseMetric::avr(int n) const {
    if (flat()) return 1.0;
    return std::pow(cone_factor, n - 2);
}

std::string BaseMetric::name() const {
    if (flat()) return "euclidean";
    return "smoothed_cone:" + nlohmann::json(cone_factor).dump();
}

BaseMetric BaseMetric::parse(const std::string& text) {
    BaseMetric g;
    if (text == "euclidean" || text == "flat") return g;
    const std::string prefix = "smoothed_cone:";
    if (text.rfind(prefix, 0) == 0) {
        double a = 0.0;
        try {
            a = std::stod(text.substr(prefix.size()));
        } catch (const std::exception&) {
            throw ConfigError("base metric: cannot parse cone factor in '" + text + "'");
        }
        if (!(a > 0.0) || a > 1.0) throw ConfigError("base metric: cone factor must lie in (0, 1]");
        g.kind = Kind::smoothed_cone;
        g.cone_factor = a;
        return g;
    }
    throw ConfigError("base metric: unknown metric '" + text + "'");
}

FinslerInstance FinslerInstance::euclidean(int n) {
    FinslerInstance m;
    m.dim_ = n;
    m.kind_ = InstanceKind::euclidean;
    m.norm_ = MinkowskiNorm::euclidean(n);
    return m;
}

FinslerInstance FinslerInstance::minkowski(MinkowskiNorm h) {
    FinslerInstance m;
    m.dim_ = h.dim();
    m.kind_ = InstanceKind::minkowski;
    m.norm_ = std::move(h);
    return m;
}

FinslerInstance FinslerInstance::f_eps(int n, double eps, BaseMetric g) {
    if (!(eps > 0.0)) throw DomainError("f_eps: eps must be positive");
    if (n < 2) throw DomainError("f_eps: requires n >= 2");
    if (!g.flat() && n < 3) throw DomainError("f_eps: a curved base metric needs n >= 3");
    FinslerInstance m;
    m.dim_ = n;
    m.kind_ = InstanceKind::f_eps;
    m.eps_ = eps;
    m.base_ = g;
    m.norm_ = MinkowskiNorm::f_eps_fiber(n, eps);
    return m;
}

double FinslerInstance::metric(std::span<const double> x, std::span<const double> y) const {
    if (x_independent()) return (*norm_)(y);
    const std::size_t k = y.size() - 1;
    return f_eps_value(base_quadratic(base_, x.first(k), y.first(k)), y[k], eps_);
}

MinkowskiNorm FinslerInstance::fiber(std::span<const double> x) const {
    if (x_independent()) return *norm_;
    const Vec point(x.begin(), x.end());
    const BaseMetric g = base_;
    const double eps = eps_;
    return MinkowskiNorm::custom(
        dim_,
        [point, g, eps](std::span<const double> y) {
            const std::size_t k = y.size() - 1;
            return f_eps_value(base_quadratic(g, std::span<const double>(point).first(k), y.first(k)), y[k], eps);
        },
        std::nullopt, "f_eps_fiber_at_point");
}

const MinkowskiNorm& FinslerInstance::norm() const {
    if (!x_independent()) throw DomainError("norm: instance is not x-independent");
    return *norm_;
}

std::optional<double> FinslerInstance::exact_ball_volume(double r) const {
    if (!x_independent()) return std::nullopt;
    return constants::omega(dim_) * std::pow(r, dim_);
}

std::optional<double> FinslerInstance::exact_avr() const {
    if (!x_independent()) return std::nullopt;
    return 1.0;
}

nlohmann::json FinslerInstance::descriptor() const {
    nlohmann::json d;
    d["n"] = dim_;
    switch (kind_) {
        case InstanceKind::euclidean: d["kind"] = "euclidean"; break;
        case InstanceKind::minkowski:
            d["kind"] = "minkowski";
            d["norm"] = norm_->descriptor();
            break;
        case InstanceKind::f_eps:
            d["kind"] = "f_eps";
            d["eps"] = eps_;
            d["g"] = base_.name();
            if (norm_->scale() != 1.0) d["scale"] = norm_->scale();
            break;
    }
    return d;
}

FinslerInstance instance_from_descriptor(const nlohmann::json& d) {
    if (!d.is_object()) throw ConfigError("instance descriptor must be an object");
    for (auto it = d.begin(); it != d.end(); ++it) {
        static const char* allowed[] = {"kind", "n", "norm", "eps", "g", "normalized", "scale"};
        if (std::none_of(std::begin(allowed), std::end(allowed), [&](const char* a) { return it.key() == a; }))
            throw ConfigError("instance descriptor: unknown key '" + it.key() + "'");
    }
    if (!d.contains("kind") || !d["kind"].is_string()) throw ConfigError("instance descriptor: missing string 'kind'");
    const std::string kind = d["kind"].get<std::string>();
    try {
        if (kind == "minkowski") {
            if (!d.contains("norm")) throw ConfigError("instance descriptor: minkowski requires 'norm'");
            nlohmann::json nd = d["norm"];
            if (d.contains("n")) {
                if (!nd.contains("n")) nd["n"] = d["n"];
                if (nd["n"] != d["n"]) throw ConfigError("instance descriptor: norm dimension differs from 'n'");
            }
            if (d.value("normalized", false)) nd["normalized"] = true;
            return FinslerInstance::minkowski(norm_from_descriptor(nd));
        }
        if (!d.contains("n") || !d["n"].is_number_integer()) throw ConfigError("instance descriptor: missing integer 'n'");
        const int n = d["n"].get<int>();
        if (n < 1) throw ConfigError("instance descriptor: 'n' must be positive");
        if (kind == "euclidean") {
            if (d.contains("norm") || d.contains("eps") || d.contains("g"))
                throw ConfigError("instance descriptor: euclidean takes only 'n'");
            return FinslerInstance::euclidean(n);
        }
        if (kind == "f_eps") {
            if (!d.contains("eps") || !d["eps"].is_number()) throw ConfigError("instance descriptor: f_eps requires 'eps'");
            const BaseMetric g = BaseMetric::parse(d.value("g", std::string("euclidean")));
            FinslerInstance m = FinslerInstance::f_eps(n, d["eps"].get<double>(), g);
            if (d.value("normalized", false)) {
                if (!g.flat()) throw ConfigError("instance descriptor: only the flat-base F_eps can be normalized");
                m.norm_ = normalize(*m.norm_);
            } else if (d.contains("scale")) {
                m.norm_ = m.norm_->scaled(d["scale"].get<double>());
            }
            return m;
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("instance descriptor: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("instance descriptor: ") + e.what());
    }
    throw ConfigError("instance descriptor: unknown kind '" + kind + "'");
}

double bh_density(const FinslerInstance& m, std::span<const double> x, const VolumeOptions& opts) {
    require_point(m, x, "bh_density");
    return constants::omega(m.dim()) / wulff_volume(m.fiber(x), opts).value;
}

namespace {

/// Lower bound for d_g~: g dominates the exact cone metric dr^2 + a^2 r^2 dS^2.
double cone_lower_bound(const FinslerInstance& m, std::span<const double> x0, std::span<const double> x1) {
    const std::size_t k = x0.size() - 1;
    const auto p = x0.first(k), q = x1.first(k);
    const double r0 = euclid(p), r1 = euclid(q);
    double planar = 0.0;
    if (r0 == 0.0 || r1 == 0.0) {
        planar = r0 + r1;
    } else {
        const double c = std::clamp(dot(p, q) / (r0 * r1), -1.0, 1.0);
        const double angle = m.base().cone_factor * std::acos(c);
        planar = std::sqrt(std::max(0.0, r0 * r0 + r1 * r1 - 2.0 * r0 * r1 * std::cos(angle)));
    }
    const double dt = x1[k] - x0[k];
    return std::sqrt(planar * planar + dt * dt);
}

double segment_length(const FinslerInstance& m, const Vec& a, const Vec& b) {
    const std::size_t n = a.size();
    Vec d(n), mid(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = b[i] - a[i];
        mid[i] = 0.5 * (a[i] + b[i]);
    }
    return (m.metric(a, d) + 4.0 * m.metric(mid, d) + m.metric(b, d)) / 6.0;
}

}  // namespace

DistanceResult distance(const FinslerInstance& m, std::span<const double> x0, std::span<const double> x1,
                        const DistanceOptions& opts) {
    require_point(m, x0, "distance");
    require_point(m, x1, "distance");
    const std::size_t n = x0.size();
    DistanceResult out;
    if (m.x_independent()) {
        Vec d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = x1[i] - x0[i];
        out.value = out.lo = out.hi = m.norm()(d);
        out.exact = true;
        out.method = "closed_form";
        return out;
    }
    double chord = 0.0;
    for (std::size_t i = 0; i < n; ++i) chord += (x1[i] - x0[i]) * (x1[i] - x0[i]);
    chord = std::sqrt(chord);
    out.lo = cone_lower_bound(m, x0, x1);
    out.hi = std::sqrt(1.0 + m.eps()) * chord;
    out.method = "sandwich_bounds";
    out.value = out.hi;
    if (chord == 0.0 || opts.segments < 1) return out;

    // Coordinate descent on the interior nodes of a piecewise-linear path.
    const int k = opts.segments;
    std::vector<Vec> nodes(k + 1, Vec(n));
    for (int j = 0; j <= k; ++j)
        for (std::size_t i = 0; i < n; ++i) nodes[j][i] = x0[i] + (x1[i] - x0[i]) * j / k;
    std::vector<double> seg(k);
    for (int j = 0; j < k; ++j) seg[j] = segment_length(m, nodes[j], nodes[j + 1]);
    double step = 0.5 * chord / k;
    for (int sweep = 0; sweep < opts.sweeps && step > 1e-10 * chord; ++sweep) {
        bool improved = false;
        for (int j = 1; j < k; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                for (double dir : {1.0, -1.0}) {
                    const double saved = nodes[j][i];
                    nodes[j][i] = saved + dir * step;
                    const double left = segment_length(m, nodes[j - 1], nodes[j]);
                    const double right = segment_length(m, nodes[j], nodes[j + 1]);
                    if (left + right < seg[j - 1] + seg[j] - 1e-15 * chord) {
                        seg[j - 1] = left;
                        seg[j] = right;
                        improved = true;
                        break;
                    }
                    nodes[j][i] = saved;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    double length = 0.0;
    for (double s : seg) length += s;
    if (length < out.lo * (1.0 - 1e-9)) {
        out.warning = true;
        return out;
    }
    if (length < out.hi) {
        out.hi = length;
        out.value = length;
        out.method = "path_optimization";
    }
    return out;
}

BallVolume ball_volume(const FinslerInstance& m, std::span<const double> x0, double r, const BallOptions& opts) {
    require_point(m, x0, "ball_volume");
    if (!(r > 0.0)) throw DomainError("ball_volume: radius must be positive");
    BallVolume out;
    const int n = m.dim();
    if (!opts.force_monte_carlo) {
        if (auto exact = m.exact_ball_volume(r)) {
            out.value = out.lo = out.hi = *exact;
            out.exact = true;
            out.method = "closed_form";
            return out;
        }
    }
    VolumeOptions vo;
    vo.samples = opts.samples;
    vo.seed = kernels::block_seed(opts.seed, 0xB0A7ULL);
    vo.execution = opts.execution;
    const Vec center(x0.begin(), x0.end());

    if (m.x_independent()) {
        const MinkowskiNorm& h = m.norm();
        const VolumeEstimate unit = wulff_volume(h, vo);
        const double sigma = constants::omega(n) / unit.value;
        kernels::Box box = wulff_bounding_box(h, r);
        for (int i = 0; i < n; ++i) {
            box.lo[i] += center[i];
            box.hi[i] += center[i];
        }
        const auto est = kernels::integrate(
            [&](std::span<const double> x) {
                Vec d(n);
                for (int i = 0; i < n; ++i) d[i] = x[i] - center[i];
                return h(d) < r ? sigma : 0.0;
            },
            box, opts.samples, opts.seed, opts.execution);
        out.value = out.lo = out.hi = est.value;
        const double rel_sigma = unit.std_error / unit.value;
        out.std_error = est.std_error + est.value * rel_sigma;
        out.method = "monte_carlo";
        out.samples = est.samples;
        out.seed = est.seed;
        out.workers = est.workers;
        return out;
    }

    // Curved base: sandwich distances give an inner and an outer region.
    const double sigma_flat = constants::omega(n) / wulff_volume(MinkowskiNorm::f_eps_fiber(n, m.eps()), vo).value;
    const BaseMetric g = m.base();
    auto sigma = [&](std::span<const double> x) {
        const double rho = euclid(x.first(n - 1));
        if (rho == 0.0) return sigma_flat;
        return sigma_flat * std::pow(g.warp(rho) / rho, n - 2);
    };
    const double reach = euclid(x0.first(n - 1)) + r;
    kernels::Box box;
    box.lo.assign(n, -reach);
    box.hi.assign(n, reach);
    box.lo[n - 1] = center[n - 1] - r;
    box.hi[n - 1] = center[n - 1] + r;
    const double stretch = std::sqrt(1.0 + m.eps());
    const auto inner = kernels::integrate(
        [&](std::span<const double> x) {
            double c = 0.0;
            for (int i = 0; i < n; ++i) c += (x[i] - center[i]) * (x[i] - center[i]);
            return stretch * std::sqrt(c) < r ? sigma(x) : 0.0;
        },
        box, opts.samples, opts.seed, opts.execution);
    const auto outer = kernels::integrate(
        [&](std::span<const double> x) { return cone_lower_bound(m, center, x) < r ? sigma(x) : 0.0; }, box,
        opts.samples, opts.seed, opts.execution);
    out.lo = inner.value;
    out.hi = outer.value;
    out.value = 0.5 * (out.lo + out.hi);
    out.std_error = std::max(inner.std_error, outer.std_error);
    out.method = "sandwich_monte_carlo";
    out.samples = inner.samples;
    out.seed = inner.seed;
    out.workers = inner.workers;
    return out;
}

BallVolumeCurve volume_curve(const FinslerInstance& m, std::span<const double> x0, std::span<const double> radii,
                             const BallOptions& opts) {
    if (radii.empty()) throw DomainError("volume_curve: radius schedule is empty");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1])) throw DomainError("volume_curve: radius schedule must be increasing");
    BallVolumeCurve c;
    c.center.assign(x0.begin(), x0.end());
    c.radii.assign(radii.begin(), radii.end());
    const double w = constants::omega(m.dim());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        BallOptions o = opts;
        o.seed = kernels::block_seed(opts.seed, i);
        const BallVolume v = ball_volume(m, x0, radii[i], o);
        const double base = w * std::pow(radii[i], m.dim());
        c.volumes.push_back(v);
        c.ratios.push_back(v.value / base);
        c.ratio_errors.push_back(v.std_error / base);
    }
    for (std::size_t i = 1; i < radii.size(); ++i) {
        const BallVolume& a = c.volumes[i - 1];
        const BallVolume& b = c.volumes[i];
        const double band = 3.0 * std::hypot(a.std_error, b.std_error) + 1e-12 * b.hi;
        if (b.hi < a.lo - band) c.nondecreasing = false;
        const double ra_hi = a.hi / (w * std::pow(radii[i - 1], m.dim()));
        const double rb_lo = b.lo / (w * std::pow(radii[i], m.dim()));
        const double rband = 3.0 * std::hypot(c.ratio_errors[i - 1], c.ratio_errors[i]) + 1e-12;
        if (rb_lo > ra_hi + rband) c.bishop_gromov = false;
    }
    return c;
}

AvrEstimate avr(const FinslerInstance& m, std::span<const double> x0, std::span<const double> radii,
                const AvrOptions& opts) {
    AvrEstimate e;
    e.curve = volume_curve(m, x0, radii, opts.ball);
    if (opts.throw_on_violation && (!e.curve.bishop_gromov || !e.curve.nondecreasing)) {
        std::ostringstream os;
        os << "avr: volume-ratio curve violates Bishop-Gromov monotonicity beyond 3 sigma";
        throw DataError(os.str());
    }
    e.point = e.curve.ratios.back();
    e.std_error = e.curve.ratio_errors.back();
    const int n = m.dim();
    if (m.kind() == InstanceKind::f_eps) {
        const double base = opts.base_avr.value_or(m.base().avr(n));
        e.lo = base / std::pow(1.0 + m.eps(), 0.5 * n);
        e.hi = base;
        e.method = m.x_independent() ? "monte_carlo" : "sandwich_interval";
        if (m.x_independent() && e.curve.volumes.back().exact) e.method = "exact";
    } else if (e.curve.volumes.back().exact) {
        e.lo = e.hi = e.point;
        e.method = "exact";
    } else {
        e.lo = std::max(0.0, e.point - 3.0 * e.std_error);
        e.hi = std::min(1.0, e.point + 3.0 * e.std_error);
        e.method = "monte_carlo";
    }
    return e;
}

Vec finsler_gradient(const FinslerInstance& m, std::span<const double> x, std::span<const double> du) {
    require_point(m, x, "finsler_gradient");
    const std::size_t n = du.size();
    if (euclid(du) == 0.0) return Vec(n, 0.0);
    const MinkowskiNorm h = m.fiber(x);
    if (h.kind() == NormKind::euclidean) {
        Vec y(du.begin(), du.end());
        const double s = h.scale();
        for (double& v : y) v /= s * s;
        return y;
    }
    if (!h.has_analytic_dual()) {
        const DualResult d = dual_norm_numeric(h, du);
        Vec y = d.maximizer;
        for (double& v : y) v *= d.value;
        return y;
    }
    // Gradient of (1/2) H*^2 by central differences.
    const double step = 1e-6 * std::max(1.0, euclid(du));
    Vec a(du.begin(), du.end());
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = du[i] + step;
        const double up = *h.analytic_dual(a);
        a[i] = du[i] - step;
        const double down = *h.analytic_dual(a);
        a[i] = du[i];
        y[i] = (0.5 * up * up - 0.5 * down * down) / (2.0 * step);
    }
    return y;
}

}  // namespace finsler
