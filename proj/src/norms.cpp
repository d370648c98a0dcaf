#include "finsler/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double euclid(std::span<const double> y) { return std::sqrt(dot(y, y)); }

double lp_eval(std::span<const double> y, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : y) m = std::max(m, std::abs(v));
        return m;
    }
    if (p == 1.0) {
        double s = 0.0;
        for (double v : y) s += std::abs(v);
        return s;
    }
    if (p == 2.0) return euclid(y);
    // Factor out the largest entry to avoid overflow for large p.
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double v : y) s += std::pow(std::abs(v) / m, p);
    return m * std::pow(s, 1.0 / p);
}

double conjugate_exponent(double p) {
    if (p == 1.0) return HUGE_VAL;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

void normalize_in_place(Vec& v) {
    const double r = euclid(v);
    for (double& x : v) x /= r;
}

void require_dim(int n, const char* who) {
    if (n < 1) {
        std::ostringstream os;
        os << who << ": dimension must be positive, got " << n;
        throw DomainError(os.str());
    }
}

/// Solves M z = b in place by Gaussian elimination with partial pivoting.
Vec solve(std::vector<double> m, Vec b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
        if (m[piv * n + c] == 0.0) throw DomainError("linear_image: matrix is singular");
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(m[c * n + k], m[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m[r * n + c] / m[c * n + c];
            for (std::size_t k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
            b[r] -= f * b[c];
        }
    }
    Vec z(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= m[i * n + k] * z[k];
        z[i] = s / m[i * n + i];
    }
    return z;
}

}  // namespace

MinkowskiNorm MinkowskiNorm::euclidean(int n) {
    require_dim(n, "euclidean");
    MinkowskiNorm h;
    h.dim_ = n;
    h.kind_ = NormKind::euclidean;
    h.name_ = "euclidean";
    h.param_ = 2.0;
    h.eval_ = euclid;
    h.dual_ = euclid;
    h.grad_ = [](std::span<const double> y, std::span<double> g) {
        const double r = euclid(y);
        for (std::size_t i = 0; i < y.size(); ++i) g[i] = y[i] / r;
    };
    return h;
}

MinkowskiNorm MinkowskiNorm::lp(int n, double p) {
    require_dim(n, "lp");
    if (!(p >= 1.0)) throw DomainError("lp: exponent must satisfy p >= 1");
    MinkowskiNorm h;
    h.dim_ = n;
    h.kind_ = NormKind::lp;
    h.param_ = p;
    h.name_ = std::isinf(p) ? "linf" : "l" + nlohmann::json(p).dump();
    h.smooth_ = p > 1.0 && !std::isinf(p);
    h.eval_ = [p](std::span<const double> y) { return lp_eval(y, p); };
    const double q = conjugate_exponent(p);
    h.dual_ = [q](std::span<const double> a) { return lp_eval(a, q); };
    if (h.smooth_) {
        h.grad_ = [p](std::span<const double> y, std::span<double> g) {
            const double r = lp_eval(y, p);
            for (std::size_t i = 0; i < y.size(); ++i)
                g[i] = std::copysign(std::pow(std::abs(y[i]) / r, p - 1.0), y[i]);
        };
    } else if (p == 1.0) {
        // Gradients of the polyhedral norms hold off the kink set.
        h.grad_ = [](std::span<const double> y, std::span<double> g) {
            for (std::size_t i = 0; i < y.size(); ++i) g[i] = y[i] > 0.0 ? 1.0 : (y[i] < 0.0 ? -1.0 : 0.0);
        };
    } else {
        h.grad_ = [](std::span<const double> y, std::span<double> g) {
            std::size_t k = 0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                g[i] = 0.0;
                if (std::abs(y[i]) > std::abs(y[k])) k = i;
            }
            g[k] = y[k] >= 0.0 ? 1.0 : -1.0;
        };
    }
    return h;
}

MinkowskiNorm MinkowskiNorm::f_eps_fiber(int n, double eps) {
    require_dim(n, "f_eps_fiber");
    if (n < 2) throw DomainError("f_eps_fiber: requires n >= 2");
    if (!(eps >= 0.0)) throw DomainError("f_eps_fiber: eps must be nonnegative");
    MinkowskiNorm h;
    h.dim_ = n;
    h.kind_ = NormKind::f_eps_fiber;
    h.name_ = "f_eps_fiber";
    h.param_ = eps;
    h.eval_ = [eps](std::span<const double> y) {
        const double v2 = dot(y.first(y.size() - 1), y.first(y.size() - 1));
        const double w = y.back();
        const double w2 = w * w;
        return std::sqrt(v2 + w2 + eps * std::sqrt(v2 * v2 + w2 * w2));
    };
    return h;
}

MinkowskiNorm MinkowskiNorm::linear_image(int n, std::vector<double> matrix, double p) {
    require_dim(n, "linear_image");
    if (matrix.size() != static_cast<std::size_t>(n) * n) throw DomainError("linear_image: matrix must be n x n");
    if (!(p >= 1.0)) throw DomainError("linear_image: exponent must satisfy p >= 1");
    // Singular matrices are rejected here rather than at first use.
    (void)solve(matrix, Vec(n, 1.0));
    MinkowskiNorm h;
    h.dim_ = n;
    h.kind_ = NormKind::custom;
    h.name_ = "linear_image";
    h.param_ = p;
    h.smooth_ = p > 1.0 && !std::isinf(p);
    h.matrix_ = matrix;
    h.eval_ = [matrix, p, n](std::span<const double> y) {
        Vec z(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) z[i] += matrix[i * n + k] * y[k];
        return lp_eval(z, p);
    };
    std::vector<double> transposed(matrix.size());
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) transposed[k * n + i] = matrix[i * n + k];
    const double q = conjugate_exponent(p);
    h.dual_ = [transposed, q](std::span<const double> a) {
        return lp_eval(solve(transposed, Vec(a.begin(), a.end())), q);
    };
    return h;
}

MinkowskiNorm MinkowskiNorm::custom(int n, Eval eval, std::optional<Eval> dual, std::string name) {
    require_dim(n, "custom");
    if (!eval) throw DomainError("custom: evaluator is empty");
    MinkowskiNorm h;
    h.dim_ = n;
    h.kind_ = NormKind::custom;
    h.name_ = std::move(name);
    h.eval_ = std::move(eval);
    if (dual) h.dual_ = std::move(*dual);
    return h;
}

MinkowskiNorm MinkowskiNorm::scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scaled: factor must be positive and finite");
    MinkowskiNorm h = *this;
    h.scale_ *= c;
    return h;
}

std::optional<double> MinkowskiNorm::analytic_dual(std::span<const double> alpha) const {
    if (!dual_) return std::nullopt;
    return dual_(alpha) / scale_;
}

Vec MinkowskiNorm::gradient(std::span<const double> y, bool force_finite_difference) const {
    Vec g(y.size());
    if (grad_ && !force_finite_difference) {
        grad_(y, g);
        for (double& v : g) v *= scale_;
        return g;
    }
    const double h = 1e-6 * std::max(1.0, euclid(y));
    Vec z(y.begin(), y.end());
    for (std::size_t i = 0; i < y.size(); ++i) {
        z[i] = y[i] + h;
        const double up = (*this)(z);
        z[i] = y[i] - h;
        const double down = (*this)(z);
        z[i] = y[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

nlohmann::json MinkowskiNorm::descriptor() const {
    nlohmann::json d;
    switch (kind_) {
        case NormKind::euclidean: d["kind"] = "euclidean"; break;
        case NormKind::lp: d["kind"] = "lp"; break;
        case NormKind::f_eps_fiber: d["kind"] = "f_eps_fiber"; break;
        case NormKind::custom: d["kind"] = "custom"; break;
    }
    d["n"] = dim_;
    if (kind_ == NormKind::lp || (kind_ == NormKind::custom && !matrix_.empty())) {
        if (std::isinf(param_)) d["p"] = "inf";
        else d["p"] = param_;
    }
    if (kind_ == NormKind::f_eps_fiber) d["eps"] = param_;
    if (!matrix_.empty()) d["matrix"] = matrix_;
    if (kind_ == NormKind::custom && matrix_.empty()) d["name"] = name_;
    d["scale"] = scale_;
    return d;
}

DualResult dual_norm_numeric(const MinkowskiNorm& h, std::span<const double> alpha, const DualOptions& opts) {
    const std::size_t n = static_cast<std::size_t>(h.dim());
    if (alpha.size() != n) throw DomainError("dual_norm: covector dimension mismatch");
    for (double a : alpha)
        if (!std::isfinite(a)) throw DomainError("dual_norm: covector must be finite");

    DualResult out;
    const double alpha_len = euclid(alpha);
    if (alpha_len == 0.0) {
        out.maximizer.assign(n, 0.0);
        out.maximizer[0] = 1.0 / h(out.maximizer);
        return out;
    }
    auto ratio = [&](const Vec& t) { return dot(alpha, t) / h(t); };

    std::vector<Vec> starts;
    for (std::size_t i = 0; i < n; ++i) {
        Vec e(n, 0.0);
        e[i] = 1.0;
        starts.push_back(e);
        e[i] = -1.0;
        starts.push_back(e);
    }
    starts.emplace_back(alpha.begin(), alpha.end());
    kernels::SplitMix64 rng(opts.seed);
    for (int k = 0; k < opts.random_starts; ++k) {
        Vec r(n);
        for (double& v : r) v = 2.0 * rng.uniform() - 1.0;
        if (euclid(r) == 0.0) r[0] = 1.0;
        starts.push_back(r);
    }
    for (Vec& s : starts) normalize_in_place(s);

    // The superlevel caps of a linear function on a convex surface are
    // connected, so ascent from the best few starts suffices.
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < starts.size(); ++i) ranked.emplace_back(-ratio(starts[i]), i);
    std::sort(ranked.begin(), ranked.end());
    const std::size_t runs = std::min<std::size_t>(3, ranked.size());

    double best = -HUGE_VAL;
    Vec best_t;
    bool best_converged = false;
    int total_iterations = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        Vec t = starts[ranked[r].second];
        double ft = ratio(t);
        double step = 0.25;
        bool converged = false;
        for (int it = 0; it < opts.max_iterations; ++it) {
            ++total_iterations;
            const double ht = h(t);
            Vec g = h.gradient(t);
            const double at = dot(alpha, t);
            for (std::size_t i = 0; i < n; ++i) g[i] = alpha[i] / ht - at * g[i] / (ht * ht);
            const double radial = dot(g, t);
            for (std::size_t i = 0; i < n; ++i) g[i] -= radial * t[i];
            const double gn = euclid(g);
            if (gn <= opts.tolerance * alpha_len / ht) {
                converged = true;
                break;
            }
            bool moved = false;
            while (step > 1e-15) {
                Vec cand(n);
                for (std::size_t i = 0; i < n; ++i) cand[i] = t[i] + step * g[i] / gn;
                normalize_in_place(cand);
                const double fc = ratio(cand);
                if (fc > ft) {
                    t = std::move(cand);
                    ft = fc;
                    step = std::min(1.0, 1.5 * step);
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) {
                converged = true;
                break;
            }
        }
        if (ft > best) {
            best = ft;
            best_t = t;
            best_converged = converged;
        }
    }

    // Golden-section polish along great circles through the incumbent.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int sweep = 0; sweep < 2 && n > 1; ++sweep) {
        std::vector<Vec> basis{best_t};
        for (std::size_t axis = 0; axis < n && basis.size() < n; ++axis) {
            Vec v(n, 0.0);
            v[axis] = 1.0;
            for (const Vec& b : basis) {
                const double c = dot(v, b);
                for (std::size_t i = 0; i < n; ++i) v[i] -= c * b[i];
            }
            if (euclid(v) < 0.1) continue;
            normalize_in_place(v);
            basis.push_back(std::move(v));
        }
        for (std::size_t d = 1; d < basis.size(); ++d) {
            const Vec& v = basis[d];
            auto along = [&](double s) {
                Vec p(n);
                for (std::size_t i = 0; i < n; ++i) p[i] = std::cos(s) * best_t[i] + std::sin(s) * v[i];
                return p;
            };
            double lo = -1e-3, hi = 1e-3;
            double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
            double f1 = ratio(along(x1)), f2 = ratio(along(x2));
            for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
                if (f1 < f2) {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + inv_phi * (hi - lo);
                    f2 = ratio(along(x2));
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - inv_phi * (hi - lo);
                    f1 = ratio(along(x1));
                }
            }
            Vec cand = along(0.5 * (lo + hi));
            normalize_in_place(cand);
            const double fc = ratio(cand);
            if (fc > best) {
                best = fc;
                best_t = std::move(cand);
            }
        }
    }

    if (!best_converged) {
        std::ostringstream os;
        os << "dual_norm: projected ascent did not settle within " << opts.max_iterations
           << " iterations (best value " << best << ")";
        throw NumericalError(os.str(), best);
    }
    out.value = best;
    out.iterations = total_iterations;
    const double hb = h(best_t);
    out.maximizer.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.maximizer[i] = best_t[i] / hb;
    return out;
}

double dual_norm(const MinkowskiNorm& h, std::span<const double> alpha, const DualOptions& opts) {
    if (auto d = h.analytic_dual(alpha)) return *d;
    return dual_norm_numeric(h, alpha, opts).value;
}

kernels::Box wulff_bounding_box(const MinkowskiNorm& h, double radius) {
    const int n = h.dim();
    kernels::Box box;
    box.lo.resize(n);
    box.hi.resize(n);
    for (int i = 0; i < n; ++i) {
        Vec e(n, 0.0);
        e[i] = 1.0;
        double w = 0.0;
        try {
            w = dual_norm(h, e);
        } catch (const NumericalError& err) {
            throw NumericalError(std::string("wulff_bounding_box: bounding box not found: ") + err.what(), err.best());
        }
        if (!(w > 0.0) || !std::isfinite(w)) {
            std::ostringstream os;
            os << "wulff_bounding_box: bounding box not found (support value " << w << " along axis " << i << ")";
            throw NumericalError(os.str(), w);
        }
        box.lo[i] = -radius * w;
        box.hi[i] = radius * w;
    }
    return box;
}

double sphere_integral(int n, const std::function<double(std::span<const double>)>& f, double rel_tol) {
    constexpr double pi = std::numbers::pi;
    quad::Options o;
    o.rel_tol = rel_tol;
    o.abs_tol = 0.0;
    if (n == 2) {
        std::vector<double> pts;
        for (int k = 0; k <= 8; ++k) pts.push_back(k * pi / 4.0);
        return quad::integrate_pieces(
                   [&](double phi) {
                       const double t[2] = {std::cos(phi), std::sin(phi)};
                       return f(t);
                   },
                   pts, o)
            .value;
    }
    if (n == 3) {
        std::vector<double> phis, psis;
        for (int k = 0; k <= 8; ++k) phis.push_back(k * pi / 4.0);
        for (int k = 0; k <= 4; ++k) psis.push_back(k * pi / 4.0);
        quad::Options inner = o;
        inner.rel_tol = 0.1 * rel_tol;
        return quad::integrate_pieces(
                   [&](double phi) {
                       const double c = std::cos(phi), s = std::sin(phi);
                       return quad::integrate_pieces(
                                  [&](double psi) {
                                      const double sp = std::sin(psi);
                                      const double t[3] = {sp * c, sp * s, std::cos(psi)};
                                      return f(t) * sp;
                                  },
                                  psis, inner)
                           .value;
                   },
                   phis, o)
            .value;
    }
    throw DomainError("sphere_integral: only n = 2 or n = 3 is supported");
}

VolumeEstimate wulff_volume(const MinkowskiNorm& h, const VolumeOptions& opts) {
    const int n = h.dim();
    VolumeEstimate out;
    if (opts.method == VolumeMethod::automatic && (h.kind() == NormKind::euclidean || h.kind() == NormKind::lp)) {
        // Unit lp ball: 2^n Gamma(1 + 1/p)^n / Gamma(1 + n/p).
        const double p = h.parameter();
        const double unit = std::isinf(p) ? std::pow(2.0, n)
                                          : std::exp(n * std::log(2.0) + n * std::lgamma(1.0 + 1.0 / p) -
                                                     std::lgamma(1.0 + n / p));
        out.method = VolumeMethod::closed_form;
        out.value = unit / std::pow(h.scale(), n);
        return out;
    }
    const bool use_quadrature =
        opts.method == VolumeMethod::quadrature || (opts.method == VolumeMethod::automatic && n <= 3);
    if (use_quadrature) {
        if (n > 3) throw DomainError("wulff_volume: quadrature is available for n <= 3 only");
        out.method = VolumeMethod::quadrature;
        if (n == 1) {
            const double plus = 1.0, minus = -1.0;
            out.value = 1.0 / h(std::span<const double>(&plus, 1)) + 1.0 / h(std::span<const double>(&minus, 1));
        } else {
            const double nn = n;
            out.value = sphere_integral(n, [&](std::span<const double> t) { return std::pow(h(t), -nn); }, 1e-12) / nn;
            out.std_error = 1e-12 * out.value;
        }
        return out;
    }
    const kernels::Box box = wulff_bounding_box(h, 1.0);
    const auto est = kernels::integrate([&](std::span<const double> x) { return h(x) < 1.0 ? 1.0 : 0.0; }, box,
                                        opts.samples, opts.seed, opts.execution);
    out.method = VolumeMethod::monte_carlo;
    out.value = est.value;
    out.std_error = est.std_error;
    out.samples = est.samples;
    out.seed = est.seed;
    out.workers = est.workers;
    return out;
}

MinkowskiNorm normalize(const MinkowskiNorm& h, const VolumeOptions& opts) {
    const double vol = wulff_volume(h, opts).value;
    const double c = std::pow(vol / constants::omega(h.dim()), 1.0 / h.dim());
    return h.scaled(c);
}

double eikonal_residual(const MinkowskiNorm& h, std::span<const Vec> samples, bool force_finite_difference) {
    double worst = 0.0;
    for (const Vec& x : samples) {
        if (euclid(x) == 0.0) throw DomainError("eikonal_residual: samples must avoid the origin");
        const Vec g = h.gradient(x, force_finite_difference);
        worst = std::max(worst, std::abs(dual_norm(h, g) - 1.0));
    }
    return worst;
}

namespace {

void reject_unknown(const nlohmann::json& d, std::initializer_list<const char*> allowed, const char* what) {
    for (auto it = d.begin(); it != d.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(std::string(what) + ": unknown key '" + it.key() + "'");
    }
}

double read_exponent(const nlohmann::json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return HUGE_VAL;
        throw ConfigError("norm descriptor: 'p' must be a number or \"inf\"");
    }
    if (!v.is_number()) throw ConfigError("norm descriptor: 'p' must be a number or \"inf\"");
    return v.get<double>();
}

}  // namespace

MinkowskiNorm norm_from_descriptor(const nlohmann::json& d) {
    if (!d.is_object()) throw ConfigError("norm descriptor must be an object");
    reject_unknown(d, {"kind", "n", "p", "eps", "matrix", "normalized", "scale", "name"}, "norm descriptor");
    if (!d.contains("kind") || !d["kind"].is_string()) throw ConfigError("norm descriptor: missing string 'kind'");
    if (!d.contains("n") || !d["n"].is_number_integer()) throw ConfigError("norm descriptor: missing integer 'n'");
    const std::string kind = d["kind"].get<std::string>();
    const int n = d["n"].get<int>();
    if (n < 1) throw ConfigError("norm descriptor: 'n' must be positive");
    try {
        MinkowskiNorm h = MinkowskiNorm::euclidean(n);
        if (kind == "euclidean") {
            h = MinkowskiNorm::euclidean(n);
        } else if (kind == "lp") {
            if (!d.contains("p")) throw ConfigError("norm descriptor: lp requires 'p'");
            h = MinkowskiNorm::lp(n, read_exponent(d["p"]));
        } else if (kind == "f_eps_fiber") {
            if (!d.contains("eps") || !d["eps"].is_number()) throw ConfigError("norm descriptor: f_eps_fiber requires 'eps'");
            h = MinkowskiNorm::f_eps_fiber(n, d["eps"].get<double>());
        } else if (kind == "custom") {
            if (!d.contains("matrix") || !d["matrix"].is_array())
                throw ConfigError("norm descriptor: custom norms are described by an n x n 'matrix'");
            std::vector<double> m;
            for (const auto& row : d["matrix"]) {
                if (row.is_array()) {
                    for (const auto& v : row) m.push_back(v.get<double>());
                } else {
                    m.push_back(row.get<double>());
                }
            }
            h = MinkowskiNorm::linear_image(n, m, d.contains("p") ? read_exponent(d["p"]) : 2.0);
        } else {
            throw ConfigError("norm descriptor: unknown kind '" + kind + "'");
        }
        if (d.contains("scale")) h = h.scaled(d["scale"].get<double>());
        if (d.value("normalized", false)) h = normalize(h);
        return h;
    } catch (const DomainError& e) {
        throw ConfigError(std::string("norm descriptor: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("norm descriptor: ") + e.what());
    }
}

}  // namespace finsler
