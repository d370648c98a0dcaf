#include "finsler/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/kernels.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/special.hpp"

namespace finsler {

std::vector<double> Profile::pieces() const {
    std::vector<double> pts{0.0};
    for (double b : breakpoints)
        if (b > 0.0 && b < support) pts.push_back(b);
    pts.push_back(support);
    return pts;
}

Profile Profile::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw DomainError("Profile::scaled: factor must be positive");
    Profile q = *this;
    auto v = value;
    auto d = derivative;
    q.value = [v, lambda](double r) { return lambda * v(r); };
    q.derivative = [d, lambda](double r) { return lambda * d(r); };
    q.sup = sup * lambda;
    q.params["scale"] = params.value("scale", 1.0) * lambda;
    return q;
}

nlohmann::json Profile::descriptor() const {
    nlohmann::json d = params;
    d["kind"] = kind;
    return d;
}

namespace profiles {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

Profile cone(double radius, double height) {
    require(radius > 0.0 && height > 0.0, "cone: radius and height must be positive");
    Profile g;
    g.kind = "cone";
    g.params = {{"R", radius}, {"height", height}};
    g.value = [=](double r) { return height * std::max(0.0, 1.0 - r / radius); };
    g.derivative = [=](double r) { return r < radius ? -height / radius : 0.0; };
    g.support = radius;
    g.sup = height;
    return g;
}

Profile plateau(double height, double slope, double radius) {
    require(height > 0.0 && slope > 0.0 && radius > 0.0, "plateau: parameters must be positive");
    const double edge = radius - height / slope;
    require(edge > 0.0, "plateau: the plateau must have positive radius (height < slope * radius)");
    Profile g;
    g.kind = "plateau";
    g.params = {{"height", height}, {"slope", slope}, {"R", radius}};
    g.value = [=](double r) { return std::min(height, slope * std::max(0.0, radius - r)); };
    g.derivative = [=](double r) { return (r > edge && r < radius) ? -slope : 0.0; };
    g.support = radius;
    g.breakpoints = {edge};
    g.sup = height;
    return g;
}

Profile ring(double center, double width, double height) {
    require(width > 0.0 && height > 0.0 && center >= width, "ring: requires center >= width > 0 and height > 0");
    Profile g;
    g.kind = "ring";
    g.params = {{"center", center}, {"width", width}, {"height", height}};
    const double k = std::numbers::pi / (2.0 * width);
    g.value = [=](double r) {
        if (std::abs(r - center) >= width) return 0.0;
        const double c = std::cos(k * (r - center));
        return height * c * c;
    };
    g.derivative = [=](double r) {
        if (std::abs(r - center) >= width) return 0.0;
        return -height * k * std::sin(2.0 * k * (r - center));
    };
    g.support = center + width;
    if (center - width > 0.0) g.breakpoints.push_back(center - width);
    g.breakpoints.push_back(center);
    g.monotone = false;
    g.sup = height;
    return g;
}

Profile power_bump(double a, double b, double radius, double height) {
    require(a > 0.0 && b >= 1.0 && radius > 0.0 && height > 0.0,
            "power_bump: requires a > 0, b >= 1, positive radius and height");
    Profile g;
    g.kind = "power_bump";
    g.params = {{"a", a}, {"b", b}, {"R", radius}, {"height", height}};
    g.value = [=](double r) {
        if (r >= radius) return 0.0;
        return height * std::pow(1.0 - std::pow(r / radius, a), b);
    };
    g.derivative = [=](double r) {
        if (r >= radius || r <= 0.0) return (r <= 0.0 && a == 1.0) ? -height * b / radius : 0.0;
        const double s = r / radius;
        return -height * b * a / radius * std::pow(s, a - 1.0) * std::pow(1.0 - std::pow(s, a), b - 1.0);
    };
    g.support = radius;
    g.derivative_power_at_zero = a < 1.0 ? a - 1.0 : 0.0;
    g.sup = height;
    return g;
}

Profile morrey_extremal(double p, int n, double radius) {
    require(p > n && n >= 1, "morrey_extremal: requires p > n");
    const double a = (p - n) / (p - 1.0);
    Profile g = power_bump(a, 1.0, radius, 1.0);
    g.kind = "morrey_extremal";
    g.params = {{"p", p}, {"n", n}, {"R", radius}};
    return g;
}

double talenti_h_integral(double p, int n, double s) {
    if (s <= 0.0) return 0.0;
    const double e0 = (1.0 - n) / (p - 1.0);
    const double e1 = 1.0 / (p - 1.0);
    auto h = [=](double r) { return std::pow(r, e0) * std::pow(std::max(0.0, 1.0 - std::pow(r, n)), e1); };
    quad::Options o;
    o.abs_tol = 0.0;
    o.rel_tol = 1e-14;
    o.left_power = e0;
    if (s >= 1.0) {
        o.right_power = e1;
        return quad::integrate(h, 0.0, 1.0, o).value;
    }
    return quad::integrate(h, 0.0, s, o).value;
}

Profile talenti_l1_extremal(double p, int n, double radius) {
    require(p > n && n >= 1, "talenti_l1_extremal: requires p > n");
    require(radius > 0.0, "talenti_l1_extremal: radius must be positive");
    const double e0 = (1.0 - n) / (p - 1.0);
    const double e1 = 1.0 / (p - 1.0);
    const double top = talenti_h_integral(p, n, 1.0);
    auto h = [=](double r) { return std::pow(r, e0) * std::pow(std::max(0.0, 1.0 - std::pow(r, n)), e1); };
    Profile g;
    g.kind = "talenti_l1_extremal";
    g.params = {{"p", p}, {"n", n}, {"R", radius}};
    g.value = [=](double rho) {
        const double s = rho / radius;
        if (s >= 1.0) return 0.0;
        if (s < 0.5) return top - talenti_h_integral(p, n, s);
        quad::Options o;
        o.abs_tol = 0.0;
        o.rel_tol = 1e-14;
        o.right_power = e1;
        return quad::integrate(h, s, 1.0, o).value;
    };
    g.derivative = [=](double rho) {
        const double s = rho / radius;
        if (s >= 1.0 || s <= 0.0) return 0.0;
        return -h(s) / radius;
    };
    g.support = radius;
    g.derivative_power_at_zero = e0;
    g.derivative_power_at_support = e1;
    g.sup = top;
    return g;
}

Profile bessel_eigen(int n, double mu_bar, double radius) {
    require(n >= 1 && mu_bar >= 0.0 && radius > 0.0, "bessel_eigen: invalid parameters");
    const double s = -(n - 2.0) / 2.0;
    const double j = special::bessel_first_zero(mu_bar);
    const double k = j / radius;
    Profile g;
    g.kind = "bessel_eigen";
    g.params = {{"n", n}, {"mu_bar", mu_bar}, {"R", radius}};
    const double lead = std::pow(0.5 * k, mu_bar) / std::tgamma(mu_bar + 1.0);
    const double e = s + mu_bar;
    g.value = [=](double rho) {
        if (rho >= radius) return 0.0;
        if (rho <= 0.0) return e == 0.0 ? lead : (e > 0.0 ? 0.0 : HUGE_VAL);
        if (e == 0.0 && k * rho < 1e-4) {
            const double z = 0.25 * k * k * rho * rho;
            return lead * (1.0 - z / (mu_bar + 1.0) + z * z / (2.0 * (mu_bar + 1.0) * (mu_bar + 2.0)));
        }
        return std::pow(rho, s) * special::bessel_j(mu_bar, k * rho);
    };
    g.derivative = [=](double rho) {
        if (rho >= radius || rho <= 0.0) return 0.0;
        if (e == 0.0 && k * rho < 1e-4) {
            const double z = 0.25 * k * k * rho * rho;
            const double q = 0.5 * k * k * rho;
            return lead * q * (-1.0 / (mu_bar + 1.0) + z / ((mu_bar + 1.0) * (mu_bar + 2.0)));
        }
        const double x = k * rho;
        return s * std::pow(rho, s - 1.0) * special::bessel_j(mu_bar, x) +
               k * std::pow(rho, s) * special::bessel_j_prime(mu_bar, x);
    };
    g.support = radius;
    g.value_power_at_zero = e;
    g.derivative_power_at_zero = e == 0.0 ? 0.0 : e - 1.0;
    g.sup = e == 0.0 ? lead : HUGE_VAL;
    return g;
}

Profile hardy_cap(double p, int n, double delta, double cap) {
    const double s = (n - p) / p - delta;
    require(n > p && p > 1.0, "hardy_cap: requires n > p > 1");
    require(s > 0.0, "hardy_cap: delta must be smaller than (n - p) / p");
    require(cap > 1.0, "hardy_cap: cap must exceed 1");
    const double rc = std::pow(cap, -1.0 / s);
    Profile g;
    g.kind = "hardy_cap";
    g.params = {{"p", p}, {"n", n}, {"delta", delta}, {"cap", cap}};
    g.value = [=](double r) {
        if (r >= 1.0) return 0.0;
        return std::pow(std::max(r, rc), -s) - 1.0;
    };
    g.derivative = [=](double r) {
        if (r >= 1.0 || r <= rc) return 0.0;
        return -s * std::pow(r, -s - 1.0);
    };
    g.support = 1.0;
    g.breakpoints = {rc};
    g.sup = cap - 1.0;
    return g;
}

Profile table(std::vector<double> nodes, std::vector<double> values) {
    require(nodes.size() == values.size() && nodes.size() >= 2, "table: needs at least two (node, value) pairs");
    require(nodes.front() == 0.0, "table: first node must be 0");
    for (std::size_t i = 1; i < nodes.size(); ++i) require(nodes[i] > nodes[i - 1], "table: nodes must increase");
    require(values.back() == 0.0, "table: last value must be 0");
    for (double v : values) require(v >= 0.0, "table: values must be nonnegative");
    Profile g;
    g.kind = "table";
    g.params = {{"nodes", nodes}, {"values", values}};
    g.monotone = std::is_sorted(values.rbegin(), values.rend());
    g.sup = *std::max_element(values.begin(), values.end());
    g.support = nodes.back();
    g.breakpoints.assign(nodes.begin() + 1, nodes.end() - 1);
    auto locate = [nodes](double r) {
        const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
        return static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - nodes.begin())) - 1;
    };
    g.value = [=](double r) {
        if (r >= nodes.back()) return 0.0;
        const std::size_t i = locate(r);
        const double t = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
        return values[i] + t * (values[i + 1] - values[i]);
    };
    g.derivative = [=](double r) {
        if (r >= nodes.back()) return 0.0;
        const std::size_t i = locate(r);
        return (values[i + 1] - values[i]) / (nodes[i + 1] - nodes[i]);
    };
    return g;
}

Profile random_profile(std::uint64_t seed, const RandomSpec& spec) {
    kernels::SplitMix64 rng(seed);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    const double radius = spec.max_support * uni(0.3, 1.0);
    const double height = uni(0.2, 3.0);
    if (spec.vanish_at_zero) {
        const double width = radius * uni(0.1, 0.45);
        const double center = uni(width * 1.05, radius - width);
        return ring(center, width, height);
    }
    const int families = spec.monotone_only ? 4 : 5;
    const int pick = static_cast<int>(rng.next() % families);
    switch (pick) {
        case 0: return power_bump(uni(spec.min_a, spec.min_a + 2.5), uni(1.0, 3.0), radius, height);
        case 1: return cone(radius, height);
        case 2: return plateau(height, height / (radius * uni(0.2, 0.9)), radius);
        case 3: {
            const int m = 3 + static_cast<int>(rng.next() % 6);
            std::vector<double> nodes(m + 1), values(m + 1);
            std::vector<double> cuts(m - 1);
            for (double& c : cuts) c = uni(0.0, 1.0);
            std::sort(cuts.begin(), cuts.end());
            nodes[0] = 0.0;
            for (int i = 1; i < m; ++i) nodes[i] = radius * (0.05 + 0.9 * cuts[i - 1]);
            nodes[m] = radius;
            for (int i = 1; i < m; ++i)
                if (nodes[i] <= nodes[i - 1]) nodes[i] = nodes[i - 1] + 1e-3 * radius;
            std::vector<double> drops(m);
            for (double& d : drops) d = uni(0.05, 1.0);
            double total = 0.0;
            for (double d : drops) total += d;
            double level = height;
            for (int i = 0; i < m; ++i) {
                values[i] = level;
                level -= height * drops[i] / total;
            }
            values[m] = 0.0;
            return table(nodes, values);
        }
        default: {
            const double width = radius * uni(0.15, 0.5);
            const double center = uni(width, radius - width);
            return ring(center, width, height);
        }
    }
}

}  // namespace profiles

Profile profile_from_descriptor(const nlohmann::json& d, int n) {
    if (!d.is_object()) throw ConfigError("profile descriptor must be an object");
    if (!d.contains("kind") || !d["kind"].is_string()) throw ConfigError("profile descriptor: missing string 'kind'");
    const std::string kind = d["kind"].get<std::string>();
    auto allow = [&](std::initializer_list<const char*> keys) {
        for (auto it = d.begin(); it != d.end(); ++it) {
            if (it.key() == "kind" || it.key() == "scale") continue;
            if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
                throw ConfigError("profile descriptor (" + kind + "): unknown key '" + it.key() + "'");
        }
    };
    auto num = [&](const char* key, double fallback) {
        if (!d.contains(key)) return fallback;
        if (!d[key].is_number()) throw ConfigError(std::string("profile descriptor: '") + key + "' must be a number");
        return d[key].get<double>();
    };
    auto need = [&](const char* key) {
        if (!d.contains(key)) throw ConfigError("profile descriptor (" + kind + "): missing '" + key + "'");
        return num(key, 0.0);
    };
    const int dim = d.contains("n") ? d["n"].get<int>() : n;
    try {
        Profile g;
        if (kind == "cone") {
            allow({"R", "height"});
            g = profiles::cone(num("R", 1.0), num("height", 1.0));
        } else if (kind == "plateau") {
            allow({"height", "slope", "R"});
            g = profiles::plateau(num("height", 1.0), num("slope", 2.0), num("R", 1.0));
        } else if (kind == "ring") {
            allow({"center", "width", "height"});
            g = profiles::ring(need("center"), need("width"), num("height", 1.0));
        } else if (kind == "power_bump") {
            allow({"a", "b", "R", "height"});
            g = profiles::power_bump(need("a"), num("b", 1.0), num("R", 1.0), num("height", 1.0));
        } else if (kind == "morrey_extremal" || kind == "u_R") {
            allow({"p", "n", "R"});
            g = profiles::morrey_extremal(need("p"), dim, num("R", 1.0));
        } else if (kind == "talenti_l1_extremal") {
            allow({"p", "n", "R"});
            g = profiles::talenti_l1_extremal(need("p"), dim, num("R", 1.0));
        } else if (kind == "bessel_eigen") {
            allow({"n", "mu", "mu_bar", "avr", "R"});
            double mu_bar = 0.0;
            if (d.contains("mu_bar")) {
                mu_bar = num("mu_bar", 0.0);
            } else {
                const double mu = num("mu", 0.0);
                const double avr = num("avr", 1.0);
                mu_bar = std::sqrt(std::max(0.0, 0.25 * (dim - 2.0) * (dim - 2.0) - mu * std::pow(avr, -2.0 / dim)));
            }
            g = profiles::bessel_eigen(dim, mu_bar, num("R", 1.0));
        } else if (kind == "hardy_cap") {
            allow({"p", "n", "delta", "cap"});
            g = profiles::hardy_cap(need("p"), dim, need("delta"), num("cap", 100.0));
        } else if (kind == "table") {
            allow({"nodes", "values"});
            if (!d.contains("nodes") || !d.contains("values")) throw ConfigError("profile descriptor: table needs nodes and values");
            g = profiles::table(d["nodes"].get<std::vector<double>>(), d["values"].get<std::vector<double>>());
        } else {
            throw ConfigError("profile descriptor: unknown kind '" + kind + "'");
        }
        if (d.contains("scale")) g = g.scaled(num("scale", 1.0));
        return g;
    } catch (const DomainError& e) {
        throw ConfigError(std::string("profile descriptor: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("profile descriptor: ") + e.what());
    }
}

}  // namespace finsler
