#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "finsler/constants.hpp"
#include "finsler/errors.hpp"
#include "finsler/manifold.hpp"
#include "finsler/pde.hpp"
#include "finsler/profiles.hpp"
#include "finsler/rearrange.hpp"
#include "finsler/report.hpp"
#include "finsler/suite.hpp"
#include "finsler/verify.hpp"

namespace finsler::cli {

namespace {

using json = nlohmann::json;

// Reads options with defaults, records what was used and rejects the rest.
class Options {
public:
    Options(const json& in, std::string where) : in_(in.is_null() ? json::object() : in), where_(std::move(where)) {
        if (!in_.is_object()) throw ConfigError(where_ + ": options must be an object");
    }

    template <class T>
    T get(const std::string& key, const T& fallback) {
        T v = fallback;
        if (in_.contains(key)) v = convert<T>(key);
        used_[key] = v;
        return v;
    }

    template <class T>
    T require(const std::string& key) {
        if (!in_.contains(key)) throw ConfigError(where_ + ": missing '" + key + "'");
        T v = convert<T>(key);
        used_[key] = v;
        return v;
    }

    bool has(const std::string& key) const { return in_.contains(key); }

    /// Raw value, recorded as given.
    json raw(const std::string& key, const json& fallback = nullptr) {
        json v = in_.contains(key) ? in_[key] : fallback;
        if (!v.is_null()) used_[key] = v;
        return v;
    }

    void record(const std::string& key, const json& v) { used_[key] = v; }

    /// Throws on keys that were never read.
    json finish() const {
        for (const auto& [k, _] : in_.items())
            if (!used_.contains(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
        return used_;
    }

private:
    template <class T>
    T convert(const std::string& key) const {
        try {
            return in_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + ": bad value for '" + key + "': " + in_.at(key).dump());
        }
    }

    json in_;
    std::string where_;
    json used_ = json::object();
};

// A scalar or a list of scalars.
template <class T>
std::vector<T> list(Options& o, const std::string& key, const std::vector<T>& fallback) {
    json v = o.raw(key);
    if (v.is_null()) {
        o.record(key, fallback);
        return fallback;
    }
    try {
        if (v.is_array()) return v.get<std::vector<T>>();
        return {v.get<T>()};
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + key + "': " + v.dump());
    }
}

json descriptor(const json& v, bool instance) {
    if (v.is_string()) return instance ? parse_instance_descriptor(v.get<std::string>()) : parse_descriptor(v.get<std::string>());
    if (!v.is_object()) throw ConfigError("descriptor must be a string or an object: " + v.dump());
    return v;
}

FinslerInstance instance_option(Options& o) {
    const json d = descriptor(o.raw("instance", "euclidean:n=2"), true);
    o.record("instance", d);
    return instance_from_descriptor(d);
}

Vec point_option(Options& o, const std::string& key, int n) {
    Vec x = o.get<Vec>(key, Vec(n, 0.0));
    if (x.size() != static_cast<std::size_t>(n)) throw ConfigError("'" + key + "' must have " + std::to_string(n) + " entries");
    return x;
}

json with_header(const std::string& command, json options, json body, bool pass) {
    json out{{"schema", 1}, {"command", command}, {"options", std::move(options)}};
    for (auto& [k, v] : body.items()) out[k] = v;
    out["pass"] = pass;
    return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_csv(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

TaskOutput constants_command(const json& options) {
    Options o(options, "constants");
    const auto ps = list<double>(o, "p", {2.0});
    const auto ns = list<int>(o, "n", {2});
    const auto avrs = list<double>(o, "avr", {1.0});
    const auto mus = list<double>(o, "mu", {0.0});
    const auto vols = list<double>(o, "vol", {});
    const json opts = o.finish();
    json rows = json::array();
    std::ostringstream csv;
    csv << "p,n,avr,mu,vol,T_pn,T_MS,C_pn,C_MS,eta,hardy,mu_bar,j_mu_bar,S_muF\n";
    std::vector<std::optional<double>> volumes;
    if (vols.empty()) volumes.push_back(std::nullopt);
    for (double v : vols) volumes.emplace_back(v);
    for (double p : ps)
        for (int n : ns)
            for (double a : avrs)
                for (double mu : mus)
                    for (const auto& vol : volumes) {
                        const constants::SharpConstants c = constants::evaluate(p, n, a, mu, vol);
                        rows.push_back({{"p", p},
                                        {"n", n},
                                        {"avr", a},
                                        {"mu", mu},
                                        {"vol", c.volume},
                                        {"T_pn", optional_json(c.T_pn)},
                                        {"T_MS", optional_json(c.T_MS)},
                                        {"C_pn", optional_json(c.C_pn)},
                                        {"C_MS", optional_json(c.C_MS)},
                                        {"eta", optional_json(c.eta)},
                                        {"hardy", optional_json(c.hardy_const)},
                                        {"mu_bar", optional_json(c.mu_bar)},
                                        {"j_mu_bar", optional_json(c.j_mu_bar)},
                                        {"S_muF", optional_json(c.S_muF)}});
                        csv << format_double(p) << ',' << n << ',' << format_double(a) << ',' << format_double(mu) << ','
                            << format_double(c.volume) << ',' << optional_csv(c.T_pn) << ',' << optional_csv(c.T_MS) << ','
                            << optional_csv(c.C_pn) << ',' << optional_csv(c.C_MS) << ',' << optional_csv(c.eta) << ','
                            << optional_csv(c.hardy_const) << ',' << optional_csv(c.mu_bar) << ','
                            << optional_csv(c.j_mu_bar) << ',' << optional_csv(c.S_muF) << '\n';
                    }
    TaskOutput out;
    out.report = with_header("constants", opts, {{"rows", rows}}, true);
    out.tables.emplace_back("constants.csv", csv.str());
    return out;
}

TaskOutput verify_command(const json& options) {
    Options o(options, "verify");
    const std::string which = o.require<std::string>("inequality");
    const FinslerInstance m = instance_option(o);
    const int n = m.dim();
    TaskOutput out;
    json body;
    bool pass = false;

    if (which == "isoperimetric") {
        const json d = descriptor(o.raw("domain", "wulff:radius=1"), false);
        o.record("domain", d);
        const json opts = o.finish();
        const InequalityReport r = verify_isoperimetric(m, domain_from_descriptor(d));
        out.report = with_header("verify", opts, {{"report", r.to_json()}}, r.pass);
        return out;
    }

    static const std::set<std::string> known = {"morrey-support", "morrey-l1", "hardy", "bpv", "polya-szego", "hlp"};
    if (!known.contains(which)) throw ConfigError("verify: unknown inequality '" + which + "'");

    const int cases = o.get<int>("suite", 0);
    if (cases > 0) {
        SuiteOptions so;
        so.cases = cases;
        so.seed = o.get<std::uint64_t>("seed", so.seed);
        if (o.has("p")) so.p = o.get<double>("p", 2.0);
        std::string kind = which;
        std::replace(kind.begin(), kind.end(), '-', '_');
        const json opts = o.finish();
        const SuiteSummary s = random_suite(suite_kind_from_string(kind), m, so);
        out.report = with_header("verify", opts, {{"suite", s.to_json()}}, s.pass());
        return out;
    }

    json pd = descriptor(o.raw("profile", which == "morrey-l1" ? "talenti_l1_extremal" : "morrey_extremal"), false);
    double p_default = 2.0;
    if (pd.contains("p") && pd["p"].is_number()) p_default = pd["p"].get<double>();
    const double p = o.get<double>("p", p_default);
    const std::string pkind = pd.value("kind", "");
    if ((pkind == "morrey_extremal" || pkind == "talenti_l1_extremal") && !pd.contains("p")) pd["p"] = p;
    if (which == "bpv" && pd.value("kind", "") == "bessel_eigen" && !pd.contains("R")) pd["R"] = o.get<double>("radius", 1.0);
    o.record("profile", pd);
    const RadialFunction u{profile_from_descriptor(pd, n), point_option(o, "center", n), {}};
    InequalityReport r;
    if (which == "morrey-support") {
        r = verify_morrey_support(m, u, p);
    } else if (which == "morrey-l1") {
        r = verify_morrey_l1(m, u, p);
    } else if (which == "hardy") {
        r = verify_hardy(m, u, p, point_option(o, "x0", n));
    } else if (which == "bpv") {
        r = verify_bpv(m, o.get<double>("radius", 1.0), u, o.get<double>("mu", 0.0), point_option(o, "x0", n));
    } else if (which == "polya-szego") {
        r = polya_szego_check(u, m, normalize(m.norm()), p);
    } else {
        const double k = o.get<double>("weight_power", -1.0);
        r = hlp_check(u, m, normalize(m.norm()), Weight::power(k), p, point_option(o, "x0", n));
    }
    body["report"] = r.to_json();
    pass = r.pass;
    if (o.has("sweep")) {
        if (which != "morrey-support" && which != "morrey-l1")
            throw ConfigError("verify: --sweep applies to morrey-support and morrey-l1");
        const Schedule sched = parse_schedule(o.get<std::string>("sweep", ""));
        const SweepResult s = which == "morrey-support" ? sharpness_sweep_support(m, p, sched.values)
                                                        : sharpness_sweep_l1(m, p, sched.values);
        body["sweep"] = s.to_json();
        pass = pass && s.pass;
        out.tables.emplace_back("sweep.csv", s.to_csv());
    }
    out.report = with_header("verify", o.finish(), body, pass);
    return out;
}

TaskOutput sweep_command(const json& options) {
    Options o(options, "sweep");
    const std::string family = o.get<std::string>("family", "morrey-support");
    const FinslerInstance m = instance_option(o);
    const double p = o.require<double>("p");
    SweepResult s;
    if (family == "hardy") {
        const auto deltas = list<double>(o, "deltas", {0.2, 0.1, 0.05});
        s = hardy_near_extremal(m, p, deltas);
    } else {
        const Schedule sched = parse_schedule(o.get<std::string>("sweep", "R=1:64:geometric"));
        if (family == "morrey-support")
            s = sharpness_sweep_support(m, p, sched.values);
        else if (family == "morrey-l1")
            s = sharpness_sweep_l1(m, p, sched.values);
        else
            throw ConfigError("sweep: unknown family '" + family + "'");
    }
    TaskOutput out;
    out.report = with_header("sweep", o.finish(), {{"sweep", s.to_json()}}, s.pass);
    out.tables.emplace_back("sweep.csv", s.to_csv());
    return out;
}

TaskOutput pde_command(const json& options) {
    Options o(options, "pde");
    const std::string problem = o.get<std::string>("problem", "ep");
    json d = json::object();
    for (const char* k : {"n", "R", "mu", "lambda", "p", "q", "nodes", "levels"})
        if (o.has(k)) d[k] = o.raw(k);
    TaskOutput out;
    if (problem == "ep") {
        d["nonlinearity"] = "eigen";
        const pde::RadialBvp bvp = pde::bvp_from_descriptor(d);
        o.record("bvp", bvp.descriptor());
        const json opts = o.finish();
        const pde::Eigenpair e = pde::first_eigenvalue(bvp);
        const bool pass = std::abs(e.lambda - e.closed_form) <= 1e-6 * e.closed_form;
        out.report = with_header("pde", opts, {{"eigenpair", e.to_json()}}, pass);
        out.tables.emplace_back("profile.csv", e.profile.to_csv());
    } else if (problem == "p-problem") {
        d["nonlinearity"] = "power";
        if (!d.contains("q")) d["q"] = d.value("n", 2) == 2 ? 4.0 : 2.0 * d.value("n", 2) / (d.value("n", 2) - 2.0);
        const pde::RadialBvp bvp = pde::bvp_from_descriptor(d);
        o.record("bvp", bvp.descriptor());
        const bool coercivity = o.get<bool>("coercivity", true);
        const std::uint64_t seed = o.get<std::uint64_t>("seed", 20240601);
        const json opts = o.finish();
        const pde::MountainPass mp = pde::mountain_pass_solve(bvp);
        bool pass = mp.energy.residual < 1e-6 && mp.min_value >= -1e-10 && mp.energy_level > 0.0;
        json body{{"solution", mp.to_json()}};
        if (coercivity) {
            const pde::CoercivityCheck c = pde::coercivity_check(bvp, 100, seed);
            body["coercivity"] = c.to_json();
            pass = pass && c.pass;
        }
        out.report = with_header("pde", opts, body, pass);
        out.tables.emplace_back("profile.csv", mp.profile.to_csv());
    } else if (problem == "d-problem") {
        d["nonlinearity"] = o.get<std::string>("nonlinearity", "oscillatory");
        if (!d.contains("lambda")) d["lambda"] = 100.0;
        const pde::RadialBvp bvp = pde::bvp_from_descriptor(d);
        o.record("bvp", bvp.descriptor());
        pde::MultiplicityOptions mo;
        mo.k_max = o.get<int>("k_max", mo.k_max);
        mo.minimizer_nodes = o.get<int>("minimizer_nodes", mo.minimizer_nodes);
        const json opts = o.finish();
        const pde::MultiplicityResult r = pde::multiplicity_explore(bvp, mo);
        int index = 0;
        for (const auto& c : r.profiles)
            out.tables.emplace_back("profile_" + std::to_string(index++) + ".csv", c.profile.to_csv());
        // The explorer reports findings; a warning is not a failure.
        out.report = with_header("pde", opts, {{"multiplicity", r.to_json()}}, !r.profiles.empty());
    } else {
        throw ConfigError("pde: unknown problem '" + problem + "'");
    }
    return out;
}

TaskOutput avr_command(const json& options) {
    Options o(options, "avr");
    const FinslerInstance m = instance_option(o);
    const int n = m.dim();
    const auto radii = list<double>(o, "radii", {1.0, 2.0, 4.0, 8.0});
    AvrOptions a;
    a.ball.samples = o.get<std::uint64_t>("samples", 200000);
    a.ball.seed = o.get<std::uint64_t>("seed", a.ball.seed);
    a.ball.force_monte_carlo = o.get<bool>("monte_carlo", false);
    if (o.has("base_avr")) a.base_avr = o.get<double>("base_avr", 1.0);
    a.throw_on_violation = false;
    const Vec x0 = point_option(o, "x0", n);
    const json opts = o.finish();
    const AvrEstimate e = avr(m, x0, radii, a);
    std::ostringstream csv;
    csv << "r,volume,std_error,ratio,ratio_error\n";
    for (std::size_t i = 0; i < e.curve.radii.size(); ++i)
        csv << format_double(e.curve.radii[i]) << ',' << format_double(e.curve.volumes[i].value) << ','
            << format_double(e.curve.volumes[i].std_error) << ',' << format_double(e.curve.ratios[i]) << ','
            << format_double(e.curve.ratio_errors[i]) << '\n';
    const bool inside = e.point + 3.0 * e.std_error >= e.lo && e.point - 3.0 * e.std_error <= e.hi;
    json body{{"estimate", e.point},           {"std_error", e.std_error},
              {"interval", {e.lo, e.hi}},      {"method", e.method},
              {"radii", e.curve.radii},        {"ratios", e.curve.ratios},
              {"ratio_errors", e.curve.ratio_errors}, {"bishop_gromov", e.curve.bishop_gromov}};
    TaskOutput out;
    out.report = with_header("avr", opts, body, inside && e.curve.bishop_gromov);
    out.tables.emplace_back("avr.csv", csv.str());
    return out;
}

TaskOutput run_task(const json& task) {
    if (!task.is_object() || !task.contains("command")) throw ConfigError("task needs a 'command'");
    json opts = task;
    const std::string cmd = opts["command"].get<std::string>();
    opts.erase("command");
    opts.erase("id");
    if (cmd == "constants") return constants_command(opts);
    if (cmd == "verify") return verify_command(opts);
    if (cmd == "sweep") return sweep_command(opts);
    if (cmd == "pde") return pde_command(opts);
    if (cmd == "avr") return avr_command(opts);
    throw ConfigError("unknown command '" + cmd + "'");
}

bool RunOutput::pass() const {
    return std::all_of(tasks.begin(), tasks.end(), [](const auto& t) { return t.second.pass(); });
}

std::string RunOutput::summary_csv() const {
    std::ostringstream out;
    out << "task,command,pass\n";
    for (const auto& [id, t] : tasks)
        out << id << ',' << t.report.value("command", "") << ',' << (t.pass() ? "true" : "false") << '\n';
    return out.str();
}

RunOutput run_config(const json& config) {
    if (!config.is_object() || config.empty()) throw ConfigError("run: config is empty");
    for (const auto& [k, _] : config.items())
        if (k != "tasks" && k != "seed" && k != "threads") throw ConfigError("run: unknown key '" + k + "'");
    if (!config.contains("tasks") || !config["tasks"].is_array() || config["tasks"].empty())
        throw ConfigError("run: 'tasks' must be a non-empty array");
    std::set<std::string> ids;
    RunOutput out;
    int index = 0;
    for (const json& t : config["tasks"]) {
        if (!t.is_object()) throw ConfigError("run: every task must be an object");
        const std::string id = t.value("id", "task" + std::to_string(index));
        ++index;
        if (!ids.insert(id).second) throw ConfigError("run: duplicate task id '" + id + "'");
        json task = t;
        const std::string cmd = task.value("command", "");
        const bool seeded = cmd == "avr" || (cmd == "verify" && task.contains("suite")) ||
                            (cmd == "pde" && task.value("problem", "") == "p-problem");
        if (config.contains("seed") && !task.contains("seed") && seeded) task["seed"] = config["seed"];
        out.tasks.emplace_back(id, run_task(task));
    }
    return out;
}

}  // namespace finsler::cli
