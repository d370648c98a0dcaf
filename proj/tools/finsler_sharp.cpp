// finsler-sharp: command-line front end.
// Exit codes: 0 all pass flags true, 1 some check failed, 2 bad configuration,
// 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "finsler/errors.hpp"
#include "finsler/kernels.hpp"
#include "finsler/suite.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace finsler;

namespace {

constexpr int kPass = 0, kFail = 1, kConfig = 2, kNumerical = 3;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ConfigError("config '" + path + "' is empty");
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

// Flag values that were given on the command line become JSON options.
struct FlagSet {
    std::vector<std::function<void(json&)>> setters;

    template <class T>
    CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(flag, *value, help);
        setters.push_back([opt, value, key](json& j) {
            if (opt->count() > 0) j[key] = *value;
        });
        return opt;
    }

    CLI::Option* add_descriptor(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        return add<std::string>(app, flag, key, help);
    }

    void apply(json& j) const {
        for (const auto& s : setters) s(j);
    }
};

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out_dir;
};

void apply_threads(const Common& c, std::optional<int> from_config = std::nullopt) {
    int threads = 0;
    if (from_config) threads = *from_config;
    if (const char* env = std::getenv("FINSLER_SHARP_THREADS")) {
        try {
            threads = std::stoi(env);
        } catch (const std::exception&) {
            throw ConfigError(std::string("FINSLER_SHARP_THREADS: not an integer: ") + env);
        }
    }
    if (c.threads) threads = *c.threads;
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (threads > 0) kernels::set_threads(threads);
}

int emit(const cli::TaskOutput& t, const std::string& out, const std::string& out_dir, bool csv_stdout,
         const std::string& csv_path, const std::string& report_name = "report.json") {
    const std::string text = dump_report(t.report);
    if (!out_dir.empty()) {
        write_file(fs::path(out_dir) / report_name, text);
        for (const auto& [name, body] : t.tables) write_file(fs::path(out_dir) / name, body);
    }
    if (!csv_path.empty() && !t.tables.empty()) write_file(csv_path, t.tables.front().second);
    if (!out.empty())
        write_file(out, text);
    else if (csv_stdout && !t.tables.empty())
        std::cout << t.tables.front().second;
    else
        std::cout << text;
    return t.pass() ? kPass : kFail;
}

json numerical_report(const std::string& command, const std::string& what) {
    return {{"schema", 1}, {"command", command}, {"error", what}, {"type", "numerical"}, {"pass", false}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sharp Sobolev-type constants, inequality checks and radial PDEs on Finsler spaces", "finsler-sharp"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "finsler-sharp 1.0.0");
    Common common;
    std::uint64_t seed_value = 0;
    int threads_value = 0;
    CLI::Option* seed_opt = app.add_option("--seed", seed_value, "Random seed")->group("Global");
    CLI::Option* threads_opt = app.add_option("--threads", threads_value, "Worker threads (0: OpenMP default)")->group("Global");
    app.add_option("--out-dir", common.out_dir, "Directory for reports and CSV tables")->group("Global");
    app.fallthrough();

    std::string config_path, out_path, csv_path, format = "json";
    json options = json::object();
    std::string command;
    FlagSet flags;

    auto task_app = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON file with the command options");
        sub->callback([&command, name] { command = name; });
        return sub;
    };

    CLI::App* constants = task_app("constants", "Table of sharp constants");
    flags.add<std::vector<double>>(constants, "--p", "p", "Exponent(s)")->delimiter(',');
    flags.add<std::vector<int>>(constants, "--n", "n", "Dimension(s)")->delimiter(',');
    flags.add<std::vector<double>>(constants, "--avr", "avr", "Asymptotic volume ratio(s)")->delimiter(',');
    flags.add<std::vector<double>>(constants, "--mu", "mu", "Hardy weight(s)")->delimiter(',');
    flags.add<std::vector<double>>(constants, "--vol", "vol", "Domain volume(s)")->delimiter(',');
    constants->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    constants->add_option("--out", out_path, "Write the JSON report here");

    CLI::App* verify = task_app("verify", "Check one inequality instance or a randomized suite");
    flags.add<std::string>(verify, "--inequality", "inequality",
                           "morrey-support|morrey-l1|hardy|bpv|polya-szego|hlp|isoperimetric");
    flags.add_descriptor(verify, "--instance", "instance", "Instance descriptor, e.g. euclidean:n=2");
    flags.add_descriptor(verify, "--profile", "profile", "Profile descriptor, e.g. morrey_extremal:p=4");
    flags.add_descriptor(verify, "--domain", "domain", "Domain descriptor (isoperimetric)");
    flags.add<double>(verify, "--p", "p", "Exponent");
    flags.add<double>(verify, "--mu", "mu", "Hardy weight (bpv)");
    flags.add<double>(verify, "--radius", "radius", "Wulff ball radius (bpv)");
    flags.add<double>(verify, "--weight-power", "weight_power", "Exponent k of the HLP weight r^k");
    flags.add<std::vector<double>>(verify, "--x0", "x0", "Pole")->delimiter(',');
    flags.add<std::vector<double>>(verify, "--center", "center", "Centre of the profile")->delimiter(',');
    flags.add<std::string>(verify, "--sweep", "sweep", "Sharpness sweep, e.g. R=1:64:geometric");
    flags.add<int>(verify, "--suite", "suite", "Run a randomized suite with this many cases");
    verify->add_option("--out", out_path, "Write the JSON report here");
    verify->add_option("--csv", csv_path, "Write the sweep table here");

    CLI::App* sweep = task_app("sweep", "Sharpness sweep of an extremal family");
    flags.add<std::string>(sweep, "--family", "family", "morrey-support|morrey-l1|hardy");
    flags.add_descriptor(sweep, "--instance", "instance", "Instance descriptor");
    flags.add<double>(sweep, "--p", "p", "Exponent");
    flags.add<std::string>(sweep, "--sweep", "sweep", "Schedule, e.g. R=1:64:geometric");
    flags.add<std::vector<double>>(sweep, "--deltas", "deltas", "Hardy family parameters")->delimiter(',');
    sweep->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sweep->add_option("--out", out_path, "Write the JSON report here");
    sweep->add_option("--csv", csv_path, "Write the table (R, lhs, rhs, ratio, target) here");

    CLI::App* pde = task_app("pde", "Radial eigenvalue, power and p-Laplacian problems on Wulff balls");
    flags.add<std::string>(pde, "--problem", "problem", "ep|p-problem|d-problem")
        ->check(CLI::IsMember({"ep", "p-problem", "d-problem"}));
    flags.add<int>(pde, "--n", "n", "Dimension");
    flags.add<double>(pde, "--R", "R", "Wulff ball radius");
    flags.add<double>(pde, "--mu", "mu", "Hardy weight");
    flags.add<double>(pde, "--lambda", "lambda", "lambda");
    flags.add<double>(pde, "--q", "q", "Power of the nonlinearity (p-problem)");
    flags.add<double>(pde, "--p", "p", "Operator exponent (d-problem)");
    flags.add<int>(pde, "--nodes", "nodes", "Grid nodes");
    flags.add<int>(pde, "--levels", "levels", "Plateau levels of the oscillatory nonlinearity");
    flags.add<std::string>(pde, "--nonlinearity", "nonlinearity", "oscillatory|zero (d-problem)");
    flags.add<int>(pde, "--k-max", "k_max", "Truncation levels to explore (d-problem)");
    flags.add<int>(pde, "--minimizer-nodes", "minimizer_nodes", "Nodes of the minimization grid (d-problem)");
    pde->add_option("--out", out_path, "Profile CSV (rho, u, du); d-problem writes <stem>_<i>.csv");

    CLI::App* avr = task_app("avr", "Volume-ratio curve and AVR estimate");
    flags.add_descriptor(avr, "--instance", "instance", "Instance descriptor, e.g. f_eps:n=2:eps=1");
    flags.add<std::vector<double>>(avr, "--radii", "radii", "Radii")->delimiter(',');
    flags.add<std::uint64_t>(avr, "--samples", "samples", "Monte-Carlo samples per radius");
    flags.add<bool>(avr, "--monte-carlo", "monte_carlo", "Force Monte-Carlo volumes");
    flags.add<double>(avr, "--base-avr", "base_avr", "AVR of the base metric (interval mode)");
    avr->add_option("--out", out_path, "Write the JSON report here");
    avr->add_option("--csv", csv_path, "Write the curve table here");

    CLI::App* repro = app.add_subcommand("repro", "Run the acceptance suite");
    repro->add_option("--config", config_path, "JSON config (defaults when omitted)");
    std::vector<int> criteria;
    repro->add_option("--criteria", criteria, "Subset of criteria")->delimiter(',');
    repro->callback([&command] { command = "repro"; });

    CLI::App* run = app.add_subcommand("run", "Run a list of tasks from a config");
    run->add_option("--config", config_path, "JSON config {\"tasks\": [...]}")->required();
    run->callback([&command] { command = "run"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfig;
    }
    if (seed_opt->count() > 0) common.seed = seed_value;
    if (threads_opt->count() > 0) common.threads = threads_value;

    try {
        if (command == "repro") {
            ReproConfig cfg = config_path.empty() ? ReproConfig{} : ReproConfig::from_json(read_json_file(config_path));
            if (common.seed) cfg.seed = *common.seed;
            if (!criteria.empty()) cfg.criteria = criteria;
            apply_threads(common, cfg.threads > 0 ? std::optional<int>(cfg.threads) : std::nullopt);
            cfg.threads = kernels::threads();
            const ReproResult r = run_repro(cfg, [](const CriterionResult& c) {
                std::cerr << "criterion " << c.id << ": " << (c.pass ? "PASS" : "FAIL") << (c.warning ? " (warning)" : "")
                          << "  " << c.summary << '\n';
            });
            const fs::path dir = common.out_dir.empty() ? fs::path("repro_out") : fs::path(common.out_dir);
            write_file(dir / "report.json", dump_report(r.report()));
            write_file(dir / "summary.csv", r.summary_csv());
            write_file(dir / "timing.csv", r.timing_csv());
            std::cout << r.summary_csv();
            return r.pass() ? kPass : kFail;
        }
        if (command == "run") {
            const json cfg = read_json_file(config_path);
            apply_threads(common, cfg.contains("threads") ? std::optional<int>(cfg["threads"].get<int>()) : std::nullopt);
            json effective = cfg;
            if (common.seed) effective["seed"] = *common.seed;
            const cli::RunOutput r = cli::run_config(effective);
            const fs::path dir = common.out_dir.empty() ? fs::path("run_out") : fs::path(common.out_dir);
            for (const auto& [id, t] : r.tasks) {
                write_file(dir / (id + ".json"), dump_report(t.report));
                for (const auto& [name, body] : t.tables) write_file(dir / (id + "_" + name), body);
            }
            write_file(dir / "summary.csv", r.summary_csv());
            std::cout << r.summary_csv();
            return r.pass() ? kPass : kFail;
        }

        apply_threads(common);
        if (!config_path.empty()) options = read_json_file(config_path);
        if (!options.is_object()) throw ConfigError("options config must be a JSON object");
        flags.apply(options);
        if (common.seed && (command == "avr" || (command == "verify" && options.contains("suite")) ||
                            (command == "pde" && options.value("problem", "") == "p-problem")))
            options["seed"] = *common.seed;

        try {
            if (command == "constants") return emit(cli::constants_command(options), out_path, common.out_dir, format == "csv", "");
            if (command == "verify") return emit(cli::verify_command(options), out_path, common.out_dir, false, csv_path);
            if (command == "sweep") return emit(cli::sweep_command(options), out_path, common.out_dir, format == "csv", csv_path);
            if (command == "avr") return emit(cli::avr_command(options), out_path, common.out_dir, false, csv_path);
            if (command == "pde") {
                const cli::TaskOutput t = cli::pde_command(options);
                if (!out_path.empty()) {
                    if (t.tables.size() == 1 && t.tables.front().first == "profile.csv") {
                        write_file(out_path, t.tables.front().second);
                    } else {
                        const fs::path p(out_path);
                        for (std::size_t i = 0; i < t.tables.size(); ++i)
                            write_file(p.parent_path() / (p.stem().string() + "_" + std::to_string(i) + p.extension().string()),
                                       t.tables[i].second);
                    }
                }
                return emit(t, "", common.out_dir, false, "", "pde.json");
            }
        } catch (const NumericalError& e) {
            std::cout << dump_report(numerical_report(command, e.what()));
            std::cerr << "numerical failure: " << e.what() << '\n';
            return kNumerical;
        } catch (const DataError& e) {
            std::cout << dump_report(numerical_report(command, e.what()));
            std::cerr << "data failure: " << e.what() << '\n';
            return kNumerical;
        }
        throw ConfigError("no command");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const DataError& e) {
        std::cerr << "data failure: " << e.what() << '\n';
        return kNumerical;
    }
}
