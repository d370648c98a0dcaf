#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "finsler/errors.hpp"
#include "finsler/suite.hpp"

using namespace finsler;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FINSLER_SHARP_EXE) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("finsler_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Descriptor, Shorthand) {
    const json d = parse_descriptor("morrey_extremal:p=4:R=2.5:flag=true:name=x");
    EXPECT_EQ(d["kind"], "morrey_extremal");
    EXPECT_EQ(d["p"], 4);
    EXPECT_EQ(d["R"], 2.5);
    EXPECT_EQ(d["flag"], true);
    EXPECT_EQ(d["name"], "x");
    EXPECT_EQ(parse_descriptor(R"({"kind": "cone"})")["kind"], "cone");
    EXPECT_THROW(parse_descriptor("cone:radius"), ConfigError);
    EXPECT_THROW(parse_descriptor("  "), ConfigError);
    const json m = parse_instance_descriptor("minkowski:n=2:norm=lp:p=4:normalized=true");
    EXPECT_EQ(m["norm"]["kind"], "lp");
    EXPECT_EQ(m["norm"]["p"], 4);
    EXPECT_EQ(m["norm"]["n"], 2);
}

TEST(Schedule, Forms) {
    EXPECT_EQ(parse_schedule("R=1:64:geometric").values, (std::vector<double>{1, 2, 4, 8, 16, 32, 64}));
    EXPECT_EQ(parse_schedule("R=1:16:geometric:3").values.size(), 3u);
    EXPECT_NEAR(parse_schedule("R=1:16:geometric:3").values[1], 4.0, 1e-12);
    EXPECT_EQ(parse_schedule("delta=0:1:linear:5").values, (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
    EXPECT_EQ(parse_schedule("R=1,2,4").values, (std::vector<double>{1, 2, 4}));
    EXPECT_EQ(parse_schedule("R=1,2,4").variable, "R");
    EXPECT_THROW(parse_schedule("1:64:geometric"), ConfigError);
    EXPECT_THROW(parse_schedule("R=0:64:geometric"), ConfigError);
    EXPECT_THROW(parse_schedule("R=1:64:cubic"), ConfigError);
}

TEST(ReproConfig, DefaultsAndValidation) {
    const ReproConfig c = ReproConfig::from_json({{"seed", 7}});
    EXPECT_EQ(c.seed, 7u);
    const json j = c.to_json();
    EXPECT_EQ(j["cases"], 100);
    EXPECT_EQ(j["avr"]["samples"], 200000);
    EXPECT_EQ(ReproConfig::from_json(j).to_json(), j);
    EXPECT_THROW(ReproConfig::from_json(json::object()), ConfigError);
    EXPECT_THROW(ReproConfig::from_json({{"sed", 1}}), ConfigError);
    EXPECT_THROW(ReproConfig::from_json({{"avr", {{"sample", 1}}}}), ConfigError);
    EXPECT_THROW(ReproConfig::from_json({{"criteria", {13}}}), ConfigError);
}

TEST(Criterion, DeterministicReport) {
    ReproConfig c;
    const CriterionResult a = run_criterion(4, c), b = run_criterion(4, c);
    EXPECT_TRUE(a.pass);
    EXPECT_EQ(dump_report(a.to_json()), dump_report(b.to_json()));
    EXPECT_THROW(run_criterion(12, c), DomainError);
}

TEST(Commands, ConstantsRow) {
    const cli::TaskOutput t = cli::constants_command({{"p", 4}, {"n", 2}, {"avr", 1}});
    ASSERT_EQ(t.report["rows"].size(), 1u);
    EXPECT_NEAR(t.report["rows"][0]["T_pn"].get<double>(), 0.64303706857874378, 1e-14);
    EXPECT_NEAR(t.report["rows"][0]["eta"].get<double>(), 0.8, 1e-15);
    EXPECT_EQ(t.report["schema"], 1);
    EXPECT_TRUE(t.pass());
    EXPECT_THROW(cli::constants_command({{"q", 4}}), ConfigError);
}

TEST(Commands, VerifyMorreyExtremal) {
    const cli::TaskOutput t = cli::verify_command(
        {{"inequality", "morrey-support"}, {"instance", "euclidean:n=2"}, {"profile", "morrey_extremal:p=4"}, {"sweep", "R=1:8:geometric"}});
    EXPECT_TRUE(t.pass());
    EXPECT_NEAR(t.report["report"]["ratio"].get<double>(), 1.0, 1e-3);
    ASSERT_EQ(t.tables.size(), 1u);
    EXPECT_EQ(t.tables[0].second.substr(0, 22), "R,lhs,rhs,ratio,target");
    EXPECT_EQ(t.report["options"]["instance"]["kind"], "euclidean");
}

TEST(Commands, PdeAndRun) {
    const cli::TaskOutput ep = cli::pde_command({{"problem", "ep"}, {"n", 3}});
    EXPECT_TRUE(ep.pass());
    EXPECT_NEAR(ep.report["eigenpair"]["lambda_1"].get<double>(), 9.8696044010893586, 1e-9);
    EXPECT_THROW(cli::pde_command({{"problem", "ep"}, {"colour", 1}}), ConfigError);

    const json cfg = {{"tasks",
                       {{{"id", "c"}, {"command", "constants"}, {"p", 5}, {"n", 3}},
                        {{"id", "v"}, {"command", "verify"}, {"inequality", "isoperimetric"}, {"instance", "euclidean:n=2"}}}}};
    const cli::RunOutput r = cli::run_config(cfg);
    EXPECT_TRUE(r.pass());
    EXPECT_EQ(r.summary_csv(), "task,command,pass\nc,constants,true\nv,verify,true\n");
    EXPECT_THROW(cli::run_config(json::object()), ConfigError);
    EXPECT_THROW(cli::run_config({{"tasks", {{{"id", "a"}, {"command", "constants"}}, {{"id", "a"}, {"command", "constants"}}}}}),
                 ConfigError);
}

TEST(Executable, ExitCodes) {
    const fs::path dir = scratch("exit");
    EXPECT_EQ(run_cli("verify --inequality morrey-support --instance euclidean:n=2 --profile morrey_extremal:p=4"), 0);
    EXPECT_EQ(run_cli("constants --p 4 --n 2 --avr 1"), 0);
    // The cone is not extremal: equality is not attained but the inequality holds.
    EXPECT_EQ(run_cli("verify --inequality morrey-support --instance euclidean:n=2 --profile cone --p 4"), 0);

    std::ofstream(dir / "empty.json") << "";
    std::ofstream(dir / "empty_object.json") << "{}";
    EXPECT_EQ(run_cli("run --config " + (dir / "empty.json").string()), 2);
    EXPECT_EQ(run_cli("run --config " + (dir / "empty_object.json").string()), 2);
    EXPECT_EQ(run_cli("verify --inequality banana"), 2);
    EXPECT_EQ(run_cli("verify --inequality hardy --instance euclidean:n=2 --p 2"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("pde --problem p-problem --n 2 --q 4 --lambda -50"), 3);

    // A false pass flag gives exit code 1: with base_avr = 0.1 the interval excludes the estimate 1.
    std::ofstream(dir / "fail.json") << R"({"instance": "f_eps:n=2:eps=1", "radii": [1, 2], "monte_carlo": true, "samples": 20000, "base_avr": 0.1})";
    EXPECT_EQ(run_cli("avr --config " + (dir / "fail.json").string()), 1);
}

TEST(Executable, RunWritesReports) {
    const fs::path dir = scratch("run");
    std::ofstream(dir / "cfg.json") << R"({"seed": 5, "tasks": [
        {"id": "k", "command": "constants", "p": [4, 5], "n": 2},
        {"id": "s", "command": "sweep", "instance": "euclidean:n=2", "p": 4, "sweep": "R=1:4:geometric"}]})";
    EXPECT_EQ(run_cli("--out-dir " + (dir / "out").string() + " run --config " + (dir / "cfg.json").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "k.json"));
    EXPECT_TRUE(fs::exists(dir / "out" / "s_sweep.csv"));
    EXPECT_EQ(slurp(dir / "out" / "summary.csv"), "task,command,pass\nk,constants,true\ns,sweep,true\n");
    const std::string first = slurp(dir / "out" / "s.json");
    EXPECT_EQ(run_cli("--out-dir " + (dir / "out").string() + " run --config " + (dir / "cfg.json").string()), 0);
    EXPECT_EQ(slurp(dir / "out" / "s.json"), first);
}

TEST(Executable, PdeWritesProfile) {
    const fs::path dir = scratch("pde");
    EXPECT_EQ(run_cli("--out-dir " + dir.string() + " pde --problem ep --n 2 --out " + (dir / "p.csv").string()), 0);
    EXPECT_EQ(slurp(dir / "p.csv").substr(0, 9), "rho,u,du\n");
    EXPECT_TRUE(fs::exists(dir / "pde.json"));
}
