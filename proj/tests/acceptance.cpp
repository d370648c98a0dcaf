// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.
//
//   acceptance [config.json]
//
// Criteria 1-11 run in-process through run_repro. Criterion 12 additionally
// spawns `finsler-sharp repro` with the same seed and thread count and requires
// its report.json to match the in-process report byte for byte.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "finsler/kernels.hpp"
#include "finsler/suite.hpp"

using namespace finsler;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print(int id, bool pass, const std::string& title, const std::string& summary) {
    std::cout << "criterion " << std::setw(2) << id << ": " << (pass ? "PASS" : "FAIL") << "  " << title << "  " << summary
              << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        ReproConfig cfg;
        if (argc > 1) cfg = ReproConfig::from_json(nlohmann::json::parse(slurp(argv[1])));
        kernels::set_threads(cfg.threads);
        cfg.threads = kernels::threads();

        const ReproResult in_process = run_repro(cfg, [](const CriterionResult& c) {
            if (c.id != 12) print(c.id, c.pass, c.title, c.summary);
        });
        const std::string report = dump_report(in_process.report());

        bool all = true;
        for (const CriterionResult& c : in_process.criteria) {
            if (c.id == 12) continue;
            all = all && c.pass;
        }

        const auto it = std::find_if(in_process.criteria.begin(), in_process.criteria.end(),
                                     [](const CriterionResult& c) { return c.id == 12; });
        if (it != in_process.criteria.end()) {
            const fs::path dir = fs::temp_directory_path() / "finsler_acceptance";
            fs::remove_all(dir);
            fs::create_directories(dir);
            fs::path cfg_path = dir / "config.json";
            std::ofstream(cfg_path) << cfg.to_json().dump(2);

            const std::string cmd = std::string(FINSLER_SHARP_EXE) + " --out-dir " + (dir / "out").string() + " --threads " +
                                    std::to_string(cfg.threads) + " repro --config " + cfg_path.string() + " > " +
                                    (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
            const auto t0 = std::chrono::steady_clock::now();
            const int status = std::system(cmd.c_str());
            const double cli_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
            const bool identical = slurp(dir / "out" / "report.json") == report;

            std::ostringstream s;
            s << std::fixed << std::setprecision(1) << it->summary << "; cli exit " << code << " in " << cli_seconds
              << " s; report " << (identical ? "identical" : "differs");
            const bool pass = it->pass && code == 0 && identical && cli_seconds < cfg.runtime_budget;
            print(12, pass, it->title, s.str());
            all = all && pass;
        }

        std::cout << (all ? "ALL PASS" : "FAILURES") << " (" << std::fixed << std::setprecision(1) << in_process.seconds
                  << " s in-process)" << std::endl;
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance: " << e.what() << '\n';
        return 2;
    }
}
