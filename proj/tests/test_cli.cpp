// Exercises the installed CLI binary end to end: exit codes, JSON error
// payloads, CSV schemas, determinism and the LSC_SEED override.
// Usage: cli_tests <path-to-lsc-binary>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++g_failures;
        std::cerr << "FAILED: " << what << "\n";
    }
}

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run(const std::string& cmd) {
    const std::string out_file = "/tmp/lsc_cli_test_out.txt";
    const std::string full = cmd + " > " + out_file + " 2>/dev/null";
    int status = std::system(full.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.stdout_text = ss.str();
    return r;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <lsc-binary>\n";
        return 2;
    }
    const std::string lsc = argv[1];

    {
        // Worked six-worker point: success, R = 10/3, exit 0.
        RunResult r = run(lsc + " run --K 6 --N 6 --Nr 5 --Kc 2 --m 2 --seed 1");
        check(r.exit_code == 0, "run worked example exits 0");
        auto j = nlohmann::json::parse(r.stdout_text);
        check(j["sim"]["success"] == true, "run reports success");
        check(j["sim"]["R_measured"]["fraction"] == "10/3", "run measures 10/3");
        check(j["cost_matches_formula"] == true, "measured cost matches the formula");
    }

    {
        // The open point is refused with exit code 2 and a machine-readable error.
        RunResult r = run(lsc + " run --K 5 --N 5 --Nr 5 --Kc 2 --m 2");
        check(r.exit_code == 2, "infeasible point exits 2");
        auto j = nlohmann::json::parse(r.stdout_text);
        check(j["error"]["kind"] == "InfeasibleRegime", "error kind is InfeasibleRegime");
    }

    {
        // Determinism: identical invocations produce identical bytes.
        RunResult a = run(lsc + " run --K 6 --N 6 --Nr 5 --Kc 2 --m 2 --seed 9");
        RunResult b = run(lsc + " run --K 6 --N 6 --Nr 5 --Kc 2 --m 2 --seed 9");
        check(a.stdout_text == b.stdout_text, "same seed gives byte-identical reports");

        // LSC_SEED takes precedence over --seed.
        RunResult c = run("LSC_SEED=9 " + lsc + " run --K 6 --N 6 --Nr 5 --Kc 2 --m 2 --seed 1");
        check(c.stdout_text == a.stdout_text, "LSC_SEED overrides --seed");
    }

    {
        // Tradeoff sweep (Nr = 8): 8 rows, achievable meets converse everywhere.
        RunResult r = run(lsc + " sweep-m --K 20 --N 10 --Nr 8 --Kc 8");
        check(r.exit_code == 0, "sweep-m exits 0");
        auto lines = split_lines(r.stdout_text);
        check(lines.size() == 9, "sweep-m emits header + 8 rows");
        auto header = split_csv(lines[0]);
        check(header[0] == "K" && header[9] == "R_ach" && header[17] == "verdict",
              "sweep CSV schema");
        for (std::size_t i = 1; i < lines.size(); ++i) {
            auto f = split_csv(lines[i]);
            check(f[9] == f[11], "R_ach equals R_conv at m=" + f[4]);
        }
    }

    {
        // Demand sweep: 20 rows, baseline never beaten.
        RunResult r = run(lsc + " sweep-kc --K 20 --N 10 --Nr 7 --m 2");
        check(r.exit_code == 0, "sweep-kc exits 0");
        auto lines = split_lines(r.stdout_text);
        check(lines.size() == 21, "sweep-kc emits header + 20 rows");
    }

    {
        RunResult r = run(lsc + " audit --K 5 --N 5 --Nr 4 --Kc 2 --m 2");
        check(r.exit_code == 0, "audit exits 0");
        auto j = nlohmann::json::parse(r.stdout_text);
        check(j["audit"]["implied_converse"]["fraction"] == "8/3", "audit implies 8/3");
    }

    {
        RunResult r = run(lsc + " scan --max-N 4");
        check(r.exit_code == 0, "scan exits 0 with no construction failures");
        // (N,Nr,m,u) = (4,4,1,2) violates the constraint: skipped, not failed.
        check(r.stdout_text.find(",0,,,skipped") != std::string::npos,
              "scan marks constraint violations as skipped");
    }

    {
        // K = 2N points run on the block-diagonal structured demand.
        RunResult r = run(lsc + " scan --max-N 4 --k-over-n 2");
        check(r.exit_code == 0, "structured-demand scan exits 0");
    }

    {
        // Unwritable output path reports I/O failure.
        RunResult r = run(lsc + " run --K 6 --N 6 --Nr 5 --Kc 2 --m 2 --out /nonexistent/x.json");
        check(r.exit_code == 4, "bad --out exits 4");
    }

    {
        // F_2 is too small for the random full-rank draws: the build gives
        // up after its retries and reports a construction failure.
        RunResult r =
            run(lsc + " run --K 6 --N 6 --Nr 5 --Kc 2 --m 2 --q 2 --seed 1 --max-retries 2");
        check(r.exit_code == 3, "exhausted construction exits 3");
        auto j = nlohmann::json::parse(r.stdout_text);
        check(j["error"]["kind"] == "ConstructionFailed", "error kind is ConstructionFailed");
    }

    {
        // A tiny subset cap forces the sampled build-time decodability check.
        RunResult r = run(lsc + " run --K 8 --N 8 --Nr 4 --Kc 2 --m 2 --seed 1 --subset-cap 5");
        check(r.exit_code == 0, "sampled-check run still verifies exhaustively");
        auto j = nlohmann::json::parse(r.stdout_text);
        check(j["sim"]["decodability_sampled"] == true, "sampled check is reported");
    }

    if (g_failures == 0) {
        std::cout << "cli_tests: all checks passed\n";
        return 0;
    }
    std::cerr << "cli_tests: " << g_failures << " checks failed\n";
    return 1;
}
