// Batch experiment runner: single-point runs, tradeoff sweeps, feasibility
// scans and converse audits, with CSV/JSON emission.
//
// Exit codes: 0 success, 2 infeasible or invalid parameters,
// 3 construction failure, 4 I/O failure.

#include "lsc/lsc.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

namespace {

using namespace lsc;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitConstruction = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    ProblemParams params;
    std::uint64_t seed = 1;
    std::string straggler_mode = "exhaustive";
    int max_retries = 8;
    std::uint64_t subset_cap = 200000;
    std::uint64_t large_kc_cap = 256;
    std::string out_path;
    std::string format;
    std::string dump_scheme_path;
    bool simulate = false;
};

void add_param_flags(CLI::App* cmd, CommonOpts& o, bool need_kc, bool need_m) {
    cmd->add_option("--K", o.params.K, "number of datasets")->required();
    cmd->add_option("--N", o.params.N, "number of workers")->required();
    cmd->add_option("--Nr", o.params.Nr, "number of responding workers")->required();
    if (need_kc)
        cmd->add_option("--Kc", o.params.Kc, "number of demanded linear combinations")->required();
    if (need_m) cmd->add_option("--m", o.params.m, "computation cost factor")->required();
    cmd->add_option("--q", o.params.q, "prime field modulus (default 2147483647)");
    cmd->add_option("--L", o.params.L, "symbols per message (default: minimal valid length)");
    cmd->add_option("--seed", o.seed, "random seed (env LSC_SEED overrides)");
    cmd->add_option("--straggler-mode", o.straggler_mode, "exhaustive | random")
        ->check(CLI::IsMember({"exhaustive", "random"}));
    cmd->add_option("--max-retries", o.max_retries, "construction restarts before giving up");
    cmd->add_option("--subset-cap", o.subset_cap, "max responder subsets checked exhaustively");
    cmd->add_option("--large-kc-cap", o.large_kc_cap, "max sub-problems in the large-Kc composite");
    cmd->add_option("--out", o.out_path, "output file (default stdout)");
    cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

void apply_env_seed(CommonOpts& o) {
    if (const char* env = std::getenv("LSC_SEED")) o.seed = std::strtoull(env, nullptr, 10);
}

BuildOptions build_opts(const CommonOpts& o) {
    BuildOptions b;
    b.max_retries = o.max_retries;
    b.subset_cap = o.subset_cap;
    b.large_kc_cap = o.large_kc_cap;
    return b;
}

/// Smallest L the regime at this point can encode exactly.
int default_L(const ProblemParams& p) {
    switch (classify_regime(p)) {
        case Regime::SmallKc: return p.m;
        case Regime::Main: return p.splits();
        case Regime::LargeKc: {
            const int P = p.large_regime_threshold();
            const BigInt B = p.Kc == P ? 1 : binomial(p.Kc - 1, P - 1);
            const BigInt L = B * p.Nr;
            if (L > (1 << 24))
                throw BinomialTooLarge("minimal message length " + L.str() +
                                       " exceeds the practical limit");
            return L.convert_to<int>();
        }
    }
    return 1;
}

int write_output(const CommonOpts& o, const std::string& text) {
    if (o.out_path.empty()) {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream out(o.out_path);
    if (!out) {
        std::cerr << "cannot open " << o.out_path << "\n";
        return kExitIo;
    }
    out << text;
    return out.good() ? kExitOk : kExitIo;
}

json error_json(const std::string& kind, const std::string& message) {
    return json{{"error", {{"kind", kind}, {"message", message}}}};
}

int emit_error(const CommonOpts& o, const std::exception& e, const std::string& kind, int code) {
    write_output(o, error_json(kind, e.what()).dump(2) + "\n");
    return code;
}

template <typename Fn>
int guarded(const CommonOpts& o, Fn&& fn) {
    try {
        return fn();
    } catch (const InfeasibleRegime& e) {
        return emit_error(o, e, "InfeasibleRegime", kExitInfeasible);
    } catch (const MustPadFirst& e) {
        return emit_error(o, e, "MustPadFirst", kExitInfeasible);
    } catch (const IndivisibleL& e) {
        return emit_error(o, e, "IndivisibleL", kExitInfeasible);
    } catch (const BinomialTooLarge& e) {
        return emit_error(o, e, "BinomialTooLarge", kExitConstruction);
    } catch (const ConstructionFailed& e) {
        return emit_error(o, e, "ConstructionFailed", kExitConstruction);
    } catch (const std::invalid_argument& e) {
        return emit_error(o, e, "InvalidParams", kExitInfeasible);
    } catch (const std::ios_base::failure& e) {
        return emit_error(o, e, "Io", kExitIo);
    }
}

int cmd_run(CommonOpts& o) {
    return guarded(o, [&]() {
        ProblemParams p = o.params;
        if (!p.divides_evenly()) p = p.with_padded_datasets();
        if (p.L == 0) p.L = default_L(p);
        p.validate();

        const StragglerPolicy policy = o.straggler_mode == "exhaustive"
                                           ? StragglerPolicy::Exhaustive
                                           : StragglerPolicy::RandomSubset;
        SimReport sim = run_experiment(p, o.seed, policy, build_opts(o));
        CostReport costs = optimality_report(p);

        if (!o.dump_scheme_path.empty()) {
            // The build is a pure function of (F, params, seed); re-derive it
            // exactly as the experiment did.
            Rng demand_rng = Rng::derive(o.seed, {0x41});
            Scheme scheme = synthesize_scheme(random_demand(p, demand_rng), p, o.seed,
                                              build_opts(o));
            std::ofstream dump(o.dump_scheme_path);
            if (!dump) {
                std::cerr << "cannot open " << o.dump_scheme_path << "\n";
                return kExitIo;
            }
            dump << scheme_json(scheme).dump(2) << "\n";
        }

        if (sim.decodability_sampled)
            std::cerr << "warning: too many responder subsets for exhaustive build-time "
                         "verification; a sampled subset check was used (raise --subset-cap)\n";

        json out{{"sim", sim_report_json(sim)}, {"costs", cost_report_json(costs)}};
        const bool cost_matches = sim.R_measured == costs.R_ach;
        out["cost_matches_formula"] = cost_matches;
        int io = write_output(o, out.dump(2) + "\n");
        if (io != kExitOk) return io;
        return sim.success && cost_matches ? kExitOk : kExitFailure;
    });
}

std::string csv_rational(const Rational& r) {
    std::ostringstream s;
    s << rational_str(r) << "," << rational_double(r);
    return s.str();
}

struct SweepRow {
    ProblemParams p;
    CostReport costs;
    bool simulated = false;
    std::optional<SimReport> sim;
};

json sweep_row_json(const SweepRow& row) {
    json j{{"params", params_json(row.p)}, {"costs", cost_report_json(row.costs)}};
    if (row.simulated) j["sim"] = sim_report_json(*row.sim);
    return j;
}

int emit_sweep(const CommonOpts& o, const std::vector<SweepRow>& rows) {
    const std::string fmt = o.format.empty() ? "csv" : o.format;
    if (fmt == "json") {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(sweep_row_json(r));
        return write_output(o, arr.dump(2) + "\n");
    }
    std::ostringstream s;
    s << "K,N,Nr,Kc,m,q,seed,feasible,regime,"
         "R_ach,R_ach_dec,R_conv,R_conv_dec,R_base,R_base_dec,ratio,ratio_dec,verdict";
    if (o.simulate) s << ",R_measured,R_measured_dec,success";
    s << "\n";
    for (const auto& r : rows) {
        s << r.p.K << "," << r.p.N << "," << r.p.Nr << "," << r.p.Kc << "," << r.p.m << ","
          << r.p.q << "," << o.seed << "," << (r.costs.feasible ? 1 : 0) << ","
          << regime_name(classify_regime(r.p)) << "," << csv_rational(r.costs.R_ach) << ","
          << csv_rational(r.costs.R_converse_cyc) << "," << csv_rational(r.costs.R_base) << ","
          << csv_rational(r.costs.ratio) << "," << verdict_name(r.costs.verdict);
        if (o.simulate) {
            if (r.simulated)
                s << "," << csv_rational(r.sim->R_measured) << "," << (r.sim->success ? 1 : 0);
            else
                s << ",,,";
        }
        s << "\n";
    }
    return write_output(o, s.str());
}

int cmd_sweep(CommonOpts& o, bool sweep_m) {
    return guarded(o, [&]() {
        ProblemParams base = o.params;
        if (!base.divides_evenly()) base = base.with_padded_datasets();

        std::vector<SweepRow> rows;
        const int hi = sweep_m ? base.Nr : base.K;
        for (int x = 1; x <= hi; ++x) {
            ProblemParams p = base;
            (sweep_m ? p.m : p.Kc) = x;
            SweepRow row{p, optimality_report(p), false, std::nullopt};
            if (o.simulate && row.costs.feasible) {
                ProblemParams sp = p;
                sp.L = default_L(sp);
                try {
                    row.sim = run_experiment(sp, o.seed, StragglerPolicy::Exhaustive, build_opts(o));
                    row.p = sp;
                    row.simulated = true;
                } catch (const BinomialTooLarge&) {
                    // row stays formula-only; visible as empty sim columns
                }
            }
            rows.push_back(std::move(row));
        }
        return emit_sweep(o, rows);
    });
}

struct ScanRow {
    int N, K, Nr, m, u, Kc;
    std::uint64_t seed;
    bool feasible = false;
    bool built = false;
    bool decodable = false;
    bool success = false;
};

int cmd_scan(CommonOpts& o, int max_n, int k_over_n, int n_seeds) {
    return guarded(o, [&]() {
        std::vector<ScanRow> rows;
        for (int N = 2; N <= max_n; ++N) {
            const int K = N * k_over_n;
            for (int Nr = 1; Nr <= N; ++Nr)
                for (int m = 1; m <= Nr; ++m)
                    for (int u = 1; u <= Nr - m + 1; ++u)
                        for (int s = 0; s < n_seeds; ++s)
                            rows.push_back(ScanRow{N, K, Nr, m, u, k_over_n * u,
                                                   o.seed + static_cast<std::uint64_t>(s)});
        }

        // Points are independent; fan them out to a worker pool. Each thread
        // writes only its own row slots, so output order stays the
        // enumeration order above no matter who finishes first.
        const BuildOptions opts = build_opts(o);
        const std::uint64_t q = o.params.q;
        auto evaluate = [&opts, q, k_over_n](ScanRow& row) {
            ProblemParams p;
            p.K = row.K;
            p.N = row.N;
            p.Nr = row.Nr;
            p.m = row.m;
            p.Kc = row.Kc;
            p.q = q;
            row.feasible = feasibility_constraint(p);
            if (!row.feasible) return;
            p.L = p.splits();
            Rng demand_rng = Rng::derive(row.seed, {0x61});
            FieldMatrix F = k_over_n == 1 ? random_demand(p, demand_rng)
                                          : block_diagonal_demand(p, demand_rng);
            try {
                Scheme scheme = build_scheme(F, p, row.seed, opts);
                row.built = true;
                SchemeVerification v = verify_scheme(scheme, opts);
                row.decodable = v.decodable && v.transmit_ok;
                row.success = row.decodable;
            } catch (const ConstructionFailed&) {
            } catch (const InfeasibleRegime&) {
            }
        };

        std::atomic<std::size_t> next{0};
        const unsigned pool =
            std::max(1u, std::min(std::thread::hardware_concurrency(),
                                  static_cast<unsigned>(rows.size())));
        std::vector<std::thread> workers;
        for (unsigned t = 0; t < pool; ++t)
            workers.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
                    evaluate(rows[i]);
            });
        for (auto& w : workers) w.join();

        int attempted = 0, failed = 0;
        for (const auto& r : rows) {
            if (!r.feasible) continue;
            ++attempted;
            if (!r.success) ++failed;
        }

        const std::string fmt = o.format.empty() ? "csv" : o.format;
        std::ostringstream s;
        if (fmt == "json") {
            json arr = json::array();
            for (const auto& r : rows)
                arr.push_back(json{{"N", r.N},
                                   {"K", r.K},
                                   {"Nr", r.Nr},
                                   {"m", r.m},
                                   {"u", r.u},
                                   {"Kc", r.Kc},
                                   {"seed", r.seed},
                                   {"feasible", r.feasible},
                                   {"built", r.built},
                                   {"decodable", r.decodable},
                                   {"success", r.success}});
            json out{{"rows", std::move(arr)}, {"attempted", attempted}, {"failed", failed}};
            s << out.dump(2) << "\n";
        } else {
            s << "N,K,Nr,m,u,Kc,q,seed,feasible,built,decodable,success\n";
            for (const auto& r : rows) {
                s << r.N << "," << r.K << "," << r.Nr << "," << r.m << "," << r.u << "," << r.Kc
                  << "," << o.params.q << "," << r.seed << ",";
                if (r.feasible)
                    s << "1," << (r.built ? 1 : 0) << "," << (r.decodable ? 1 : 0) << ","
                      << (r.success ? 1 : 0) << "\n";
                else
                    s << "0,,,skipped\n";
            }
        }
        int io = write_output(o, s.str());
        if (io != kExitOk) return io;
        std::cerr << "scan: " << attempted << " constructions attempted, " << failed << " failed\n";
        return failed == 0 ? kExitOk : kExitFailure;
    });
}

int cmd_audit(CommonOpts& o) {
    return guarded(o, [&]() {
        ProblemParams p = o.params;
        if (!p.divides_evenly()) p = p.with_padded_datasets();
        p.validate();
        AuditRecord rec = converse_audit(p, o.seed);
        json out{{"params", params_json(p)}, {"audit", audit_json(rec)}};
        int io = write_output(o, out.dump(2) + "\n");
        if (io != kExitOk) return io;
        bool ranks_ok = true;
        for (const auto& i : rec.inequalities) ranks_ok = ranks_ok && i.rank_ok;
        return rec.matches_formula && ranks_ok ? kExitOk : kExitFailure;
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed linearly separable computation: scheme builder, simulator and "
                 "bounds calculator"};
    app.require_subcommand(1);

    CommonOpts run_o, sweep_m_o, sweep_kc_o, scan_o, audit_o;
    int scan_max_n = 8, scan_k_over_n = 1, scan_seeds = 1;

    CLI::App* run = app.add_subcommand("run", "build one scheme, simulate and verify it");
    add_param_flags(run, run_o, true, true);
    run->add_option("--dump-scheme", run_o.dump_scheme_path,
                    "also write the full scheme (F, F', S) as JSON to this path");

    CLI::App* sweep_m = app.add_subcommand("sweep-m", "cost table over m in [1..Nr] at fixed Kc");
    add_param_flags(sweep_m, sweep_m_o, true, false);
    sweep_m->add_flag("--simulate", sweep_m_o.simulate,
                      "also run the simulator per feasible point");

    CLI::App* sweep_kc = app.add_subcommand("sweep-kc", "cost table over Kc in [1..K] at fixed m");
    add_param_flags(sweep_kc, sweep_kc_o, false, true);
    sweep_kc->add_flag("--simulate", sweep_kc_o.simulate,
                       "also run the simulator per feasible point");

    CLI::App* scan = app.add_subcommand(
        "scan", "feasibility scan over (N, Nr, m, u) grids with N = K (or K = cN)");
    scan->add_option("--max-N", scan_max_n, "largest N to scan (default 8)");
    scan->add_option("--k-over-n", scan_k_over_n,
                     "K/N ratio; above 1 uses the block-diagonal structured demand");
    scan->add_option("--seeds", scan_seeds, "seeds per parameter point (default 1)");
    scan->add_option("--q", scan_o.params.q, "prime field modulus");
    scan->add_option("--seed", scan_o.seed, "base seed");
    scan->add_option("--max-retries", scan_o.max_retries, "construction restarts");
    scan->add_option("--subset-cap", scan_o.subset_cap, "subset check cap");
    scan->add_option("--out", scan_o.out_path, "output file (default stdout)");
    scan->add_option("--format", scan_o.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* audit = app.add_subcommand("audit", "converse counting-argument audit");
    add_param_flags(audit, audit_o, true, true);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        apply_env_seed(run_o);
        return cmd_run(run_o);
    }
    if (sweep_m->parsed()) {
        apply_env_seed(sweep_m_o);
        return cmd_sweep(sweep_m_o, true);
    }
    if (sweep_kc->parsed()) {
        apply_env_seed(sweep_kc_o);
        return cmd_sweep(sweep_kc_o, false);
    }
    if (scan->parsed()) {
        apply_env_seed(scan_o);
        return cmd_scan(scan_o, scan_max_n, scan_k_over_n, scan_seeds);
    }
    if (audit->parsed()) {
        apply_env_seed(audit_o);
        return cmd_audit(audit_o);
    }
    return kExitFailure;
}
