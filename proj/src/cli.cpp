#include "corridor/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "corridor/blocks.hpp"
#include "corridor/errors.hpp"
#include "corridor/general_dp.hpp"
#include "corridor/instances.hpp"
#include "corridor/ip.hpp"
#include "corridor/model.hpp"
#include "corridor/oracle.hpp"
#include "corridor/report.hpp"
#include "corridor/svg.hpp"
#include "corridor/unidir.hpp"

namespace corridor {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open file: " + path);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot write file: " + path);
    out << content;
}

class Stopwatch {
  public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::uint64_t env_seed(std::uint64_t fallback) {
    const char* env = std::getenv("CORRIDOR_SEED");
    if (!env || !*env) return fallback;
    try {
        return std::stoull(env);
    } catch (const std::exception&) {
        throw parse_error(std::string("CORRIDOR_SEED is not an integer: ") + env);
    }
}

std::string percent(const Rational& g) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", to_double(g) * 100.0);
    return buf;
}

std::string gap_string(const Rational& g) {
    return format_rational(g) + " (" + percent(g) + "%)";
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveSettings {
    std::string algo = "auto";
    bool verify = false;
    bool timings = false;
    std::size_t node_budget = 20'000;
    std::size_t budget_ms = 0;
    std::string emit_lp_path;
    std::string emit_dot_path;
};

RunReport run_solve(const Instance& inst, const SolveSettings& st) {
    RunReport rep;
    rep.instance_digest = instance_digest(inst);
    rep.algorithm = st.algo;
    const Stopwatch total;

    Solution sol;
    if (st.algo == "brute") {
        rep.counters["combinations"] =
            static_cast<std::int64_t>(enumeration_product(inst));
        sol = brute_force(inst);
    } else {
        const ReducedInstance red = reduce_instance(inst);
        const Instance& core = red.instance;
        rep.counters["jobs_after_reduction"] = static_cast<std::int64_t>(core.jobs.size());
        rep.counters["jobs_removed"] = static_cast<std::int64_t>(red.removed.size());

        BbOptions bopt;
        bopt.node_budget = st.node_budget;
        bopt.time_budget_ms = st.budget_ms;
        bopt.require_optimal = true;

        if (st.algo == "auto") {
            bool done = false;
            if (!done) {
                try {
                    OrderedStats stats;
                    sol = solve_ordered(core, &stats);
                    rep.info["route"] = "ordered";
                    rep.counters["digraph_nodes"] = static_cast<std::int64_t>(stats.nodes);
                    rep.counters["digraph_arcs"] = static_cast<std::int64_t>(stats.arcs);
                    done = true;
                } catch (const model_error&) {
                }
            }
            if (!done) {
                try {
                    UnidirDpStats stats;
                    sol = solve_unidir(core, &stats);
                    rep.info["route"] = "unidir";
                    rep.counters["dp_states"] = static_cast<std::int64_t>(stats.states);
                    done = true;
                } catch (const model_error&) {
                }
            }
            if (!done) {
                try {
                    BlocksStats stats;
                    sol = solve_blocks(core, {}, &stats);
                    rep.info["route"] = "blocks";
                    rep.counters["digraph_nodes"] = static_cast<std::int64_t>(stats.nodes);
                    rep.counters["digraph_arcs"] = static_cast<std::int64_t>(stats.arcs);
                    done = true;
                } catch (const model_error&) {
                } catch (const resource_error&) {
                }
            }
            if (!done) {
                try {
                    GeneralDpStats stats;
                    sol = solve_general(core, {}, &stats);
                    rep.info["route"] = "dp";
                    rep.counters["dp_states"] = static_cast<std::int64_t>(stats.states);
                    done = true;
                } catch (const model_error&) {
                } catch (const resource_error&) {
                }
            }
            if (!done) {
                const IpModel model = build_scm(core);
                const BbResult r = bb_solve(core, model, bopt);
                sol = r.solution;
                rep.info["route"] = "bb:scm";
                rep.counters["bb_nodes"] = static_cast<std::int64_t>(r.nodes);
                rep.info["best_bound"] = format_rational(r.best_bound);
            }
        } else if (st.algo == "dp") {
            GeneralDpStats stats;
            sol = solve_general(core, {}, &stats);
            rep.counters["dp_states"] = static_cast<std::int64_t>(stats.states);
        } else if (st.algo == "unidir") {
            UnidirDpStats stats;
            sol = solve_unidir(core, &stats);
            rep.counters["dp_states"] = static_cast<std::int64_t>(stats.states);
        } else if (st.algo == "ordered") {
            OrderedStats stats;
            sol = solve_ordered(core, &stats);
            rep.counters["digraph_nodes"] = static_cast<std::int64_t>(stats.nodes);
            rep.counters["digraph_arcs"] = static_cast<std::int64_t>(stats.arcs);
        } else if (st.algo == "blocks") {
            BlocksStats stats;
            sol = solve_blocks(core, {}, &stats);
            rep.counters["digraph_nodes"] = static_cast<std::int64_t>(stats.nodes);
            rep.counters["digraph_arcs"] = static_cast<std::int64_t>(stats.arcs);
        } else if (st.algo == "bb:pim" || st.algo == "bb:scm" || st.algo == "bb:uniscm") {
            BbResult r;
            if (st.algo == "bb:pim") {
                r = bb_solve_pim_cut(core, bopt);
                if (!st.emit_lp_path.empty())
                    write_file(st.emit_lp_path, emit_lp_file(build_pim(core)));
            } else {
                const IpModel model =
                    st.algo == "bb:scm" ? build_scm(core) : build_uniscm(core, false);
                if (!st.emit_lp_path.empty()) write_file(st.emit_lp_path, emit_lp_file(model));
                r = bb_solve(core, model, bopt);
            }
            sol = r.solution;
            rep.counters["bb_nodes"] = static_cast<std::int64_t>(r.nodes);
            rep.info["best_bound"] = format_rational(r.best_bound);
            rep.info["mip_gap"] =
                gap_string(r.incumbent_value == 0
                               ? Rational(0)
                               : relative_gap(r.best_bound, r.incumbent_value));
        } else {
            throw parse_error("unknown algorithm: " + st.algo);
        }

        if (!st.emit_dot_path.empty()) {
            const BlockDigraph dg = build_block_digraph(core);
            write_file(st.emit_dot_path, digraph_dot(dg));
        }
        sol = expand_solution(red, sol);
    }

    rep.solution = sol;
    rep.objective = sol.objective;

    if (st.verify) {
        const std::size_t product = enumeration_product(inst);
        if (product <= 1'000'000) {
            const Solution reference = brute_force(inst);
            if (reference.objective != sol.objective)
                throw model_error("verification failed: solver found " +
                                  std::to_string(sol.objective) + " but the oracle found " +
                                  std::to_string(reference.objective));
            rep.info["verify"] = "ok (matches the oracle)";
        } else {
            rep.info["verify"] = "skipped (" + std::to_string(product) +
                                 " combinations exceed the verification bound)";
        }
    }

    rep.timings_ms["total"] = total.ms();
    return rep;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchClass {
    int n = 0;
    int classes = 0;
};

std::vector<BenchClass> parse_classes(const std::string& text) {
    std::vector<BenchClass> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        std::string body = item;
        if (!body.empty() && body.front() == '(') body.erase(body.begin());
        if (!body.empty() && body.back() == ')') body.pop_back();
        const auto comma = body.find(',');
        if (comma == std::string::npos)
            throw parse_error("bad class '" + item + "', expected (n,c)");
        try {
            BenchClass bc;
            bc.n = std::stoi(body.substr(0, comma));
            bc.classes = std::stoi(body.substr(comma + 1));
            out.push_back(bc);
        } catch (const std::exception&) {
            throw parse_error("bad class '" + item + "', expected (n,c)");
        }
    }
    if (out.empty()) throw parse_error("no benchmark classes given");
    return out;
}

struct ModelCells {
    Rational lp_gap;
    Rational mip_gap;
    double ms = 0.0;
    bool lp_optimal = false;
    bool solved = false;
};

struct BenchCells {
    ModelCells scm;
    ModelCells pim;
    std::string error;
};

BenchCells bench_one(int n, int classes, std::uint64_t seed, std::size_t budget_ms) {
    BenchCells cells;
    const Instance inst = generate({n, classes, seed});
    const int opt = solve_unidir(inst).objective;

    BbOptions bopt;
    bopt.require_optimal = false;
    if (budget_ms == 0) {
        bopt.node_budget = 1;  // root relaxation only
    } else {
        bopt.node_budget = 100'000;
        bopt.time_budget_ms = budget_ms;
    }

    {
        const Stopwatch sw;
        const IpModel model = dominate_columns(build_uniscm(inst, true));
        const LpReport lp = lp_relaxation(model);
        const BbResult r = bb_solve(inst, model, bopt);
        cells.scm.ms = sw.ms();
        cells.scm.lp_gap = relative_gap(lp.value, opt);
        cells.scm.mip_gap = relative_gap(r.best_bound, r.incumbent_value);
        cells.scm.lp_optimal = lp.value == opt;
        cells.scm.solved = r.optimal;
    }
    {
        const Stopwatch sw;
        const Rational lp = pim_lp_value(inst);
        const BbResult r = bb_solve_pim_cut(inst, bopt);
        cells.pim.ms = sw.ms();
        cells.pim.lp_gap = relative_gap(lp, opt);
        cells.pim.mip_gap = relative_gap(r.best_bound, r.incumbent_value);
        cells.pim.lp_optimal = lp == opt;
        cells.pim.solved = r.optimal;
    }
    return cells;
}

struct BenchAggregate {
    int lp_optimal = 0;
    int solved = 0;
    Rational lp_gap_sum, lp_gap_max;
    Rational mip_gap_sum, mip_gap_max;
    double ms_sum = 0.0, ms_max = 0.0;
    int count = 0;

    void add(const ModelCells& c) {
        ++count;
        if (c.lp_optimal) ++lp_optimal;
        if (c.solved) ++solved;
        lp_gap_sum += c.lp_gap;
        lp_gap_max = std::max(lp_gap_max, c.lp_gap);
        mip_gap_sum += c.mip_gap;
        mip_gap_max = std::max(mip_gap_max, c.mip_gap);
        ms_sum += c.ms;
        ms_max = std::max(ms_max, c.ms);
    }
    Rational avg_lp_gap() const { return count ? lp_gap_sum / count : Rational(0); }
    Rational avg_mip_gap() const { return count ? mip_gap_sum / count : Rational(0); }
    double avg_ms() const { return count ? ms_sum / count : 0.0; }
};

int cmd_bench(const std::string& classes_text, int per_class, std::uint64_t seed,
              std::size_t budget_ms, const std::string& csv_path, std::ostream& out) {
    const std::vector<BenchClass> classes = parse_classes(classes_text);
    if (per_class < 1) throw parse_error("--per-class must be positive");

    struct Task {
        int class_index;
        int n, classes;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (int k = 0; k < per_class; ++k)
            tasks.push_back({static_cast<int>(c), classes[c].n, classes[c].classes,
                             seed + 1000003ULL * c + static_cast<std::uint64_t>(k)});

    std::vector<BenchCells> results(tasks.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t t = 0; t < tasks.size(); ++t) {  // NOLINT
        try {
            results[t] = bench_one(tasks[t].n, tasks[t].classes, tasks[t].seed, budget_ms);
        } catch (const std::exception& e) {
            results[t].error = e.what();
        }
    }
    for (const BenchCells& r : results)
        if (!r.error.empty()) throw model_error("benchmark instance failed: " + r.error);

    std::vector<BenchAggregate> scm(classes.size()), pim(classes.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        scm[static_cast<std::size_t>(tasks[t].class_index)].add(results[t].scm);
        pim[static_cast<std::size_t>(tasks[t].class_index)].add(results[t].pim);
    }

    auto row_note = [&](const BenchAggregate& a) {
        if (budget_ms == 0) return std::string("root bound");
        return a.solved == a.count ? std::string("optimal")
                                   : std::string("budget (" + std::to_string(a.solved) + "/" +
                                                 std::to_string(a.count) + " optimal)");
    };

    std::ostringstream csv;
    csv << "class,model,n_lp_optimal,avg_lp_gap_pct,max_lp_gap_pct,avg_mip_gap_pct,"
           "max_mip_gap_pct,avg_runtime_ms,max_runtime_ms,solved_optimal\n";

    char line[256];
    out << "class    model    N.LP-opt  Avg.LP-Gap%  Max.LP-Gap%  Avg.MIP-Gap%  Max.MIP-Gap%"
           "  Avg.ms    Max.ms    note\n";
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const std::string cls =
            "(" + std::to_string(classes[c].n) + "," + std::to_string(classes[c].classes) + ")";
        const struct {
            const char* name;
            const BenchAggregate* agg;
        } rows[2] = {{"uniSCM", &scm[c]}, {"PIM", &pim[c]}};
        for (const auto& row : rows) {
            const BenchAggregate& a = *row.agg;
            std::snprintf(line, sizeof line,
                          "%-8s %-8s %8d  %11s  %11s  %12s  %12s  %8.1f  %8.1f  %s\n",
                          cls.c_str(), row.name, a.lp_optimal,
                          percent(a.avg_lp_gap()).c_str(), percent(a.lp_gap_max).c_str(),
                          percent(a.avg_mip_gap()).c_str(), percent(a.mip_gap_max).c_str(),
                          a.avg_ms(), a.ms_max, row_note(a).c_str());
            out << line;
            csv << cls << "," << row.name << "," << a.lp_optimal << ","
                << percent(a.avg_lp_gap()) << "," << percent(a.lp_gap_max) << ","
                << percent(a.avg_mip_gap()) << "," << percent(a.mip_gap_max) << ","
                << a.avg_ms() << "," << a.ms_max << "," << a.solved << "\n";
        }
    }

    bool self_check = true;
    for (std::size_t c = 0; c < classes.size(); ++c)
        if (!(scm[c].avg_lp_gap() <= pim[c].avg_lp_gap())) self_check = false;
    out << "self-check: avg LP gap (uniSCM) <= avg LP gap (PIM) on every class: "
        << (self_check ? "ok" : "FAILED") << "\n";

    if (!csv_path.empty()) write_file(csv_path, csv.str());
    if (!self_check)
        throw model_error("benchmark self-check failed: the span model's relaxation "
                          "should never be weaker on average");
    return 0;
}

// ---------------------------------------------------------------------------
// top-level dispatch
// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Railway-corridor maintenance scheduling: minimize cancelled train paths"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "Solve an instance file");
    std::string solve_path;
    SolveSettings st;
    bool as_json = false;
    bool as_text = false;
    std::string solution_out;
    solve->add_option("instance", solve_path, "instance JSON file")->required();
    solve->add_option("--algo", st.algo, "algorithm")
        ->check(CLI::IsMember({"auto", "brute", "dp", "unidir", "ordered", "blocks", "bb:pim",
                               "bb:scm", "bb:uniscm"}));
    auto* jf = solve->add_flag("--json", as_json, "JSON report");
    solve->add_flag("--text", as_text, "plain-text report (default)")->excludes(jf);
    solve->add_flag("--verify", st.verify,
                    "cross-check the objective against the exhaustive oracle when small");
    solve->add_flag("--timings", st.timings, "include wall times in the report");
    solve->add_option("--node-budget", st.node_budget, "branch-and-bound node budget");
    solve->add_option("--budget-ms", st.budget_ms, "branch-and-bound wall-clock budget");
    solve->add_option("--emit-lp", st.emit_lp_path, "write the integer model as an LP file");
    solve->add_option("--emit-dot", st.emit_dot_path, "write the block digraph as DOT");
    solve->add_option("--out", solution_out, "also write the solution JSON to this file");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random instance");
    std::string kind = "unidir";
    int gn = 30, gclasses = 2, gratio = 4, gm = 6, gmax = 6;
    std::uint64_t gseed = 0;
    std::string gen_out;
    gen->add_option("--kind", kind, "unidir|ordered|runs|geometric|hhp")
        ->check(CLI::IsMember({"unidir", "ordered", "runs", "geometric", "hhp"}));
    gen->add_option("--n", gn, "job count");
    gen->add_option("--classes", gclasses, "distinct window lengths (unidir/ordered)");
    auto* gseed_opt = gen->add_option("--seed", gseed, "generator seed");
    gen->add_option("--ratio", gratio, "travel/headway ratio (runs)");
    gen->add_option("--m", gm, "paths per direction (geometric)");
    gen->add_option("--max-value", gmax, "value bound (hhp)");
    gen->add_option("--out", gen_out, "output file (default stdout)");

    // emit-lp
    auto* elp = app.add_subcommand("emit-lp", "Write an integer model as a CPLEX LP file");
    std::string elp_path, elp_form = "pim", elp_out;
    bool elp_dominate = false;
    elp->add_option("instance", elp_path, "instance JSON file")->required();
    elp->add_option("--form", elp_form, "model form")
        ->check(CLI::IsMember({"pim", "pim-restricted", "scm", "uniscm", "uniscm-restricted"}));
    elp->add_flag("--dominate", elp_dominate, "drop dominated covering columns");
    elp->add_option("--out", elp_out, "output file (default stdout)");

    // reduce-hhp
    auto* rh = app.add_subcommand(
        "reduce-hhp", "Embed a pair-hitting instance ({a,a+1} vs {b}) as a corridor instance");
    std::string rh_path, rh_out;
    rh->add_option("input", rh_path, "pair-hitting JSON file {\"A\":[...],\"B\":[...]}")
        ->required();
    rh->add_option("--out", rh_out, "output file (default stdout)");

    // diagram
    auto* dia = app.add_subcommand("diagram", "Render a time-distance SVG diagram");
    std::string dia_inst, dia_sol, dia_out;
    dia->add_option("instance", dia_inst, "instance JSON file")->required();
    dia->add_option("solution", dia_sol, "optional solution JSON file");
    dia->add_option("--out", dia_out, "output SVG file")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "Relaxation-quality benchmark over random classes");
    std::string bench_classes = "(30,2);(30,3);(30,4)";
    int per_class = 20;
    std::uint64_t bench_seed = 1;
    std::size_t bench_budget = 2000;
    std::string bench_csv;
    bench->add_option("--classes", bench_classes, "semicolon list of (n,c) pairs");
    bench->add_option("--per-class", per_class, "instances per class");
    auto* bseed_opt = bench->add_option("--seed", bench_seed, "base seed");
    bench->add_option("--budget-ms", bench_budget,
                      "wall-clock budget per integer solve (0: root bound only)");
    bench->add_option("--csv", bench_csv, "also write the table as CSV");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (solve->parsed()) {
        const Instance inst = parse_instance(read_file(solve_path));
        const RunReport rep = run_solve(inst, st);
        out << (as_json ? emit_report(rep, st.timings)
                        : format_report_text(rep, st.timings));
        if (!as_json) out.flush();
        if (!solution_out.empty()) write_file(solution_out, emit_solution(rep.solution));
        return 0;
    }
    if (gen->parsed()) {
        if (!*gseed_opt) gseed = env_seed(gseed);
        std::string payload;
        if (kind == "unidir") payload = emit_instance(generate({gn, gclasses, gseed}));
        else if (kind == "ordered") payload = emit_instance(generate_ordered({gn, gclasses, gseed}));
        else if (kind == "runs") payload = emit_instance(generate_runs({gn, gratio, gseed}));
        else if (kind == "geometric") payload = emit_instance(generate_geometric({gn, gm, gseed}));
        else payload = emit_hhp(random_hhp(gn, gmax, gseed));
        if (gen_out.empty()) out << payload << "\n";
        else write_file(gen_out, payload + "\n");
        return 0;
    }
    if (elp->parsed()) {
        const Instance inst = parse_instance(read_file(elp_path));
        IpModel model;
        if (elp_form == "pim") model = build_pim(inst);
        else if (elp_form == "pim-restricted") model = build_pim(inst, true);
        else if (elp_form == "scm") model = build_scm(inst);
        else if (elp_form == "uniscm") model = build_uniscm(reduce_instance(inst).instance, false);
        else model = build_uniscm(reduce_instance(inst).instance, true);
        if (elp_dominate) model = dominate_columns(model);
        const std::string text = emit_lp_file(model);
        if (elp_out.empty()) out << text;
        else write_file(elp_out, text);
        return 0;
    }
    if (rh->parsed()) {
        const Instance inst = hhp_to_msp(parse_hhp(read_file(rh_path)));
        const std::string text = emit_instance(inst);
        if (rh_out.empty()) out << text << "\n";
        else write_file(rh_out, text + "\n");
        return 0;
    }
    if (dia->parsed()) {
        const Instance inst = parse_instance(read_file(dia_inst));
        Solution sol;
        const bool with_sol = !dia_sol.empty();
        if (with_sol) sol = parse_solution(read_file(dia_sol));
        write_file(dia_out, render_diagram(inst, with_sol ? &sol : nullptr));
        return 0;
    }
    if (bench->parsed()) {
        if (!*bseed_opt) bench_seed = env_seed(bench_seed);
        return cmd_bench(bench_classes, per_class, bench_seed, bench_budget, bench_csv, out);
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const parse_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const model_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace corridor
