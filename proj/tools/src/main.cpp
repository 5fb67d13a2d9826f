#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "manifest.hpp"
#include "sirp/analytic.hpp"
#include "sirp/instance.hpp"
#include "sirp/measures.hpp"
#include "sirp/milp.hpp"
#include "sirp/model_build.hpp"
#include "sirp/mps.hpp"
#include "sirp/plan.hpp"
#include "sirp/rng.hpp"
#include "sirp/rolling_horizon.hpp"
#include "sirp/sampler.hpp"
#include "sirp/scenario_tree.hpp"
#include "sirp/tree_fit.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace sirp;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitReport = 1; // report carries an error marker
constexpr int kExitError = 2;  // bad input / usage

struct Globals {
    std::uint64_t seed = 1;
    double time_limit = 7200.0;
    std::string variant = "M";
    std::string out_dir = ".";
};

double now_minus(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw LoadError("cannot create output directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

SolverConfig solver_config(double time_limit) {
    SolverConfig cfg;
    cfg.time_limit = time_limit;
    return cfg;
}

ordered_json solver_config_json(const SolverConfig& cfg) {
    ordered_json j;
    j["feas_tol"] = cfg.feas_tol;
    j["int_tol"] = cfg.int_tol;
    j["rel_gap"] = cfg.rel_gap;
    j["abs_gap"] = cfg.abs_gap;
    j["time_limit"] = cfg.time_limit;
    j["node_limit"] = cfg.node_limit;
    return j;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

struct LoadedPair {
    Instance inst;
    ScenarioTree tree;
};

LoadedPair load_pair(tool::RunManifest& man, const std::string& inst_path,
                     const std::string& tree_path) {
    man.add_input(inst_path);
    man.add_input(tree_path);
    LoadedPair lp;
    std::vector<std::string> warnings;
    lp.inst = load_instance(inst_path, {}, &warnings);
    print_warnings(warnings);
    lp.tree = load_tree(tree_path);
    if (lp.tree.num_bins() != lp.inst.num_bins())
        throw DataError("instance has " + std::to_string(lp.inst.num_bins()) +
                        " bins but the tree carries " + std::to_string(lp.tree.num_bins()));
    if (lp.tree.num_stages() != lp.inst.params.horizon)
        std::fprintf(stderr,
                     "warning: tree spans %d stages, instance horizon is %d; the tree wins\n",
                     lp.tree.num_stages(), lp.inst.params.horizon);
    const TreeDiagnostics diag = validate_tree(lp.tree);
    for (const TreeIssue& is : diag.issues)
        std::fprintf(stderr, "tree issue [%s] node %d: %s\n", is.code.c_str(), is.node,
                     is.message.c_str());
    if (!diag.ok()) throw DataError("scenario tree failed validation");
    return lp;
}

void kpi_block(const PlanTotals& t) {
    std::printf("Profit: %.6f\n", t.expected_profit);
    std::printf("Weight of collected waste (kg): %.6f\n", t.expected_collected_kg);
    std::printf("Travelled distance (km): %.6f\n", t.total_distance_km);
    std::printf("Ratio weight/distance (kg/km): %.6f\n", t.collected_per_km);
}

ordered_json kpi_json(const PlanTotals& t) {
    ordered_json j;
    j["profit"] = t.expected_profit;
    j["collected_kg"] = t.expected_collected_kg;
    j["distance_km"] = t.total_distance_km;
    j["collected_per_km"] = t.collected_per_km;
    return j;
}

// ---------------------------------------------------------------- gen-tree

int cmd_gen_tree(const Globals& g, const std::string& history_path,
                 const std::string& structure_text, long long iterations,
                 const std::string& out_name) {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_out_dir(g.out_dir);

    tool::RunManifest man;
    man.command = "gen-tree";
    man.tool_version = kToolVersion;
    man.seed = g.seed;
    man.add_input(history_path);

    const BranchingStructure structure = BranchingStructure::parse(structure_text);
    man.config = {{"structure", structure.to_string()},
                  {"iterations", iterations},
                  {"horizon", structure.stages()}};

    const std::vector<FillHistory> histories = load_fill_histories(history_path);
    std::vector<DailyRates> rates;
    rates.reserve(histories.size());
    for (const FillHistory& h : histories) rates.push_back(derive_accumulation(h));
    const TrajectoryBank bank = TrajectoryBank::from_daily_rates(rates, structure.stages());
    std::printf("bank: %d bins, %d observations of %d stages\n", bank.num_bins(),
                bank.num_observations(), bank.horizon());

    FitResult fit = fit_tree(bank, structure, iterations, g.seed);
    print_warnings(fit.warnings);
    if (fit.sampler_stats.weight_fallbacks > 0)
        std::fprintf(stderr, "note: %ld uniform weight fallbacks during sampling\n",
                     fit.sampler_stats.weight_fallbacks);

    const TreeDiagnostics diag = validate_tree(fit.tree);
    for (const TreeIssue& is : diag.issues)
        std::fprintf(stderr, "tree issue [%s] node %d: %s\n", is.code.c_str(), is.node,
                     is.message.c_str());

    const std::string out_path = join_path(g.out_dir, out_name);
    save_tree(fit.tree, out_path);
    man.outputs.push_back(out_path);
    std::printf("tree: %d nodes, %zu scenarios -> %s\n", fit.tree.num_nodes(),
                fit.tree.leaves().size(), out_path.c_str());

    man.wall_seconds = now_minus(t0);
    man.write(g.out_dir);
    return diag.ok() ? kExitOk : kExitReport;
}

// ------------------------------------------------------------------- solve

int cmd_solve(const Globals& g, const std::string& inst_path, const std::string& tree_path,
              const std::string& mps_path) {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_out_dir(g.out_dir);

    tool::RunManifest man;
    man.command = "solve";
    man.tool_version = kToolVersion;
    man.seed = g.seed;
    const LoadedPair lp = load_pair(man, inst_path, tree_path);

    const ModelVariant variant = parse_variant(g.variant);
    const SolverConfig cfg = solver_config(g.time_limit);
    man.config = {{"variant", g.variant}, {"solver", solver_config_json(cfg)}};

    const MilpProblem model = build_model(lp.inst, TreeView::full(lp.tree), variant);
    const ModelSizes sizes = model_sizes(model);
    std::printf("model %s: %d binaries, %d continuous, %d equalities, %d inequalities\n",
                to_string(variant), sizes.binaries, sizes.continuous, sizes.equalities,
                sizes.inequalities);

    if (!mps_path.empty()) {
        export_mps(model, mps_path);
        man.outputs.push_back(mps_path);
        std::printf("mps written to %s\n", mps_path.c_str());
    }

    const MilpSolution sol = solve_milp(model, cfg);
    std::printf("status %s, objective %.6f, bound %.6f, gap %.3g, %lld nodes, %.2fs\n",
                to_string(sol.status), sol.objective, sol.bound, sol.gap(), sol.stats.nodes,
                sol.stats.seconds);

    ordered_json rep;
    rep["schema_version"] = 1;
    rep["variant"] = to_string(variant);
    rep["status"] = to_string(sol.status);
    rep["sizes"] = {{"binaries", sizes.binaries},
                    {"continuous", sizes.continuous},
                    {"equalities", sizes.equalities},
                    {"inequalities", sizes.inequalities}};
    rep["stats"] = {{"nodes", sol.stats.nodes},
                    {"lp_pivots", sol.stats.lp_pivots},
                    {"seconds", sol.stats.seconds}};

    int exit_code = kExitOk;
    if (!sol.values.empty()) {
        rep["objective"] = sol.objective;
        rep["bound"] = sol.bound;
        rep["gap"] = sol.gap();
        const CollectionPlan plan = decode_solution(model, sol.values, lp.inst, lp.tree, variant);
        const std::string plan_path = join_path(g.out_dir, "plan.json");
        save_plan(plan, plan_path);
        man.outputs.push_back(plan_path);
        rep["plan_file"] = plan_path;
        rep["kpis"] = kpi_json(plan.totals);
        kpi_block(plan.totals);
        if (sol.status != SolveStatus::Optimal) exit_code = kExitReport;
    } else {
        exit_code = kExitReport;
    }

    const std::string rep_path = join_path(g.out_dir, "solve_report.json");
    std::ofstream out(rep_path);
    if (!out) throw LoadError("cannot write " + rep_path);
    out << rep.dump(2) << "\n";
    man.outputs.push_back(rep_path);

    man.wall_seconds = now_minus(t0);
    man.write(g.out_dir);
    return exit_code;
}

// -------------------------------------------------------------------- roll

int cmd_roll(const Globals& g, const std::string& inst_path, const std::string& tree_path,
             int window, double baseline_profit, bool have_baseline) {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_out_dir(g.out_dir);

    tool::RunManifest man;
    man.command = "roll";
    man.tool_version = kToolVersion;
    man.seed = g.seed;
    const LoadedPair lp = load_pair(man, inst_path, tree_path);

    const ModelVariant variant = parse_variant(g.variant);
    RhConfig rh;
    rh.window = window;
    rh.time_limit = g.time_limit;
    rh.variant = variant;
    man.config = {{"variant", g.variant},
                  {"window", window},
                  {"time_limit", g.time_limit},
                  {"baseline", have_baseline ? "supplied" : "computed"}};

    const RhResult res = run_rolling_horizon(lp.inst, lp.tree, rh);

    double rp = baseline_profit;
    double rp_seconds = 0.0;
    bool rp_time_limited = false;
    if (!have_baseline) {
        const MilpProblem full = build_model(lp.inst, TreeView::full(lp.tree), variant);
        const MilpSolution sol = solve_milp(full, solver_config(g.time_limit));
        if (sol.values.empty())
            throw SolveError("baseline recourse problem produced no incumbent; supply "
                             "--baseline-profit instead");
        rp = sol.objective;
        rp_seconds = sol.stats.seconds;
        rp_time_limited = sol.status == SolveStatus::TimeLimit;
    }

    ordered_json rep;
    rep["schema_version"] = 1;
    rep["variant"] = to_string(variant);
    rep["window"] = window;
    rep["time_limit"] = g.time_limit;
    rep["failed"] = res.failed;
    if (res.failed) rep["failure"] = res.failure;
    rep["z_rh"] = res.profit.neg_infinity
                      ? ordered_json{{"neg_infinity", true}}
                      : ordered_json{{"neg_infinity", false}, {"value", res.profit.value}};
    rep["baseline"] = {{"source", have_baseline ? "supplied" : "computed"},
                       {"rp", rp},
                       {"seconds", rp_seconds},
                       {"time_limited", rp_time_limited}};

    int exit_code = kExitOk;
    if (res.failed) {
        exit_code = kExitReport;
        std::printf("rolling horizon failed: %s\n", res.failure.c_str());
    } else if (res.profit.neg_infinity) {
        exit_code = kExitReport;
        rep["profit_reduction_pct"] = {{"infinite", true}};
        std::printf("z^RH = -infinity (infeasible subproblem); profit reduction infinite\n");
    } else {
        std::printf("z^RH = %.6f, RP baseline = %.6f\n", res.profit.value, rp);
        if (rp > 0.0) {
            const double red = 100.0 * (rp - res.profit.value) / rp;
            rep["profit_reduction_pct"] = {{"infinite", false}, {"value", red}};
            std::printf("profit reduction: %.4f%%\n", red);
        } else {
            rep["profit_reduction_pct"] = {{"infinite", false},
                                           {"note", "RP not positive; absolute values only"}};
        }
        if (!have_baseline && rp_seconds > 0.0) {
            const double cred = 100.0 * (rp_seconds - res.seconds) / rp_seconds;
            rep["cpu_reduction_pct"] = cred;
            std::printf("cpu reduction: %.2f%% (%.2fs vs %.2fs)\n", cred, res.seconds,
                        rp_seconds);
        }
        const std::string plan_path = join_path(g.out_dir, "rh_plan.json");
        save_plan(res.plan, plan_path);
        man.outputs.push_back(plan_path);
        rep["plan_file"] = plan_path;
        rep["kpis"] = kpi_json(res.plan.totals);
        kpi_block(res.plan.totals);
    }

    rep["steps"] = ordered_json::array();
    for (const RhStep& s : res.steps)
        rep["steps"].push_back({{"first_stage", s.first_stage},
                                {"last_stage", s.last_stage},
                                {"status", to_string(s.status)},
                                {"budget_seconds", s.budget_seconds},
                                {"used_seconds", s.used_seconds},
                                {"objective", s.objective},
                                {"nodes", s.nodes}});
    rep["seconds"] = res.seconds;

    const std::string rep_path = join_path(g.out_dir, "roll_report.json");
    std::ofstream out(rep_path);
    if (!out) throw LoadError("cannot write " + rep_path);
    out << rep.dump(2) << "\n";
    man.outputs.push_back(rep_path);

    man.wall_seconds = now_minus(t0);
    man.write(g.out_dir);
    return exit_code;
}

// ---------------------------------------------------------------- measures

int run_measures_single(const Globals& g, tool::RunManifest& man, const std::string& inst_path,
                        const std::string& tree_path, const std::string& report_name,
                        MeasureReport* out_report) {
    const LoadedPair lp = load_pair(man, inst_path, tree_path);
    MeasureConfig mc;
    mc.variant = parse_variant(g.variant);
    mc.solver = solver_config(g.time_limit);
    const MeasureReport rep = compute_measures(lp.inst, lp.tree, mc);
    std::printf("%s", format_measure_report(rep).c_str());
    const std::string path = join_path(g.out_dir, report_name);
    save_measure_report(rep, path);
    man.outputs.push_back(path);
    if (out_report != nullptr) *out_report = rep;
    return has_anomalies(rep) ? kExitReport : kExitOk;
}

struct BatchEntry {
    int draw = 0;
    int bins = 0;
    std::string inst_path;
    std::string tree_path;
};

std::vector<BatchEntry> scan_batch_dir(const std::string& dir) {
    const std::regex pat("inst_(\\d+)_(\\d+)\\.json");
    std::vector<BatchEntry> entries;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::smatch m;
        const std::string name = e.path().filename().string();
        if (!std::regex_match(name, m, pat)) continue;
        BatchEntry be;
        be.draw = std::stoi(m[1].str());
        be.bins = std::stoi(m[2].str());
        be.inst_path = e.path().string();
        be.tree_path =
            (e.path().parent_path() / ("tree_" + m[1].str() + "_" + m[2].str() + ".json"))
                .string();
        if (!fs::exists(be.tree_path))
            throw LoadError("missing tree file " + be.tree_path + " for " + be.inst_path);
        entries.push_back(std::move(be));
    }
    std::sort(entries.begin(), entries.end(), [](const BatchEntry& a, const BatchEntry& b) {
        return std::tie(a.bins, a.draw) < std::tie(b.bins, b.draw);
    });
    if (entries.empty())
        throw LoadError("no inst_<draw>_<bins>.json files found in " + dir);
    return entries;
}

// mean over the finite cells of one measure column across a size class
struct CellAgg {
    double sum = 0.0;
    int finite = 0;
    int infinite = 0;

    void add(const MeasureValue& v) {
        if (v.infinite)
            ++infinite;
        else {
            sum += v.value;
            ++finite;
        }
    }
    std::string mean() const {
        if (finite == 0) return "";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", sum / finite);
        return buf;
    }
};

int cmd_measures(const Globals& g, const std::string& inst_path, const std::string& tree_path,
                 const std::string& batch_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_out_dir(g.out_dir);

    tool::RunManifest man;
    man.command = "measures";
    man.tool_version = kToolVersion;
    man.seed = g.seed;
    man.config = {{"variant", g.variant}, {"time_limit", g.time_limit}};

    int exit_code = kExitOk;
    if (batch_dir.empty()) {
        exit_code = run_measures_single(g, man, inst_path, tree_path, "measures_report.json",
                                        nullptr);
    } else {
        const std::vector<BatchEntry> entries = scan_batch_dir(batch_dir);
        man.config["batch_dir"] = batch_dir;

        // per (bins, measure, t) aggregation over draws
        std::map<int, std::vector<MeasureReport>> by_bins;
        for (const BatchEntry& be : entries) {
            std::printf("== inst_%d_%d ==\n", be.draw, be.bins);
            MeasureReport rep;
            const std::string name = "measures_report_" + std::to_string(be.draw) + "_" +
                                     std::to_string(be.bins) + ".json";
            const int rc = run_measures_single(g, man, be.inst_path, be.tree_path, name, &rep);
            exit_code = std::max(exit_code, rc);
            by_bins[be.bins].push_back(std::move(rep));
        }

        const std::string csv_path = join_path(g.out_dir, "measures_summary.csv");
        std::ofstream csv(csv_path);
        if (!csv) throw LoadError("cannot write " + csv_path);
        csv << "bins,draws,measure,t,finite_mean,n_finite,n_infinite\n";
        for (const auto& [bins, reps] : by_bins) {
            const int horizon = reps.front().horizon;
            auto emit = [&](const std::string& measure, int t, const CellAgg& agg) {
                csv << bins << "," << reps.size() << "," << measure << ","
                    << (t > 0 ? std::to_string(t) : "") << "," << agg.mean() << ","
                    << agg.finite << "," << agg.infinite << "\n";
            };
            CellAgg rp, ws, ev, evpi;
            for (const MeasureReport& r : reps) {
                MeasureValue rv;
                rv.value = r.rp;
                rp.add(rv);
                ws.add(r.ws);
                ev.add(r.ev);
                if (r.percentages_valid) evpi.add(r.evpi_pct);
            }
            emit("rp", 0, rp);
            emit("ws", 0, ws);
            emit("ev", 0, ev);
            emit("evpi_pct", 0, evpi);
            for (int t = 1; t <= horizon - 1; ++t) {
                CellAgg eev, messv, meiv, vss, mluss, mluds;
                for (const MeasureReport& r : reps) {
                    const std::size_t ts = static_cast<std::size_t>(t - 1);
                    if (ts >= r.eev.size()) continue;
                    eev.add(r.eev[ts]);
                    messv.add(r.messv[ts]);
                    meiv.add(r.meiv[ts]);
                    if (r.percentages_valid) {
                        vss.add(r.vss_pct[ts]);
                        mluss.add(r.mluss_pct[ts]);
                        mluds.add(r.mluds_pct[ts]);
                    }
                }
                emit("eev", t, eev);
                emit("messv", t, messv);
                emit("meiv", t, meiv);
                emit("vss_pct", t, vss);
                emit("mluss_pct", t, mluss);
                emit("mluds_pct", t, mluds);
            }
        }
        man.outputs.push_back(csv_path);
        std::printf("summary -> %s\n", csv_path.c_str());
    }

    man.wall_seconds = now_minus(t0);
    man.write(g.out_dir);
    return exit_code;
}

// --------------------------------------------------------------- stability

int cmd_stability(const Globals& g, const std::string& history_path,
                  const std::string& inst_path, const std::string& structures_text, int runs,
                  long long iterations) {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_out_dir(g.out_dir);

    tool::RunManifest man;
    man.command = "stability";
    man.tool_version = kToolVersion;
    man.seed = g.seed;
    man.add_input(history_path);
    man.add_input(inst_path);

    std::vector<BranchingStructure> structures;
    {
        std::string token;
        std::istringstream in(structures_text);
        while (std::getline(in, token, ','))
            if (!token.empty()) structures.push_back(BranchingStructure::parse(token));
    }
    if (structures.empty()) throw DataError("no branching structures given");
    man.config = {{"structures", structures_text},
                  {"runs", runs},
                  {"iterations", iterations},
                  {"variant", g.variant},
                  {"time_limit", g.time_limit}};

    std::vector<std::string> warnings;
    const Instance inst = load_instance(inst_path, {}, &warnings);
    print_warnings(warnings);

    const std::vector<FillHistory> histories = load_fill_histories(history_path);
    std::vector<DailyRates> rates;
    for (const FillHistory& h : histories) rates.push_back(derive_accumulation(h));
    const int horizon = structures.front().stages();
    for (const BranchingStructure& s : structures)
        if (s.stages() != horizon)
            throw DataError("all structures must share one horizon for the stability table");
    const TrajectoryBank bank = TrajectoryBank::from_daily_rates(rates, horizon);
    if (bank.num_bins() != inst.num_bins())
        throw DataError("history covers " + std::to_string(bank.num_bins()) +
                        " bins, instance has " + std::to_string(inst.num_bins()));

    const ModelVariant variant = parse_variant(g.variant);
    const SolverConfig scfg = solver_config(g.time_limit);
    const SolveHook hook = [&](const ScenarioTree& tree) {
        StabilityOutcome out;
        try {
            const MilpProblem model = build_model(inst, TreeView::full(tree), variant);
            const MilpSolution sol = solve_milp(model, scfg);
            if (sol.values.empty()) return out;
            const CollectionPlan plan = decode_solution(model, sol.values, inst, tree, variant);
            out.ok = true;
            out.profit = sol.objective;
            out.collected_kg = plan.totals.expected_collected_kg;
            out.distance_km = plan.totals.total_distance_km;
            out.cpu_seconds = sol.stats.seconds;
        } catch (const Error& e) {
            std::fprintf(stderr, "stability run failed: %s\n", e.what());
        }
        return out;
    };

    const StabilityTable table = stability_batch(bank, structures, runs, hook, g.seed, iterations);

    const std::string csv_path = join_path(g.out_dir, "stability.csv");
    std::ofstream csv(csv_path);
    if (!csv) throw LoadError("cannot write " + csv_path);
    csv << "structure,scenarios,runs,failures,mean_profit,std_profit,mean_collected,"
           "std_collected,mean_distance,std_distance,mean_cpu,std_cpu,multistage_distance\n";
    bool any_failures = false;
    for (const StabilityRow& r : table.rows) {
        csv << r.structure << "," << r.scenarios << "," << r.runs << "," << r.failures << ","
            << r.mean_profit << "," << r.std_profit << "," << r.mean_collected << ","
            << r.std_collected << "," << r.mean_distance << "," << r.std_distance << ","
            << r.mean_cpu << "," << r.std_cpu << "," << r.multistage_distance << "\n";
        std::printf("%-16s scen=%-5lld runs=%d fail=%d profit=%.4f (%.4f) kg=%.2f km=%.2f\n",
                    r.structure.c_str(), r.scenarios, r.runs, r.failures, r.mean_profit,
                    r.std_profit, r.mean_collected, r.mean_distance);
        any_failures = any_failures || r.failures > 0;
    }
    man.outputs.push_back(csv_path);
    std::printf("table -> %s\n", csv_path.c_str());

    man.wall_seconds = now_minus(t0);
    man.write(g.out_dir);
    return any_failures ? kExitReport : kExitOk;
}

// --------------------------------------------------------------- export-mps

int cmd_export_mps(const Globals& g, const std::string& inst_path, const std::string& tree_path,
                   const std::string& out_name, const std::string& check_path) {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_out_dir(g.out_dir);

    tool::RunManifest man;
    man.command = "export-mps";
    man.tool_version = kToolVersion;
    man.seed = g.seed;
    const LoadedPair lp = load_pair(man, inst_path, tree_path);
    const ModelVariant variant = parse_variant(g.variant);
    man.config = {{"variant", g.variant}};

    const MilpProblem model = build_model(lp.inst, TreeView::full(lp.tree), variant);
    const ModelSizes sizes = model_sizes(model);
    const std::string mps_path = join_path(g.out_dir, out_name);
    export_mps(model, mps_path);
    man.outputs.push_back(mps_path);
    if (fs::exists(mps_path + ".names")) man.outputs.push_back(mps_path + ".names");
    std::printf("%s: %d columns (%d binary), %d rows -> %s\n", model.name.c_str(),
                sizes.binaries + sizes.continuous, sizes.binaries,
                sizes.equalities + sizes.inequalities, mps_path.c_str());

    int exit_code = kExitOk;
    if (!check_path.empty()) {
        man.add_input(check_path);
        const std::string sidecar = fs::exists(mps_path + ".names") ? mps_path + ".names" : "";
        const MilpSolution sol = import_solution(check_path, model, sidecar);
        std::printf("external solution accepted, objective %.6f\n", sol.objective);
        const CollectionPlan plan = decode_solution(model, sol.values, lp.inst, lp.tree, variant);
        kpi_block(plan.totals);
        const std::string plan_path = join_path(g.out_dir, "imported_plan.json");
        save_plan(plan, plan_path);
        man.outputs.push_back(plan_path);
    }

    man.wall_seconds = now_minus(t0);
    man.write(g.out_dir);
    return exit_code;
}

// ------------------------------------------------------------ draw-instance

int cmd_draw_instance(const Globals& g, const std::string& master_inst,
                      const std::string& master_tree, int bins, int draw) {
    const auto t0 = std::chrono::steady_clock::now();
    ensure_out_dir(g.out_dir);

    tool::RunManifest man;
    man.command = "draw-instance";
    man.tool_version = kToolVersion;
    man.seed = g.seed;
    const LoadedPair lp = load_pair(man, master_inst, master_tree);
    man.config = {{"bins", bins}, {"draw", draw}};

    const int N = lp.inst.num_bins();
    if (bins < 1 || bins > N)
        throw DataError("cannot draw " + std::to_string(bins) + " bins from a master with " +
                        std::to_string(N));

    // seeded draw without replacement, positions kept in master order
    Rng rng(g.seed + static_cast<std::uint64_t>(draw) * 7919u);
    std::vector<int> pool(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int k = 0; k < bins; ++k) {
        const int r = static_cast<int>(rng.uniform_int(k, N - 1));
        std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(r)]);
    }
    std::vector<int> sel(pool.begin(), pool.begin() + bins);
    std::sort(sel.begin(), sel.end());

    Instance sub;
    sub.name = "inst_" + std::to_string(draw) + "_" + std::to_string(bins);
    sub.params = lp.inst.params;
    for (int pos : sel) sub.bins.push_back(lp.inst.bins[static_cast<std::size_t>(pos)]);
    const int V = bins + 1;
    std::vector<double> d(static_cast<std::size_t>(V) * V, 0.0);
    std::vector<int> verts = {0};
    for (int pos : sel) verts.push_back(pos + 1);
    for (int a = 0; a < V; ++a)
        for (int b = 0; b < V; ++b)
            d[static_cast<std::size_t>(a) * V + b] =
                lp.inst.distances.at(verts[static_cast<std::size_t>(a)],
                                     verts[static_cast<std::size_t>(b)]);
    sub.distances = DistanceMatrix(V, std::move(d));
    validate_instance(sub);

    const ScenarioTree sub_tree = restrict_tree_to_bins(lp.tree, sel);

    const std::string inst_path = join_path(g.out_dir, sub.name + ".json");
    const std::string tree_path =
        join_path(g.out_dir, "tree_" + std::to_string(draw) + "_" + std::to_string(bins) + ".json");
    save_instance(sub, inst_path);
    save_tree(sub_tree, tree_path);
    man.outputs.push_back(inst_path);
    man.outputs.push_back(tree_path);
    std::printf("drew bins");
    for (int pos : sel) std::printf(" %d", lp.inst.bins[static_cast<std::size_t>(pos)].id);
    std::printf(" -> %s, %s\n", inst_path.c_str(), tree_path.c_str());

    man.wall_seconds = now_minus(t0);
    man.write(g.out_dir);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "planning toolkit for stochastic recyclable-waste collection "
        "(scenario trees, exact models, rolling horizon, stochastic measures)"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--time-limit", g.time_limit, "solver wall-clock budget, seconds")
        ->capture_default_str();
    app.add_option("--variant", g.variant, "model variant")
        ->check(CLI::IsMember({"M", "Msym"}))
        ->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();

    // gen-tree
    auto* gen = app.add_subcommand("gen-tree", "fit a scenario tree to fill-level histories");
    std::string history_path, structure_text = "1x2x2x2x2x2", tree_out = "tree.json";
    long long iterations = 10000;
    gen->add_option("--history", history_path, "fill-history CSV (bin_id,day_index,fill)")
        ->required();
    gen->add_option("--structure", structure_text, "branching structure")->capture_default_str();
    gen->add_option("--iterations", iterations, "stochastic approximation iterations")
        ->capture_default_str();
    gen->add_option("--out", tree_out, "tree file name inside --out-dir")->capture_default_str();

    // solve
    auto* solve = app.add_subcommand("solve", "solve the full multi-stage model");
    std::string inst_path, tree_path, solve_mps;
    solve->add_option("--instance", inst_path, "instance JSON")->required();
    solve->add_option("--tree", tree_path, "scenario tree JSON")->required();
    solve->add_option("--export-mps", solve_mps, "also write the model in MPS format");

    // roll
    auto* roll = app.add_subcommand("roll", "rolling-horizon heuristic");
    int window = 1;
    double baseline_profit = 0.0;
    roll->add_option("--instance", inst_path, "instance JSON")->required();
    roll->add_option("--tree", tree_path, "scenario tree JSON")->required();
    roll->add_option("-W,--window", window, "lookahead window (1..T-2)")->required();
    auto* base_opt =
        roll->add_option("--baseline-profit", baseline_profit,
                         "RP value to compare against (skips the baseline solve)");

    // measures
    auto* meas = app.add_subcommand("measures", "stochastic measure suite");
    std::string batch_dir;
    meas->add_option("--instance", inst_path, "instance JSON");
    meas->add_option("--tree", tree_path, "scenario tree JSON");
    meas->add_option("--batch", batch_dir, "directory of inst_<draw>_<bins>.json pairs");

    // stability
    auto* stab = app.add_subcommand("stability", "in-sample stability over tree structures");
    std::string structures_text;
    int runs = 5;
    long long stab_iters = 10000;
    stab->add_option("--history", history_path, "fill-history CSV")->required();
    stab->add_option("--instance", inst_path, "instance JSON")->required();
    stab->add_option("--structures", structures_text, "comma-separated branching structures")
        ->required();
    stab->add_option("--runs", runs, "tree fits per structure")->capture_default_str();
    stab->add_option("--iterations", stab_iters, "fit iterations")->capture_default_str();

    // export-mps
    auto* exp = app.add_subcommand("export-mps", "write the model in fixed MPS format");
    std::string mps_out = "model.mps", check_path;
    exp->add_option("--instance", inst_path, "instance JSON")->required();
    exp->add_option("--tree", tree_path, "scenario tree JSON")->required();
    exp->add_option("--out", mps_out, "MPS file name inside --out-dir")->capture_default_str();
    exp->add_option("--check", check_path, "validate an external `name value` solution file");

    // draw-instance
    auto* drw = app.add_subcommand("draw-instance", "sample a sub-instance from a master");
    std::string master_inst, master_tree;
    int bins = 9, draw = 1;
    drw->add_option("--master", master_inst, "master instance JSON")->required();
    drw->add_option("--master-tree", master_tree, "master tree JSON")->required();
    drw->add_option("--bins", bins, "bins to draw")->required();
    drw->add_option("--draw", draw, "draw index used in output names")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen_tree(g, history_path, structure_text, iterations, tree_out);
        if (solve->parsed()) return cmd_solve(g, inst_path, tree_path, solve_mps);
        if (roll->parsed())
            return cmd_roll(g, inst_path, tree_path, window, baseline_profit,
                            base_opt->count() > 0);
        if (meas->parsed()) {
            if (batch_dir.empty() && (inst_path.empty() || tree_path.empty()))
                throw DataError("measures needs --instance and --tree, or --batch");
            return cmd_measures(g, inst_path, tree_path, batch_dir);
        }
        if (stab->parsed())
            return cmd_stability(g, history_path, inst_path, structures_text, runs, stab_iters);
        if (exp->parsed()) return cmd_export_mps(g, inst_path, tree_path, mps_out, check_path);
        if (drw->parsed()) return cmd_draw_instance(g, master_inst, master_tree, bins, draw);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
