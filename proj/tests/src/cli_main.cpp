// end-to-end checks of the command-line tool; the binary under test comes
// from the SIRP_CLI environment variable
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sirp/analytic.hpp"
#include "sirp/instance.hpp"
#include "sirp/milp.hpp"
#include "sirp/model_build.hpp"
#include "sirp/plan.hpp"
#include "sirp/scenario_tree.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sirp;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& label) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", label.c_str());
    if (!ok) ++g_failures;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

std::string g_cli;
std::string g_root;

RunResult run_cli(const std::string& args) {
    static int run_id = 0;
    const std::string log = g_root + "/run_" + std::to_string(run_id++) + ".log";
    const std::string cmd = "\"" + g_cli + "\" " + args + " >" + log + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

void write_history_csv(const std::string& path) {
    std::ofstream out(path);
    out << "bin_id,day_index,fill_fraction\n";
    // two bins, collections every other day over two weeks
    const double f1[] = {0.30, 0.42, 0.25, 0.38, 0.52, 0.33, 0.47};
    const double f2[] = {0.22, 0.35, 0.41, 0.28, 0.36, 0.49, 0.31};
    for (int k = 0; k < 7; ++k) {
        out << "1," << (1 + 2 * k) << "," << f1[k] << "\n";
        out << "2," << (1 + 2 * k) << "," << f2[k] << "\n";
    }
}

// fixture pair small enough that every comparison solve stays feasible
void write_pair(const std::string& inst_path, const std::string& tree_path, int bins,
                std::uint64_t seed) {
    const Instance inst =
        testsup::make_instance(bins, 3, seed, {.fill_scale = 0.2});
    const ScenarioTree tree = testsup::make_tree(bins, {1, 2, 2}, seed + 1, 0.15);
    save_instance(inst, inst_path);
    save_tree(tree, tree_path);
}

void test_gen_tree() {
    const std::string hist = g_root + "/history.csv";
    write_history_csv(hist);

    const std::string base = " gen-tree --history " + hist +
                             " --structure 1x2x2 --iterations 2000";
    const RunResult r1 = run_cli("--seed 7 --out-dir " + g_root + "/gt1" + base);
    const RunResult r2 = run_cli("--seed 7 --out-dir " + g_root + "/gt2" + base);
    const RunResult r3 = run_cli("--seed 8 --out-dir " + g_root + "/gt3" + base);
    check(r1.exit_code == 0, "gen-tree exits cleanly");
    check(fs::exists(g_root + "/gt1/tree.json"), "gen-tree writes the tree");
    check(slurp(g_root + "/gt1/tree.json") == slurp(g_root + "/gt2/tree.json"),
          "gen-tree is byte-identical for a fixed seed");
    check(slurp(g_root + "/gt1/tree.json") != slurp(g_root + "/gt3/tree.json"),
          "gen-tree output depends on the seed");

    const std::string man_path = g_root + "/gt1/gen-tree_manifest.json";
    check(fs::exists(man_path), "gen-tree writes a manifest");
    const json man = load_json(man_path);
    check(man["command"] == "gen-tree" && man["seed"] == 7,
          "manifest records command and seed");
    check(man["inputs"].size() == 1 &&
              man["inputs"][0]["sha256"].get<std::string>().size() == 64,
          "manifest hashes its inputs");
    const ScenarioTree tree = load_tree(g_root + "/gt1/tree.json");
    check(validate_tree(tree).ok() && tree.num_stages() == 3,
          "generated tree validates with the requested horizon");

    const RunResult bad = run_cli("--out-dir " + g_root + "/gtbad gen-tree --history " + hist +
                                  " --structure 2x2");
    check(bad.exit_code == 2, "gen-tree rejects a structure without a root");
}

void test_solve_variants() {
    const std::string inst = g_root + "/inst.json";
    const std::string tree = g_root + "/tree.json";
    write_pair(inst, tree, 2, 900);

    const std::string io = " solve --instance " + inst + " --tree " + tree;
    const RunResult rm = run_cli("--variant M --out-dir " + g_root + "/sm" + io);
    const RunResult rs = run_cli("--variant Msym --out-dir " + g_root + "/ss" + io);
    check(rm.exit_code == 0, "solve M exits cleanly");
    check(rs.exit_code == 0, "solve Msym exits cleanly");

    const json jm = load_json(g_root + "/sm/solve_report.json");
    const json js = load_json(g_root + "/ss/solve_report.json");
    check(jm["status"] == "Optimal" && js["status"] == "Optimal",
          "both variants reach Optimal");
    const double zm = jm["objective"].get<double>();
    const double zs = js["objective"].get<double>();
    check(std::fabs(zm - zs) <= 1e-6 * std::max(1.0, std::fabs(zm)),
          "variant objectives agree");

    const CollectionPlan plan = load_plan(g_root + "/sm/plan.json");
    check(std::fabs(plan.totals.expected_profit - zm) <= 1e-6,
          "plan totals match the reported objective");
    const Instance inst_mem = load_instance(inst);
    const ScenarioTree tree_mem = load_tree(tree);
    const ModelSizes sizes =
        model_sizes(build_model(inst_mem, TreeView::full(tree_mem), ModelVariant::M));
    check(jm["sizes"]["binaries"].get<int>() == sizes.binaries,
          "reported sizes match an in-process build");
    check(fs::exists(g_root + "/sm/solve_manifest.json"), "solve writes a manifest");

    const RunResult miss =
        run_cli("solve --instance " + g_root + "/nope.json --tree " + tree + " --out-dir " +
                g_root + "/sx");
    check(miss.exit_code == 2, "missing instance file exits with code 2");
}

void test_roll() {
    const std::string inst = g_root + "/inst.json";
    const std::string tree = g_root + "/tree.json";

    const RunResult r = run_cli("--out-dir " + g_root + "/rh roll --instance " + inst +
                                " --tree " + tree + " -W 1");
    check(r.exit_code == 0, "roll exits cleanly");
    const json j = load_json(g_root + "/rh/roll_report.json");
    check(!j["failed"].get<bool>(), "roll reports success");
    check(!j["z_rh"]["neg_infinity"].get<bool>(), "roll profit is finite");
    const double zrh = j["z_rh"]["value"].get<double>();
    const double rp = j["baseline"]["rp"].get<double>();
    check(zrh <= rp + 1e-6, "truncated profit never beats the baseline");
    check(j["steps"].size() == 2, "one step per decision stage");
    check(fs::exists(g_root + "/rh/rh_plan.json"), "roll writes its plan");

    // worst-case family: one-stage lookahead must fail while the report
    // still comes back (exit 1 marks the anomaly)
    const WorstCase wc = worst_case_instance(2, 5, {0.5, 0.5}, {0.1, 0.1});
    const std::string winst = g_root + "/worst_inst.json";
    const std::string wtree = g_root + "/worst_tree.json";
    save_instance(wc.instance, winst);
    save_tree(wc.tree, wtree);
    const RunResult rw = run_cli("--out-dir " + g_root + "/rhw roll --instance " + winst +
                                 " --tree " + wtree + " -W 1 --baseline-profit 1.0");
    check(rw.exit_code == 1, "trap instance exits with the report code");
    const json jw = load_json(g_root + "/rhw/roll_report.json");
    check(jw["z_rh"]["neg_infinity"].get<bool>(), "trap profit is minus infinity");

    const RunResult rbad = run_cli("--out-dir " + g_root + "/rhx roll --instance " + inst +
                                   " --tree " + tree + " -W 5");
    check(rbad.exit_code == 2, "out-of-range window exits with code 2");
}

void test_measures() {
    const std::string inst = g_root + "/inst.json";
    const std::string tree = g_root + "/tree.json";

    const RunResult r = run_cli("--out-dir " + g_root + "/me measures --instance " + inst +
                                " --tree " + tree);
    check(r.exit_code == 0, "measures exits cleanly on a benign instance");
    const json j = load_json(g_root + "/me/measures_report.json");
    check(j["percentages_valid"].get<bool>(), "profitable instance yields percentages");
    check(j["rp"].get<double>() > 0.0, "recourse optimum is positive");
    check(!j["evpi_pct"]["infinite"].get<bool>() &&
              j["evpi_pct"]["value"].get<double>() >= -1e-9,
          "EVPI percentage is finite and nonnegative");
}

void test_batch() {
    const std::string minst = g_root + "/master_inst.json";
    const std::string mtree = g_root + "/master_tree.json";
    write_pair(minst, mtree, 4, 1400);
    const std::string bdir = g_root + "/batch";

    for (int draw = 1; draw <= 2; ++draw) {
        const RunResult r = run_cli("--seed 3 --out-dir " + bdir +
                                    " draw-instance --master " + minst + " --master-tree " +
                                    mtree + " --bins 2 --draw " + std::to_string(draw));
        check(r.exit_code == 0, "draw-instance " + std::to_string(draw) + " exits cleanly");
    }
    check(fs::exists(bdir + "/inst_1_2.json") && fs::exists(bdir + "/tree_1_2.json") &&
              fs::exists(bdir + "/inst_2_2.json") && fs::exists(bdir + "/tree_2_2.json"),
          "draw-instance writes named pairs");
    const Instance sub = load_instance(bdir + "/inst_1_2.json");
    check(sub.num_bins() == 2 && load_tree(bdir + "/tree_1_2.json").num_bins() == 2,
          "drawn pair restricts to the requested bins");

    const RunResult r = run_cli("--out-dir " + g_root + "/mb measures --batch " + bdir);
    check(r.exit_code == 0, "batch measures exits cleanly");
    check(fs::exists(g_root + "/mb/measures_report_1_2.json") &&
              fs::exists(g_root + "/mb/measures_report_2_2.json"),
          "batch writes one report per draw");
    const std::string csv = slurp(g_root + "/mb/measures_summary.csv");
    check(csv.rfind("bins,draws,measure,t,", 0) == 0, "summary csv carries the header");
    check(csv.find("\n2,2,rp,") != std::string::npos, "summary aggregates the size class");
}

void test_stability() {
    const std::string hist = g_root + "/history.csv";
    const std::string inst2 = g_root + "/stab_inst.json";
    save_instance(testsup::make_instance(2, 2, 1600, {.fill_scale = 0.2}), inst2);

    const RunResult r = run_cli("--seed 11 --out-dir " + g_root +
                                "/st stability --history " + hist + " --instance " + inst2 +
                                " --structures 1x2,1x3 --runs 2 --iterations 500");
    check(r.exit_code == 0, "stability exits cleanly");
    const std::string csv = slurp(g_root + "/st/stability.csv");
    check(csv.rfind("structure,scenarios,runs,failures,", 0) == 0,
          "stability csv carries the header");
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    check(lines == 3, "one row per structure plus the header");
    check(csv.find("1x2,2,2,0,") != std::string::npos, "all fits and solves succeed");
}

void test_export_mps() {
    const std::string inst = g_root + "/inst.json";
    const std::string tree = g_root + "/tree.json";

    const RunResult r = run_cli("--out-dir " + g_root + "/mx export-mps --instance " + inst +
                                " --tree " + tree + " --out model.mps");
    check(r.exit_code == 0, "export-mps exits cleanly");
    const std::string mps = slurp(g_root + "/mx/model.mps");
    check(mps.find("OBJSENSE") != std::string::npos &&
              mps.find("ROWS") != std::string::npos &&
              mps.find("BOUNDS") != std::string::npos,
          "mps file carries the expected sections");

    // solve the same model in-process and feed the assignment back in
    const Instance inst_mem = load_instance(inst);
    const ScenarioTree tree_mem = load_tree(tree);
    const MilpProblem model =
        build_model(inst_mem, TreeView::full(tree_mem), ModelVariant::M);
    const MilpSolution sol = solve_milp(model);
    check(sol.status == SolveStatus::Optimal, "in-process reference solve is optimal");
    const std::string sol_path = g_root + "/external.sol";
    {
        std::ofstream out(sol_path);
        out << "# external assignment\n";
        for (int jv = 0; jv < model.num_vars(); ++jv)
            out << model.var(jv).name << " " << std::setprecision(17)
                << sol.values[static_cast<std::size_t>(jv)] << "\n";
    }
    const RunResult rc = run_cli("--out-dir " + g_root + "/mc export-mps --instance " + inst +
                                 " --tree " + tree + " --out model.mps --check " + sol_path);
    check(rc.exit_code == 0, "external solution check exits cleanly");
    check(rc.output.find("external solution accepted") != std::string::npos,
          "external solution is accepted");
    check(fs::exists(g_root + "/mc/imported_plan.json"), "imported plan is written");
    const CollectionPlan plan = load_plan(g_root + "/mc/imported_plan.json");
    check(std::fabs(plan.totals.expected_profit - sol.objective) <= 1e-6,
          "imported plan reproduces the objective");
}

} // namespace

int main() {
    const char* cli = std::getenv("SIRP_CLI");
    if (cli == nullptr || *cli == '\0') {
        std::fprintf(stderr, "[FAIL] SIRP_CLI is not set; point it at the tool binary\n");
        return 1;
    }
    g_cli = cli;

    char tmpl[] = "/tmp/sirp_cli_XXXXXX";
    if (mkdtemp(tmpl) == nullptr) {
        std::fprintf(stderr, "[FAIL] cannot create a scratch directory\n");
        return 1;
    }
    g_root = tmpl;

    try {
        test_gen_tree();
        test_solve_variants();
        test_roll();
        test_measures();
        test_batch();
        test_stability();
        test_export_mps();
    } catch (const std::exception& e) {
        std::printf("[FAIL] unexpected exception: %s\n", e.what());
        ++g_failures;
    }

    std::error_code ec;
    fs::remove_all(g_root, ec);

    if (g_failures > 0) {
        std::printf("%d check(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all cli checks passed\n");
    return 0;
}
