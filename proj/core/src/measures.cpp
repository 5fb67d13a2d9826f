#include "sirp/measures.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sirp {

namespace {

using ordered_json = nlohmann::ordered_json;

struct SolveOutcome {
    bool infeasible = false;
    bool time_limited = false;
    bool no_incumbent = false;
    double objective = 0.0;
};

SolveOutcome run(const MilpProblem& p, const SolverConfig& cfg) {
    MilpSolution sol = solve_milp(p, cfg);
    SolveOutcome out;
    switch (sol.status) {
    case SolveStatus::Infeasible:
        out.infeasible = true;
        break;
    case SolveStatus::Unbounded:
        throw SolveError("measure subproblem is unbounded; the model is broken");
    case SolveStatus::TimeLimit:
        out.time_limited = true;
        out.no_incumbent = sol.values.empty();
        out.objective = sol.objective;
        break;
    default:
        out.objective = sol.objective;
    }
    return out;
}

// binary stage variables of the routing layer, shared by RP and EV models
std::vector<std::string> stage_binary_names(int t, int num_bins, ModelVariant variant) {
    const int V = variant == ModelVariant::M ? num_bins + 1 : num_bins + 2;
    std::vector<std::string> names;
    for (int i = 0; i < V; ++i)
        for (int j = 0; j < V; ++j)
            if (i != j) names.push_back(var_x(t, i, j));
    for (int i = 1; i <= num_bins; ++i) names.push_back(var_y(t, i));
    return names;
}

} // namespace

MeasureReport compute_measures(const Instance& inst, const ScenarioTree& tree,
                               const MeasureConfig& cfg) {
    const int T = tree.num_stages();
    const int N = inst.num_bins();
    if (tree.num_bins() != N) throw DataError("tree and instance disagree on the bin count");

    MeasureReport rep;
    rep.num_scenarios = static_cast<int>(tree.leaves().size());
    rep.horizon = T;
    rep.variant = to_string(cfg.variant);

    const MilpProblem rp_model = build_model(inst, TreeView::full(tree), cfg.variant);
    const SolveOutcome rp = run(rp_model, cfg.solver);
    if (rp.infeasible) throw SolveError("recourse problem is infeasible");
    if (rp.no_incumbent)
        throw SolveError("recourse problem hit the time limit without an incumbent");
    rep.rp = rp.objective;
    rep.rp_time_limited = rp.time_limited;

    // wait and see: one deterministic solve per scenario
    double ws_sum = 0.0;
    bool ws_tl = false;
    for (int leaf : tree.leaves()) {
        const ScenarioTree path = extract_scenario_path(tree, leaf);
        const SolveOutcome o = run(build_model(inst, TreeView::full(path), cfg.variant), cfg.solver);
        if (o.infeasible) {
            rep.notes.push_back("scenario through leaf " + std::to_string(leaf) +
                                " is infeasible; excluded from WS (no renormalization)");
            continue;
        }
        if (o.no_incumbent) {
            rep.notes.push_back("scenario through leaf " + std::to_string(leaf) +
                                " hit the time limit without an incumbent; excluded from WS");
            ws_tl = true;
            continue;
        }
        ws_tl = ws_tl || o.time_limited;
        ws_sum += tree.node(leaf).prob * o.objective;
    }
    rep.ws.value = ws_sum;
    rep.ws.time_limited = ws_tl;

    // expected-value problem on the stagewise-expected chain
    std::vector<std::vector<double>> mean_rates;
    for (int s = 1; s <= T; ++s) mean_rates.push_back(tree.expected_rates(s));
    const ScenarioTree ev_tree = make_chain_tree(N, mean_rates);
    const MilpProblem ev_model = build_model(inst, TreeView::full(ev_tree), cfg.variant);
    MilpSolution ev_sol = solve_milp(ev_model, cfg.solver);
    if (ev_sol.status == SolveStatus::Infeasible ||
        (ev_sol.status == SolveStatus::TimeLimit && ev_sol.values.empty())) {
        rep.ev.infinite = true;
        rep.ev.note = ev_sol.status == SolveStatus::Infeasible
                          ? "expected-value problem infeasible"
                          : "expected-value problem hit the time limit without an incumbent";
    } else {
        rep.ev.value = ev_sol.objective;
        rep.ev.time_limited = ev_sol.status == SolveStatus::TimeLimit;
    }

    for (int t = 1; t <= T - 1; ++t) {
        MeasureValue eev, messv, meiv;
        if (rep.ev.infinite) {
            eev.infinite = messv.infinite = meiv.infinite = true;
            eev.note = messv.note = meiv.note = "no EV solution to pin";
        } else {
            MilpProblem fixed = rp_model;   // EEV^t: EV decisions replayed verbatim
            MilpProblem skel = rp_model;    // MESSV^t: only the EV zeros pinned
            MilpProblem lower = rp_model;   // MEIV^t: EV decisions as lower bounds
            for (int s = 1; s <= t; ++s)
                for (const std::string& name : stage_binary_names(s, N, cfg.variant)) {
                    const int je = ev_model.var_index(name);
                    const int jr = rp_model.var_index(name);
                    if (je < 0 || jr < 0)
                        throw SolveError("stage variable " + name +
                                         " missing from a measure model");
                    const double bar =
                        ev_sol.values[static_cast<std::size_t>(je)] > 0.5 ? 1.0 : 0.0;
                    fixed.var(jr).lower = fixed.var(jr).upper = bar;
                    if (bar == 0.0) skel.var(jr).lower = skel.var(jr).upper = 0.0;
                    lower.var(jr).lower = bar;
                }
            const std::string tag = "^" + std::to_string(t);
            auto fill = [&](MeasureValue& mv, const MilpProblem& p, const std::string& what) {
                const SolveOutcome o = run(p, cfg.solver);
                if (o.infeasible || o.no_incumbent) {
                    mv.infinite = true;
                    mv.note = what + tag + (o.infeasible ? " infeasible" : " timed out empty");
                } else {
                    mv.value = o.objective;
                    mv.time_limited = o.time_limited;
                }
            };
            fill(eev, fixed, "EEV");
            fill(messv, skel, "MESSV");
            fill(meiv, lower, "MEIV");
        }
        rep.eev.push_back(eev);
        rep.messv.push_back(messv);
        rep.meiv.push_back(meiv);
    }

    rep.percentages_valid = rep.rp > 0.0;
    if (!rep.percentages_valid)
        rep.notes.push_back("RP is not positive; percentage measures suppressed, "
                            "absolute values only");
    auto pct_gain = [&](const MeasureValue& hi, double lo) {
        MeasureValue v;
        if (hi.infinite) {
            v.infinite = true;
        } else {
            v.value = 100.0 * (hi.value - lo) / rep.rp;
            v.time_limited = hi.time_limited;
        }
        return v;
    };
    auto pct_loss = [&](const MeasureValue& low) {
        MeasureValue v;
        if (low.infinite) {
            v.infinite = true;
        } else {
            v.value = 100.0 * (rep.rp - low.value) / rep.rp;
            v.time_limited = low.time_limited;
        }
        return v;
    };
    if (rep.percentages_valid) {
        rep.evpi_pct = pct_gain(rep.ws, rep.rp);
        for (int t = 0; t < T - 1; ++t) {
            rep.vss_pct.push_back(pct_loss(rep.eev[static_cast<std::size_t>(t)]));
            rep.mluss_pct.push_back(pct_loss(rep.messv[static_cast<std::size_t>(t)]));
            rep.mluds_pct.push_back(pct_loss(rep.meiv[static_cast<std::size_t>(t)]));
        }
    }
    return rep;
}

std::string format_measure(const MeasureValue& v, int precision) {
    if (v.infinite) return "∞";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v.value);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (v.time_limited) s += "*";
    return s;
}

std::string format_measure_report(const MeasureReport& rep) {
    std::ostringstream out;
    out << "scenarios " << rep.num_scenarios << ", horizon " << rep.horizon << ", variant "
        << rep.variant << "\n";
    MeasureValue rv;
    rv.value = rep.rp;
    rv.time_limited = rep.rp_time_limited;
    out << "RP  = " << format_measure(rv) << "\n";
    out << "WS  = " << format_measure(rep.ws);
    if (rep.percentages_valid) out << "   %EVPI = " << format_measure(rep.evpi_pct);
    out << "\n";
    out << "EV  = " << format_measure(rep.ev) << "\n";
    const int rows = static_cast<int>(rep.eev.size());
    out << "t | EEV^t";
    if (rep.percentages_valid) out << " %VSS^t";
    out << " | MESSV^t";
    if (rep.percentages_valid) out << " %MLUSS^t";
    out << " | MEIV^t";
    if (rep.percentages_valid) out << " %MLUDS^t";
    out << "\n";
    for (int t = 0; t < rows; ++t) {
        const std::size_t ts = static_cast<std::size_t>(t);
        out << (t + 1) << " | " << format_measure(rep.eev[ts]);
        if (rep.percentages_valid) out << " " << format_measure(rep.vss_pct[ts]);
        out << " | " << format_measure(rep.messv[ts]);
        if (rep.percentages_valid) out << " " << format_measure(rep.mluss_pct[ts]);
        out << " | " << format_measure(rep.meiv[ts]);
        if (rep.percentages_valid) out << " " << format_measure(rep.mluds_pct[ts]);
        out << "\n";
    }
    for (const std::string& n : rep.notes) out << "note: " << n << "\n";
    return out.str();
}

bool has_anomalies(const MeasureReport& rep) {
    auto bad = [](const MeasureValue& v) { return v.infinite || v.time_limited; };
    if (rep.rp_time_limited || bad(rep.ws) || bad(rep.ev)) return true;
    for (const auto& v : rep.eev)
        if (bad(v)) return true;
    for (const auto& v : rep.messv)
        if (bad(v)) return true;
    for (const auto& v : rep.meiv)
        if (bad(v)) return true;
    return !rep.notes.empty();
}

namespace {

ordered_json mv_json(const MeasureValue& v) {
    ordered_json j;
    j["infinite"] = v.infinite;
    if (!v.infinite) j["value"] = v.value;
    j["time_limited"] = v.time_limited;
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

} // namespace

void save_measure_report(const MeasureReport& rep, const std::string& path) {
    ordered_json j;
    j["schema_version"] = 1;
    j["num_scenarios"] = rep.num_scenarios;
    j["horizon"] = rep.horizon;
    j["variant"] = rep.variant;
    j["rp"] = rep.rp;
    j["rp_time_limited"] = rep.rp_time_limited;
    j["ws"] = mv_json(rep.ws);
    j["ev"] = mv_json(rep.ev);
    j["percentages_valid"] = rep.percentages_valid;
    if (rep.percentages_valid) j["evpi_pct"] = mv_json(rep.evpi_pct);
    j["rows"] = ordered_json::array();
    for (std::size_t t = 0; t < rep.eev.size(); ++t) {
        ordered_json row;
        row["t"] = static_cast<int>(t) + 1;
        row["eev"] = mv_json(rep.eev[t]);
        row["messv"] = mv_json(rep.messv[t]);
        row["meiv"] = mv_json(rep.meiv[t]);
        if (rep.percentages_valid) {
            row["vss_pct"] = mv_json(rep.vss_pct[t]);
            row["mluss_pct"] = mv_json(rep.mluss_pct[t]);
            row["mluds_pct"] = mv_json(rep.mluds_pct[t]);
        }
        j["rows"].push_back(std::move(row));
    }
    j["notes"] = rep.notes;
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write measure report " + path);
    out << j.dump(2) << "\n";
}

} // namespace sirp
