#pragma once

#include <string>
#include <vector>

#include "sirp/instance.hpp"
#include "sirp/milp.hpp"
#include "sirp/model_build.hpp"
#include "sirp/scenario_tree.hpp"

namespace sirp {

// One derived quantity of the measure suite. Comparison problems can be
// infeasible (fixing first-stage decisions may wreck recourse); that is
// reported as an explicit infinity, rendered as the UTF-8 infinity sign.
struct MeasureValue {
    bool infinite = false;
    double value = 0.0;
    bool time_limited = false;
    std::string note;
};

struct MeasureReport {
    int num_scenarios = 0;
    int horizon = 0;
    std::string variant = "M";

    double rp = 0.0;           // recourse problem optimum
    bool rp_time_limited = false;
    MeasureValue ws;           // wait-and-see value
    MeasureValue ev;           // expected-value problem optimum (chain tree)

    // index t-1 holds the stage-t row, t = 1..T-1
    std::vector<MeasureValue> eev;   // expected result of the EV solution
    std::vector<MeasureValue> messv; // skeleton-solution value (EV zeros pinned)
    std::vector<MeasureValue> meiv;  // input value (EV solution as lower bound)

    // percentages relative to RP; only meaningful for RP > 0
    bool percentages_valid = false;
    MeasureValue evpi_pct;
    std::vector<MeasureValue> vss_pct;
    std::vector<MeasureValue> mluss_pct;
    std::vector<MeasureValue> mluds_pct;

    std::vector<std::string> notes; // excluded scenarios and similar events
};

struct MeasureConfig {
    ModelVariant variant = ModelVariant::M;
    SolverConfig solver;
};

// Full suite: RP, WS over per-scenario solves (infeasible scenarios are
// excluded with a note, probabilities are not renormalized), the EV chain
// problem, and the stagewise comparison values EEV^t / MESSV^t / MEIV^t
// obtained by pinning the rounded EV-solution binaries of stages <= t
// (exactly / only the zeros / as lower bounds). Throws SolveError when
// the recourse problem itself is infeasible.
MeasureReport compute_measures(const Instance& inst, const ScenarioTree& tree,
                               const MeasureConfig& cfg = {});

// "123.456" or the infinity sign; notes are not included.
std::string format_measure(const MeasureValue& v, int precision = 4);

// Human-readable table for terminal output.
std::string format_measure_report(const MeasureReport& rep);

// True when any entry is infinite, a solve hit its time limit, or
// scenarios had to be excluded — the conditions under which a caller
// should flag the report.
bool has_anomalies(const MeasureReport& rep);

void save_measure_report(const MeasureReport& rep, const std::string& path);

} // namespace sirp
