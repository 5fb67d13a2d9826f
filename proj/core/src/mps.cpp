#include "sirp/mps.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace sirp {

namespace {

std::string fmt12(double v) {
    char buf[40];
    for (int prec = 10; prec >= 3; --prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strlen(buf) <= 12) return buf;
    }
    return buf;
}

std::string pad8(const std::string& s) {
    std::string out = s;
    out.resize(8, ' ');
    return out;
}

// Deterministic 8-char names: keep originals that fit, otherwise
// <prefix>0000001 counted in declaration order.
std::vector<std::string> short_names(const std::vector<std::string>& orig,
                                     char prefix, bool& renamed) {
    std::unordered_set<std::string> taken;
    for (const std::string& s : orig)
        if (s.size() <= 8) taken.insert(s);

    std::vector<std::string> out;
    out.reserve(orig.size());
    long long counter = 0;
    for (const std::string& s : orig) {
        if (s.size() <= 8) {
            out.push_back(s);
            continue;
        }
        std::string cand;
        do {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%c%07lld", prefix, ++counter);
            cand = buf;
        } while (taken.count(cand));
        taken.insert(cand);
        out.push_back(cand);
        renamed = true;
    }
    return out;
}

} // namespace

void export_mps(const MilpProblem& p, const std::string& path) {
    std::vector<std::string> row_orig, col_orig;
    for (int r = 0; r < p.num_rows(); ++r) row_orig.push_back(p.row(r).name);
    for (int j = 0; j < p.num_vars(); ++j) col_orig.push_back(p.var(j).name);

    bool renamed = false;
    const std::vector<std::string> rname = short_names(row_orig, 'R', renamed);
    const std::vector<std::string> cname = short_names(col_orig, 'C', renamed);

    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path);

    out << "NAME          " << (p.name.size() <= 8 ? p.name : p.name.substr(0, 8))
        << "\n";
    out << "OBJSENSE\n    MAX\n";
    out << "ROWS\n";
    out << " N  OBJ\n";
    for (int r = 0; r < p.num_rows(); ++r) {
        char sense = 'L';
        if (p.row(r).sense == Sense::GreaterEqual) sense = 'G';
        if (p.row(r).sense == Sense::Equal) sense = 'E';
        out << " " << sense << "  " << rname[static_cast<std::size_t>(r)] << "\n";
    }

    // transpose the rows into per-column entry lists (declaration order)
    std::vector<std::vector<std::pair<int, double>>> cols(
        static_cast<std::size_t>(p.num_vars()));
    for (int r = 0; r < p.num_rows(); ++r)
        for (const auto& [var, coef] : p.row(r).terms)
            cols[static_cast<std::size_t>(var)].emplace_back(r, coef);

    out << "COLUMNS\n";
    bool in_int = false;
    auto marker = [&out](int seq, const char* kind) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "M%07d", seq);
        out << "    " << pad8(buf) << "  " << pad8("'MARKER'") << "  "
            << "'" << kind << "'\n";
    };
    int marker_seq = 0;
    for (int j = 0; j < p.num_vars(); ++j) {
        const Variable& v = p.var(j);
        if (v.integer && !in_int) {
            marker(++marker_seq, "INTORG");
            in_int = true;
        } else if (!v.integer && in_int) {
            marker(++marker_seq, "INTEND");
            in_int = false;
        }
        const std::string& cn = cname[static_cast<std::size_t>(j)];
        if (p.obj_coef(j) != 0.0)
            out << "    " << pad8(cn) << "  " << pad8("OBJ") << "  "
                << fmt12(p.obj_coef(j)) << "\n";
        for (const auto& [r, coef] : cols[static_cast<std::size_t>(j)])
            out << "    " << pad8(cn) << "  "
                << pad8(rname[static_cast<std::size_t>(r)]) << "  " << fmt12(coef)
                << "\n";
    }
    if (in_int) marker(++marker_seq, "INTEND");

    out << "RHS\n";
    for (int r = 0; r < p.num_rows(); ++r)
        if (p.row(r).rhs != 0.0)
            out << "    " << pad8("RHS") << "  "
                << pad8(rname[static_cast<std::size_t>(r)]) << "  "
                << fmt12(p.row(r).rhs) << "\n";

    out << "BOUNDS\n";
    for (int j = 0; j < p.num_vars(); ++j) {
        const Variable& v = p.var(j);
        const std::string& cn = cname[static_cast<std::size_t>(j)];
        auto bound = [&](const char* kind, bool with_value, double value) {
            out << " " << kind << " " << pad8("BND") << "  " << pad8(cn);
            if (with_value) out << "  " << fmt12(value);
            out << "\n";
        };
        if (v.integer && v.lower == 0.0 && v.upper == 1.0) {
            bound("BV", false, 0.0);
            continue;
        }
        if (v.lower == v.upper) {
            bound("FX", true, v.lower);
            continue;
        }
        if (v.lower == -kInf && v.upper == kInf) {
            bound("FR", false, 0.0);
            continue;
        }
        if (v.lower == -kInf)
            bound("MI", false, 0.0);
        else if (v.lower != 0.0)
            bound(v.integer ? "LI" : "LO", true, v.lower);
        if (v.upper != kInf) bound(v.integer ? "UI" : "UP", true, v.upper);
    }
    out << "ENDATA\n";

    if (renamed) {
        std::ofstream map(path + ".names");
        if (!map) throw LoadError("cannot write " + path + ".names");
        for (int r = 0; r < p.num_rows(); ++r)
            if (rname[static_cast<std::size_t>(r)] != row_orig[static_cast<std::size_t>(r)])
                map << "row " << rname[static_cast<std::size_t>(r)] << " "
                    << row_orig[static_cast<std::size_t>(r)] << "\n";
        for (int j = 0; j < p.num_vars(); ++j)
            if (cname[static_cast<std::size_t>(j)] != col_orig[static_cast<std::size_t>(j)])
                map << "col " << cname[static_cast<std::size_t>(j)] << " "
                    << col_orig[static_cast<std::size_t>(j)] << "\n";
    }
}

MilpSolution import_solution(const std::string& path, const MilpProblem& p,
                             const std::string& name_map_path) {
    std::unordered_map<std::string, std::string> rename;
    if (!name_map_path.empty()) {
        std::ifstream map(name_map_path);
        if (!map) throw LoadError("cannot open name map " + name_map_path);
        std::string kind, from, to;
        while (map >> kind >> from >> to)
            if (kind == "col") rename[from] = to;
    }

    std::ifstream in(path);
    if (!in) throw LoadError("cannot open solution file " + path);

    std::vector<double> x(static_cast<std::size_t>(p.num_vars()), 0.0);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream row(line);
        std::string name;
        double value;
        if (!(row >> name)) continue; // blank
        if (!(row >> value))
            throw LoadError(path + ":" + std::to_string(lineno) + ": expected <name> <value>");
        auto it = rename.find(name);
        const std::string& resolved = it == rename.end() ? name : it->second;
        const int j = p.var_index(resolved);
        if (j < 0)
            throw LoadError(path + ":" + std::to_string(lineno) + ": unknown variable '" +
                            name + "'");
        x[static_cast<std::size_t>(j)] = value;
    }

    const std::vector<std::string> bad = check_solution(p, x, 1e-6, 1e-6);
    if (!bad.empty()) {
        std::string msg = path + ": imported solution infeasible:";
        for (std::size_t k = 0; k < bad.size() && k < 3; ++k) msg += " " + bad[k];
        if (bad.size() > 3) msg += " (+" + std::to_string(bad.size() - 3) + " more)";
        throw LoadError(msg);
    }

    MilpSolution sol;
    sol.status = SolveStatus::Feasible;
    sol.values = std::move(x);
    sol.objective = p.eval_objective(sol.values);
    sol.bound = sol.objective;
    return sol;
}

} // namespace sirp
