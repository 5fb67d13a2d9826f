#include "sirp/model_build.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sirp/common.hpp"

namespace sirp {

ModelVariant parse_variant(const std::string& text) {
    if (text == "M" || text == "m") return ModelVariant::M;
    if (text == "Msym" || text == "msym" || text == "MSYM") return ModelVariant::Msym;
    throw DataError("unknown model variant '" + text + "' (expected M or Msym)");
}

const char* to_string(ModelVariant v) {
    return v == ModelVariant::M ? "M" : "Msym";
}

TreeView TreeView::full(const ScenarioTree& tree) {
    TreeView v;
    v.tree = &tree;
    v.stages.reserve(tree.num_stages());
    for (int s = 1; s <= tree.num_stages(); ++s) v.stages.push_back(tree.stage_nodes(s));
    return v;
}

TreeView TreeView::span(const ScenarioTree& tree, int first_stage, int last_stage) {
    if (first_stage < 1 || last_stage > tree.num_stages() || first_stage >= last_stage)
        throw BuildError("invalid stage span [" + std::to_string(first_stage) + "," +
                         std::to_string(last_stage) + "] for a tree with " +
                         std::to_string(tree.num_stages()) + " stages");
    TreeView v;
    v.tree = &tree;
    for (int s = first_stage; s <= last_stage; ++s) v.stages.push_back(tree.stage_nodes(s));
    return v;
}

std::string var_x(int t, int i, int j) {
    return "x_" + std::to_string(t) + "_" + std::to_string(i) + "_" + std::to_string(j);
}
std::string var_y(int t, int i) { return "y_" + std::to_string(t) + "_" + std::to_string(i); }
std::string var_f(int node, int i, int j) {
    return "f_" + std::to_string(node) + "_" + std::to_string(i) + "_" + std::to_string(j);
}
std::string var_w(int node, int i) { return "w_" + std::to_string(node) + "_" + std::to_string(i); }
std::string var_u(int node, int i) { return "u_" + std::to_string(node) + "_" + std::to_string(i); }

namespace {

std::string itos(int v) { return std::to_string(v); }

struct NodeRef {
    int id = -1;
    int vstage = 1; // 1-based view stage
    int parent = -1; // original node id; -1 for view roots
};

struct ViewCtx {
    const ScenarioTree* tree = nullptr;
    int num_bins = 0;
    std::vector<NodeRef> roots;
    std::vector<NodeRef> later; // view stage >= 2, tree order
    std::vector<std::vector<double>> root_u; // kg, aligned with roots

    int num_decision_stages() const {
        int last = 1;
        for (const NodeRef& n : later) last = std::max(last, n.vstage);
        return last - 1;
    }
};

// dense variable indices; name lookups are too slow to build the large
// instances inside the size budget
struct VarIndex {
    int V = 0; // routing vertices: N+1 (asymmetric) or N+2 (copy depot)
    std::vector<std::vector<int>> x; // [t-1][i*V+j]
    std::vector<std::vector<int>> y; // [t-1][i-1]
    std::vector<std::vector<int>> f; // [node][i*V+j], -1 where absent
    std::vector<std::vector<int>> w; // [node][i-1]
    std::vector<std::vector<int>> u; // [node][i-1]

    int xi(int t, int i, int j) const {
        return x[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(i * V + j)];
    }
    int yi(int t, int i) const {
        return y[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(i - 1)];
    }
    int fi(int node, int i, int j) const {
        return f[static_cast<std::size_t>(node)][static_cast<std::size_t>(i * V + j)];
    }
    int wi(int node, int i) const {
        return w[static_cast<std::size_t>(node)][static_cast<std::size_t>(i - 1)];
    }
    int ui(int node, int i) const {
        return u[static_cast<std::size_t>(node)][static_cast<std::size_t>(i - 1)];
    }
};

ViewCtx check_view(const Instance& inst, const TreeView& view) {
    if (view.tree == nullptr) throw BuildError("tree view is not bound to a tree");
    const ScenarioTree& tree = *view.tree;
    if (tree.num_bins() != static_cast<int>(inst.bins.size()))
        throw BuildError("tree carries " + itos(tree.num_bins()) + " bins but instance has " +
                         itos(static_cast<int>(inst.bins.size())));
    const int S = view.num_stages();
    if (S < 2) throw BuildError("tree view must span at least two stages");

    ViewCtx ctx;
    ctx.tree = &tree;
    ctx.num_bins = static_cast<int>(inst.bins.size());
    std::unordered_map<int, int> vstage_of;
    for (int s = 0; s < S; ++s) {
        if (view.stages[s].empty()) throw BuildError("tree view has an empty stage layer");
        for (int id : view.stages[s]) {
            const TreeNode& nd = tree.node(id);
            if (!vstage_of.emplace(id, s + 1).second)
                throw BuildError("node " + itos(id) + " appears twice in the tree view");
            NodeRef ref;
            ref.id = id;
            ref.vstage = s + 1;
            if (s == 0) {
                ref.parent = -1;
                ctx.roots.push_back(ref);
            } else {
                auto it = vstage_of.find(nd.parent);
                if (it == vstage_of.end() || it->second != s)
                    throw BuildError("node " + itos(id) + " has parent " + itos(nd.parent) +
                                     " outside the previous view stage");
                ref.parent = nd.parent;
                ctx.later.push_back(ref);
            }
        }
    }

    const int nroots = static_cast<int>(ctx.roots.size());
    if (!view.root_inventory_kg.empty()) {
        if (static_cast<int>(view.root_inventory_kg.size()) != nroots)
            throw BuildError("root inventory override has " +
                             itos(static_cast<int>(view.root_inventory_kg.size())) +
                             " entries for " + itos(nroots) + " view roots");
        for (const auto& row : view.root_inventory_kg) {
            if (static_cast<int>(row.size()) != ctx.num_bins)
                throw BuildError("root inventory override row has wrong bin count");
            for (double v : row)
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw BuildError("root inventory override must be finite and nonnegative");
        }
        ctx.root_u = view.root_inventory_kg;
    } else {
        ctx.root_u.assign(static_cast<std::size_t>(nroots),
                          std::vector<double>(static_cast<std::size_t>(ctx.num_bins), 0.0));
        for (int r = 0; r < nroots; ++r)
            for (int i = 0; i < ctx.num_bins; ++i)
                ctx.root_u[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] =
                    inst.bins[static_cast<std::size_t>(i)].capacity_kg *
                    inst.bins[static_cast<std::size_t>(i)].initial_fill;
    }
    return ctx;
}

// w and u columns plus the state recursion shared by both formulations:
// root inventories pinned, recursion u_n = u_pa + E*B*a - w_n, collection
// gated by the previous-stage visit variable, post-visit emptiness, and
// the no-overflow cap on the parent inventory.
void add_state_block(MilpProblem& p, const Instance& inst, const ViewCtx& ctx, VarIndex& vi) {
    const int N = ctx.num_bins;
    const double bigm = inst.params.big_m;
    const double revenue = inst.params.selling_price_per_kg;

    vi.w.assign(static_cast<std::size_t>(ctx.tree->num_nodes()), {});
    vi.u.assign(static_cast<std::size_t>(ctx.tree->num_nodes()), {});
    for (const NodeRef& nd : ctx.roots) {
        auto& urow = vi.u[static_cast<std::size_t>(nd.id)];
        urow.assign(static_cast<std::size_t>(N), -1);
        for (int i = 1; i <= N; ++i)
            urow[static_cast<std::size_t>(i - 1)] = p.add_var(var_u(nd.id, i), 0.0, kInf, 0.0, false);
    }
    for (const NodeRef& nd : ctx.later) {
        const double prob = ctx.tree->node(nd.id).prob;
        auto& wrow = vi.w[static_cast<std::size_t>(nd.id)];
        auto& urow = vi.u[static_cast<std::size_t>(nd.id)];
        wrow.assign(static_cast<std::size_t>(N), -1);
        urow.assign(static_cast<std::size_t>(N), -1);
        for (int i = 1; i <= N; ++i) {
            const double cap_kg = inst.bins[static_cast<std::size_t>(i - 1)].capacity_kg;
            wrow[static_cast<std::size_t>(i - 1)] =
                p.add_var(var_w(nd.id, i), 0.0, cap_kg, revenue * prob, false);
            urow[static_cast<std::size_t>(i - 1)] = p.add_var(var_u(nd.id, i), 0.0, kInf, 0.0, false);
        }
    }

    for (int r = 0; r < static_cast<int>(ctx.roots.size()); ++r) {
        const int node = ctx.roots[static_cast<std::size_t>(r)].id;
        for (int i = 1; i <= N; ++i) {
            int row = p.add_row("ui_" + itos(node) + "_" + itos(i), Sense::Equal,
                                ctx.root_u[static_cast<std::size_t>(r)][static_cast<std::size_t>(i - 1)]);
            p.add_term(row, vi.ui(node, i), 1.0);
        }
    }

    for (const NodeRef& nd : ctx.later) {
        const int t = nd.vstage - 1;
        const std::vector<double>& rates = ctx.tree->node(nd.id).rates;
        for (int i = 1; i <= N; ++i) {
            const double cap_kg = inst.bins[static_cast<std::size_t>(i - 1)].capacity_kg;
            const double arrival = cap_kg * rates[static_cast<std::size_t>(i - 1)];

            int row = p.add_row("wub_" + itos(nd.id) + "_" + itos(i), Sense::LessEqual, 0.0);
            p.add_term(row, vi.wi(nd.id, i), 1.0);
            p.add_term(row, vi.yi(t, i), -cap_kg);

            // u_n <= M (1 - y): a visited bin must be left empty. The state
            // recursion keeps u_n <= E_i B, so the big constant can be
            // clipped to the bin capacity without cutting anything off --
            // much kinder on the LP basis than a raw 1e5.
            const double mi = std::min(bigm, cap_kg);
            row = p.add_row("uz_" + itos(nd.id) + "_" + itos(i), Sense::LessEqual, mi);
            p.add_term(row, vi.ui(nd.id, i), 1.0);
            p.add_term(row, vi.yi(t, i), mi);

            row = p.add_row("ur_" + itos(nd.id) + "_" + itos(i), Sense::Equal, arrival);
            p.add_term(row, vi.ui(nd.id, i), 1.0);
            p.add_term(row, vi.ui(nd.parent, i), -1.0);
            p.add_term(row, vi.wi(nd.id, i), 1.0);

            // no overflow: what sat in the bin must leave room for the arrival
            row = p.add_row("uc_" + itos(nd.id) + "_" + itos(i), Sense::LessEqual,
                            (1.0 - rates[static_cast<std::size_t>(i - 1)]) * cap_kg);
            p.add_term(row, vi.ui(nd.parent, i), 1.0);
        }
    }
}

} // namespace

MilpProblem build_model_M(const Instance& inst, const TreeView& view) {
    const ViewCtx ctx = check_view(inst, view);
    const int N = ctx.num_bins;
    const int T1 = ctx.num_decision_stages();
    const double Q = inst.params.vehicle_capacity_kg;
    const double C = inst.params.travel_cost_per_km;
    const double bigm = inst.params.big_m;
    const DistanceMatrix& d = inst.distances;

    MilpProblem p;
    p.name = "model_M";

    VarIndex vi;
    vi.V = N + 1;

    // routing binaries, one layer per decision stage
    for (int t = 1; t <= T1; ++t) {
        std::vector<int> xrow(static_cast<std::size_t>(vi.V) * vi.V, -1);
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j) {
                if (i == j) continue;
                xrow[static_cast<std::size_t>(i * vi.V + j)] =
                    p.add_var(var_x(t, i, j), 0.0, 1.0, -C * d.at(i, j), true);
            }
        vi.x.push_back(std::move(xrow));
        std::vector<int> yrow(static_cast<std::size_t>(N), -1);
        for (int i = 1; i <= N; ++i)
            yrow[static_cast<std::size_t>(i - 1)] = p.add_var(var_y(t, i), 0.0, 1.0, 0.0, true);
        vi.y.push_back(std::move(yrow));
    }

    // loads: full arc set per non-root node; outgoing depot flow is kept
    // as fixed-at-zero columns
    vi.f.assign(static_cast<std::size_t>(ctx.tree->num_nodes()), {});
    for (const NodeRef& nd : ctx.later) {
        auto& frow = vi.f[static_cast<std::size_t>(nd.id)];
        frow.assign(static_cast<std::size_t>(vi.V) * vi.V, -1);
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j) {
                if (i == j) continue;
                const double up = (i == 0) ? 0.0 : Q;
                frow[static_cast<std::size_t>(i * vi.V + j)] =
                    p.add_var(var_f(nd.id, i, j), 0.0, up, 0.0, false);
            }
    }

    add_state_block(p, inst, ctx, vi);

    // degree structure, one block per decision stage
    for (int t = 1; t <= T1; ++t) {
        for (int i = 1; i <= N; ++i) {
            int row = p.add_row("out_" + itos(t) + "_" + itos(i), Sense::Equal, 0.0);
            for (int j = 0; j <= N; ++j)
                if (j != i) p.add_term(row, vi.xi(t, i, j), 1.0);
            p.add_term(row, vi.yi(t, i), -1.0);
        }
        for (int j = 1; j <= N; ++j) {
            int row = p.add_row("in_" + itos(t) + "_" + itos(j), Sense::Equal, 0.0);
            for (int i = 0; i <= N; ++i)
                if (i != j) p.add_term(row, vi.xi(t, i, j), 1.0);
            p.add_term(row, vi.yi(t, j), -1.0);
        }
        int row = p.add_row("veh_" + itos(t), Sense::Equal, 0.0);
        for (int i = 1; i <= N; ++i) {
            p.add_term(row, vi.xi(t, i, 0), 1.0);
            p.add_term(row, vi.xi(t, 0, i), -1.0);
        }
    }

    // per-node flow rows
    for (const NodeRef& nd : ctx.later) {
        const int t = nd.vstage - 1;
        const std::vector<double>& rates = ctx.tree->node(nd.id).rates;

        for (int i = 1; i <= N; ++i) {
            int row = p.add_row("bal_" + itos(nd.id) + "_" + itos(i), Sense::Equal, 0.0);
            for (int j = 0; j <= N; ++j) {
                if (j == i) continue;
                p.add_term(row, vi.fi(nd.id, i, j), 1.0);
                p.add_term(row, vi.fi(nd.id, j, i), -1.0);
            }
            p.add_term(row, vi.wi(nd.id, i), -1.0);
        }

        for (int i = 1; i <= N; ++i)
            for (int j = 1; j <= N; ++j) {
                if (i == j) continue;
                const double room =
                    Q - inst.bins[static_cast<std::size_t>(j - 1)].capacity_kg *
                            rates[static_cast<std::size_t>(j - 1)];
                int row = p.add_row("cap_" + itos(nd.id) + "_" + itos(i) + "_" + itos(j),
                                    Sense::LessEqual, 0.0);
                p.add_term(row, vi.fi(nd.id, i, j), 1.0);
                p.add_term(row, vi.xi(t, i, j), -room);
            }

        for (int i = 1; i <= N; ++i) {
            int row = p.add_row("dep_" + itos(nd.id) + "_" + itos(i), Sense::LessEqual, 0.0);
            p.add_term(row, vi.fi(nd.id, i, 0), 1.0);
            p.add_term(row, vi.xi(t, i, 0), -Q);
        }

        for (int i = 1; i <= N; ++i)
            for (int j = 1; j <= N; ++j) {
                if (i == j) continue;
                int row = p.add_row("lnk_" + itos(nd.id) + "_" + itos(i) + "_" + itos(j),
                                    Sense::LessEqual, Q);
                p.add_term(row, vi.fi(nd.id, i, j), 1.0);
                p.add_term(row, vi.wi(nd.id, j), 1.0);
            }

        // f_ij >= w_i - M (1 - x_ij): a served bin's load is on board when
        // the vehicle drives away over arc (i,j); w_i <= E_i B so the
        // constant clips to the bin capacity
        for (int i = 1; i <= N; ++i) {
            const double mi =
                std::min(bigm, inst.bins[static_cast<std::size_t>(i - 1)].capacity_kg);
            for (int j = 0; j <= N; ++j) {
                if (i == j) continue;
                int row = p.add_row("low_" + itos(nd.id) + "_" + itos(i) + "_" + itos(j),
                                    Sense::GreaterEqual, -mi);
                p.add_term(row, vi.fi(nd.id, i, j), 1.0);
                p.add_term(row, vi.wi(nd.id, i), -1.0);
                p.add_term(row, vi.xi(t, i, j), -mi);
            }
        }
    }

    return p;
}

MilpProblem build_model_Msym(const Instance& inst, const TreeView& view) {
    const ViewCtx ctx = check_view(inst, view);
    if (!inst.distances.is_symmetric())
        throw BuildError("the symmetric formulation needs a symmetric distance matrix "
                         "(asymmetry gap " + std::to_string(inst.distances.asymmetry_gap()) + ")");
    const int N = ctx.num_bins;
    const int T1 = ctx.num_decision_stages();
    const int D2 = N + 1; // copy depot closing every route
    const double Q = inst.params.vehicle_capacity_kg;
    const double C = inst.params.travel_cost_per_km;
    const DistanceMatrix& dm = inst.distances;
    auto dist = [&](int i, int j) {
        const int a = (i == D2) ? 0 : i;
        const int b = (j == D2) ? 0 : j;
        return dm.at(a, b);
    };

    MilpProblem p;
    p.name = "model_Msym";

    VarIndex vi;
    vi.V = N + 2;

    // arc binaries over all ordered pairs of the N+2 vertices; the pairing
    // rows below force x_ij = x_ji, so each edge pays 2 * C/2 * d = C * d
    for (int t = 1; t <= T1; ++t) {
        std::vector<int> xrow(static_cast<std::size_t>(vi.V) * vi.V, -1);
        for (int i = 0; i <= D2; ++i)
            for (int j = 0; j <= D2; ++j) {
                if (i == j) continue;
                xrow[static_cast<std::size_t>(i * vi.V + j)] =
                    p.add_var(var_x(t, i, j), 0.0, 1.0, -0.5 * C * dist(i, j), true);
            }
        vi.x.push_back(std::move(xrow));
        std::vector<int> yrow(static_cast<std::size_t>(N), -1);
        for (int i = 1; i <= N; ++i)
            yrow[static_cast<std::size_t>(i - 1)] = p.add_var(var_y(t, i), 0.0, 1.0, 0.0, true);
        vi.y.push_back(std::move(yrow));
    }

    // paired flows: bins send to every other vertex, the copy depot sends
    // residual capacity back to the bins
    vi.f.assign(static_cast<std::size_t>(ctx.tree->num_nodes()), {});
    for (const NodeRef& nd : ctx.later) {
        auto& frow = vi.f[static_cast<std::size_t>(nd.id)];
        frow.assign(static_cast<std::size_t>(vi.V) * vi.V, -1);
        for (int i = 1; i <= N; ++i)
            for (int j = 0; j <= D2; ++j) {
                if (i == j) continue;
                frow[static_cast<std::size_t>(i * vi.V + j)] =
                    p.add_var(var_f(nd.id, i, j), 0.0, Q, 0.0, false);
            }
        for (int j = 1; j <= N; ++j)
            frow[static_cast<std::size_t>(D2 * vi.V + j)] =
                p.add_var(var_f(nd.id, D2, j), 0.0, Q, 0.0, false);
    }

    add_state_block(p, inst, ctx, vi);

    for (int t = 1; t <= T1; ++t)
        for (int j = 1; j <= N; ++j) {
            int row = p.add_row("deg_" + itos(t) + "_" + itos(j), Sense::Equal, 0.0);
            for (int i = 0; i <= D2; ++i)
                if (i != j) p.add_term(row, vi.xi(t, i, j), 1.0);
            p.add_term(row, vi.yi(t, j), -2.0);
        }

    for (const NodeRef& nd : ctx.later) {
        const int t = nd.vstage - 1;
        const std::vector<double>& rates = ctx.tree->node(nd.id).rates;

        // two-commodity balance: load plus residual capacity, hence the 2
        for (int i = 1; i <= N; ++i) {
            int row = p.add_row("bal_" + itos(nd.id) + "_" + itos(i), Sense::Equal, 0.0);
            for (int j = 0; j <= D2; ++j) {
                if (j == i) continue;
                p.add_term(row, vi.fi(nd.id, i, j), 1.0);
                const int rev = vi.fi(nd.id, j, i);
                if (rev >= 0) p.add_term(row, rev, -1.0);
            }
            p.add_term(row, vi.wi(nd.id, i), -2.0);
        }

        int row = p.add_row("arr_" + itos(nd.id), Sense::Equal, 0.0);
        for (int i = 1; i <= N; ++i) {
            p.add_term(row, vi.fi(nd.id, i, D2), 1.0);
            p.add_term(row, vi.wi(nd.id, i), -1.0);
        }

        // f_ij + f_ji = Q x_ij over every ordered vertex pair; pairs with
        // no flow variable at all pin the corresponding x to zero
        for (int i = 0; i <= D2; ++i)
            for (int j = 0; j <= D2; ++j) {
                if (i == j) continue;
                row = p.add_row("pair_" + itos(nd.id) + "_" + itos(i) + "_" + itos(j),
                                Sense::Equal, 0.0);
                const int fwd = vi.fi(nd.id, i, j);
                const int rev = vi.fi(nd.id, j, i);
                if (fwd >= 0) p.add_term(row, fwd, 1.0);
                if (rev >= 0) p.add_term(row, rev, 1.0);
                p.add_term(row, vi.xi(t, i, j), -Q);
            }

        for (int i = 1; i <= N; ++i)
            for (int j = 1; j <= N; ++j) {
                if (i == j) continue;
                const double room =
                    Q - inst.bins[static_cast<std::size_t>(j - 1)].capacity_kg *
                            rates[static_cast<std::size_t>(j - 1)];
                row = p.add_row("cap_" + itos(nd.id) + "_" + itos(i) + "_" + itos(j),
                                Sense::LessEqual, 0.0);
                p.add_term(row, vi.fi(nd.id, i, j), 1.0);
                p.add_term(row, vi.xi(t, i, j), -room);
            }
    }

    return p;
}

MilpProblem build_model(const Instance& inst, const TreeView& view, ModelVariant v) {
    return v == ModelVariant::M ? build_model_M(inst, view) : build_model_Msym(inst, view);
}

MilpProblem build_model_M(const Instance& inst, const ScenarioTree& tree) {
    return build_model_M(inst, TreeView::full(tree));
}
MilpProblem build_model_Msym(const Instance& inst, const ScenarioTree& tree) {
    return build_model_Msym(inst, TreeView::full(tree));
}

ModelSizes model_sizes(const MilpProblem& p) {
    ModelSizes s;
    for (int j = 0; j < p.num_vars(); ++j) {
        if (p.var(j).integer)
            ++s.binaries;
        else
            ++s.continuous;
    }
    for (int r = 0; r < p.num_rows(); ++r) {
        if (p.row(r).sense == Sense::Equal)
            ++s.equalities;
        else
            ++s.inequalities;
    }
    return s;
}

} // namespace sirp
