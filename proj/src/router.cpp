#include "qvm/router.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qvm/error.hpp"

namespace qvm {

namespace {

// Pairwise two-qubit gate counts and per-qubit totals for the layout pass.
struct InteractionModel {
    std::vector<std::map<int, int>> partners;  // logical -> (partner -> weight)
    std::vector<int> total;                    // logical -> summed weight

    explicit InteractionModel(const CircuitIR& circ) {
        partners.resize(static_cast<std::size_t>(circ.num_qubits));
        total.assign(static_cast<std::size_t>(circ.num_qubits), 0);
        for (const Gate& g : circ.gates) {
            if (!is_two_qubit(g.kind)) continue;
            int a = g.qubits[0];
            int b = g.qubits[1];
            partners[static_cast<std::size_t>(a)][b] += 1;
            partners[static_cast<std::size_t>(b)][a] += 1;
            total[static_cast<std::size_t>(a)] += 1;
            total[static_cast<std::size_t>(b)] += 1;
        }
    }
};

double placement_score(const HardwareGraph& g, int vertex, RouteMetric metric) {
    if (metric == RouteMetric::hops)
        return static_cast<double>(g.neighbors(vertex).size());
    return g.weighted_degree(vertex);
}

// Best free vertex overall: highest placement score, then lowest id.
int best_free_vertex(const HardwareGraph& g, const std::set<int>& free, RouteMetric metric) {
    int best = -1;
    double best_score = -1.0;
    for (int v : free) {
        double s = placement_score(g, v, metric);
        if (best < 0 || s > best_score) {
            best = v;
            best_score = s;
        }
    }
    return best;
}

// Free vertex as close as possible to anchor, preferring higher placement
// score and then lower id within the nearest ring.
int nearest_free_vertex(const HardwareGraph& g, int anchor, const std::set<int>& free,
                        RouteMetric metric) {
    if (free.count(anchor)) return anchor;
    std::set<int> seen = {anchor};
    std::vector<int> ring = {anchor};
    while (!ring.empty()) {
        std::vector<int> next;
        for (int v : ring)
            for (int w : g.neighbors(v))
                if (seen.insert(w).second) next.push_back(w);
        int best = -1;
        double best_score = -1.0;
        std::sort(next.begin(), next.end());
        for (int w : next) {
            if (!free.count(w)) continue;
            double s = placement_score(g, w, metric);
            if (best < 0 || s > best_score) {
                best = w;
                best_score = s;
            }
        }
        if (best >= 0) return best;
        ring = std::move(next);
    }
    return -1;
}

std::vector<int> automatic_layout(const CircuitIR& circ, const HardwareGraph& g,
                                  RouteMetric metric) {
    InteractionModel model(circ);
    std::size_t n = static_cast<std::size_t>(circ.num_qubits);
    std::vector<int> layout(n, -1);
    std::set<int> free(g.vertices().begin(), g.vertices().end());

    // Interacting qubits first, spread outward from the busiest one so that
    // hot pairs start adjacent. BFS order keeps the result reproducible.
    std::vector<int> queue;
    std::set<int> enqueued;
    auto seed_component = [&]() {
        int pick = -1;
        for (std::size_t l = 0; l < n; ++l) {
            if (layout[l] >= 0 || model.total[l] == 0) continue;
            if (pick < 0 || model.total[l] > model.total[static_cast<std::size_t>(pick)])
                pick = static_cast<int>(l);
        }
        if (pick >= 0) {
            layout[static_cast<std::size_t>(pick)] = best_free_vertex(g, free, metric);
            free.erase(layout[static_cast<std::size_t>(pick)]);
            queue.push_back(pick);
            enqueued.insert(pick);
        }
        return pick;
    };

    while (seed_component() >= 0) {
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int placed = queue[head];
            // Partners by descending interaction weight, index ties low first.
            std::vector<std::pair<int, int>> order;
            for (const auto& [partner, w] : model.partners[static_cast<std::size_t>(placed)])
                if (layout[static_cast<std::size_t>(partner)] < 0) order.push_back({-w, partner});
            std::sort(order.begin(), order.end());
            for (const auto& [neg_w, partner] : order) {
                if (layout[static_cast<std::size_t>(partner)] >= 0) continue;
                int spot = nearest_free_vertex(g, layout[static_cast<std::size_t>(placed)], free,
                                               metric);
                if (spot < 0) spot = best_free_vertex(g, free, metric);
                layout[static_cast<std::size_t>(partner)] = spot;
                free.erase(spot);
                if (enqueued.insert(partner).second) queue.push_back(partner);
            }
        }
        queue.clear();
    }

    // Idle qubits take the lowest remaining ids in index order.
    for (std::size_t l = 0; l < n; ++l) {
        if (layout[l] >= 0) continue;
        layout[l] = *free.begin();
        free.erase(free.begin());
    }
    return layout;
}

void validate_pinned_layout(const CircuitIR& circ, const HardwareGraph& g,
                            const std::vector<int>& pinned) {
    if (static_cast<int>(pinned.size()) != circ.num_qubits)
        throw ValidationError("initial_layout has " + std::to_string(pinned.size()) +
                              " entries for a " + std::to_string(circ.num_qubits) +
                              "-qubit circuit");
    std::set<int> seen;
    for (int v : pinned) {
        if (!g.has_vertex(v))
            throw ValidationError("initial_layout vertex " + std::to_string(v) +
                                  " is outside the footprint");
        if (!seen.insert(v).second)
            throw ValidationError("initial_layout repeats vertex " + std::to_string(v));
    }
}

}  // namespace

int circuit_depth(const std::vector<Gate>& gates) {
    std::map<int, int> level;
    int depth = 0;
    for (const Gate& g : gates) {
        int lv = 0;
        for (int q : g.qubits) {
            auto it = level.find(q);
            if (it != level.end()) lv = std::max(lv, it->second);
        }
        if (g.kind != GateKind::barrier) ++lv;
        for (int q : g.qubits) level[q] = lv;
        depth = std::max(depth, lv);
    }
    return depth;
}

std::vector<int> RoutedCircuit::active_vertices() const {
    std::set<int> active;
    for (const Gate& g : gates) active.insert(g.qubits.begin(), g.qubits.end());
    return {active.begin(), active.end()};
}

CircuitIR RoutedCircuit::dense_ir() const {
    std::vector<int> active = active_vertices();
    std::map<int, int> rank;
    for (std::size_t i = 0; i < active.size(); ++i) rank[active[i]] = static_cast<int>(i);

    CircuitIR out;
    out.name = name;
    out.num_qubits = std::max<int>(1, static_cast<int>(active.size()));
    out.num_clbits = num_clbits;
    out.gates.reserve(gates.size());
    for (const Gate& g : gates) {
        Gate d = g;
        for (int& q : d.qubits) q = rank.at(q);
        out.gates.push_back(std::move(d));
    }
    return out;
}

RoutedCircuit route(const CircuitIR& circ, const HardwareGraph& footprint_graph,
                    std::uint64_t seed, const RouterOptions& options) {
    (void)seed;
    const HardwareGraph& g = footprint_graph;
    if (circ.num_qubits < 1) throw ValidationError("cannot route an empty circuit");
    if (circ.num_qubits > static_cast<int>(g.num_vertices()))
        throw ValidationError("circuit '" + circ.name + "' needs " +
                              std::to_string(circ.num_qubits) + " qubits; footprint has " +
                              std::to_string(g.num_vertices()));
    for (const Gate& gate : circ.gates) {
        for (int q : gate.qubits)
            if (q < 0 || q >= circ.num_qubits)
                throw ValidationError("gate operand " + std::to_string(q) +
                                      " outside circuit width");
        if (is_two_qubit(gate.kind) && gate.qubits[0] == gate.qubits[1])
            throw ValidationError("two-qubit gate with duplicate operand");
    }

    std::vector<int> layout;
    if (!options.initial_layout.empty()) {
        validate_pinned_layout(circ, g, options.initial_layout);
        layout = options.initial_layout;
    } else {
        layout = automatic_layout(circ, g, options.metric);
    }

    RoutedCircuit out;
    out.name = circ.name;
    out.num_clbits = circ.num_clbits;
    out.footprint = g.vertices();
    out.initial_layout = layout;
    out.measure_map.assign(static_cast<std::size_t>(std::max(circ.num_clbits, 0)), -1);

    std::map<int, int> occupant;  // physical -> logical
    for (std::size_t l = 0; l < layout.size(); ++l) occupant[layout[l]] = static_cast<int>(l);

    auto apply_swap = [&](int p, int q) {
        Gate sw;
        sw.kind = GateKind::swap;
        sw.qubits = {p, q};
        out.gates.push_back(std::move(sw));
        out.swap_count += 1;
        int lp = occupant.count(p) ? occupant.at(p) : -1;
        int lq = occupant.count(q) ? occupant.at(q) : -1;
        if (lp >= 0) {
            occupant[q] = lp;
            layout[static_cast<std::size_t>(lp)] = q;
        } else {
            occupant.erase(q);
        }
        if (lq >= 0) {
            occupant[p] = lq;
            layout[static_cast<std::size_t>(lq)] = p;
        } else {
            occupant.erase(p);
        }
    };

    auto hop_distance = [&](int p, int q) {
        if (p == q) return 0;
        std::vector<int> path = g.shortest_path(p, q, false);
        return path.empty() ? 1 << 20 : static_cast<int>(path.size()) - 1;
    };

    for (std::size_t gi = 0; gi < circ.gates.size(); ++gi) {
        const Gate& gate = circ.gates[gi];
        if (!is_two_qubit(gate.kind)) {
            Gate placed = gate;
            for (int& q : placed.qubits) q = layout[static_cast<std::size_t>(q)];
            if (gate.kind == GateKind::measure)
                out.measure_map[static_cast<std::size_t>(gate.clbit)] = placed.qubits[0];
            out.gates.push_back(std::move(placed));
            continue;
        }

        int la = gate.qubits[0];
        int lb = gate.qubits[1];
        int pa = layout[static_cast<std::size_t>(la)];
        int pb = layout[static_cast<std::size_t>(lb)];
        if (!g.has_edge(pa, pb)) {
            std::vector<int> path = g.shortest_path(pa, pb, options.metric == RouteMetric::error);
            if (path.size() < 2)
                throw ValidationError("no route between vertices " + std::to_string(pa) +
                                      " and " + std::to_string(pb) + " inside the footprint");
            std::size_t k = path.size() - 1;

            // Either endpoint can travel; the chain costs the same SWAPs, so
            // look one two-qubit gate ahead and keep its operands close.
            bool move_first = true;
            for (std::size_t gj = gi + 1; gj < circ.gates.size(); ++gj) {
                const Gate& peek = circ.gates[gj];
                if (!is_two_qubit(peek.kind)) continue;
                bool touches = peek.qubits[0] == la || peek.qubits[1] == la ||
                               peek.qubits[0] == lb || peek.qubits[1] == lb;
                if (!touches) break;
                auto future_distance = [&](bool first_travels) {
                    // Positions of the peeked pair if the current gate picks
                    // this direction; only la and lb can have moved.
                    auto pos = [&](int logical) {
                        if (logical == la) return first_travels ? path[k - 1] : path[0];
                        if (logical == lb) return first_travels ? path[k] : path[1];
                        return layout[static_cast<std::size_t>(logical)];
                    };
                    return hop_distance(pos(peek.qubits[0]), pos(peek.qubits[1]));
                };
                move_first = future_distance(true) <= future_distance(false);
                break;
            }

            if (move_first) {
                for (std::size_t i = 0; i + 2 <= k; ++i)
                    apply_swap(path[i], path[i + 1]);
            } else {
                for (std::size_t i = k; i >= 2; --i)
                    apply_swap(path[i], path[i - 1]);
            }
            pa = layout[static_cast<std::size_t>(la)];
            pb = layout[static_cast<std::size_t>(lb)];
        }

        Gate placed = gate;
        placed.qubits = {pa, pb};
        out.gates.push_back(std::move(placed));
    }

    out.pi = layout;
    out.depth = circuit_depth(out.gates);
    return out;
}

}  // namespace qvm
