#include "qvm/hardware_graph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

#include "qvm/error.hpp"

namespace qvm {

double edge_weight(double gate_error) { return 1.0 / (gate_error + kWeightEpsilon); }

std::uint64_t HardwareGraph::pack(int u, int v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
}

HardwareGraph HardwareGraph::build(const CalibrationSnapshot& snap) {
    HardwareGraph g;
    for (const auto& q : snap.qubits)
        if (q.operational) g.vertices_.push_back(q.index);
    std::sort(g.vertices_.begin(), g.vertices_.end());
    g.adjacency_.resize(g.vertices_.size());
    g.readout_.resize(g.vertices_.size());
    for (std::size_t i = 0; i < g.vertices_.size(); ++i) g.dense_[g.vertices_[i]] = int(i);
    for (const auto& q : snap.qubits)
        if (q.operational) g.readout_[g.dense_[q.index]] = q.readout_error;

    for (const auto& c : snap.couplers) {
        if (!c.operational) continue;
        if (!g.dense_.count(c.q0) || !g.dense_.count(c.q1)) continue;  // endpoint down
        GraphEdge e;
        e.u = std::min(c.q0, c.q1);
        e.v = std::max(c.q0, c.q1);
        e.gate_error = c.gate_error;
        e.weight = edge_weight(c.gate_error);
        e.degraded = c.gate_error >= kDeadErrorThreshold;
        g.edge_index_[pack(e.u, e.v)] = int(g.edges_.size());
        g.edges_.push_back(e);
        g.adjacency_[g.dense_[e.u]].push_back(e.v);
        g.adjacency_[g.dense_[e.v]].push_back(e.u);
    }
    for (auto& adj : g.adjacency_) std::sort(adj.begin(), adj.end());
    return g;
}

bool HardwareGraph::has_edge(int u, int v) const { return edge_index_.count(pack(u, v)) > 0; }

const GraphEdge* HardwareGraph::find_edge(int u, int v) const {
    auto it = edge_index_.find(pack(u, v));
    return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

double HardwareGraph::readout_error(int physical) const { return readout_[dense_index(physical)]; }

const std::vector<int>& HardwareGraph::neighbors(int physical) const {
    return adjacency_[dense_index(physical)];
}

int HardwareGraph::dense_index(int physical) const {
    auto it = dense_.find(physical);
    if (it == dense_.end())
        throw ValidationError("graph: unknown vertex " + std::to_string(physical));
    return it->second;
}

double HardwareGraph::weighted_degree(int physical) const {
    double sum = 0.0;
    for (int nb : neighbors(physical)) sum += find_edge(physical, nb)->weight;
    return sum;
}

HardwareGraph HardwareGraph::induced(const std::vector<int>& physical_ids) const {
    HardwareGraph g;
    g.vertices_ = physical_ids;
    std::sort(g.vertices_.begin(), g.vertices_.end());
    g.vertices_.erase(std::unique(g.vertices_.begin(), g.vertices_.end()), g.vertices_.end());
    g.adjacency_.resize(g.vertices_.size());
    g.readout_.resize(g.vertices_.size());
    for (std::size_t i = 0; i < g.vertices_.size(); ++i) {
        if (!dense_.count(g.vertices_[i]))
            throw ValidationError("induced: vertex " + std::to_string(g.vertices_[i]) +
                                  " not in graph");
        g.dense_[g.vertices_[i]] = int(i);
        g.readout_[i] = readout_error(g.vertices_[i]);
    }
    for (const auto& e : edges_) {
        if (!g.dense_.count(e.u) || !g.dense_.count(e.v)) continue;
        g.edge_index_[pack(e.u, e.v)] = int(g.edges_.size());
        g.edges_.push_back(e);
        g.adjacency_[g.dense_[e.u]].push_back(e.v);
        g.adjacency_[g.dense_[e.v]].push_back(e.u);
    }
    for (auto& adj : g.adjacency_) std::sort(adj.begin(), adj.end());
    return g;
}

std::vector<std::vector<int>> HardwareGraph::components() const {
    std::vector<char> seen(vertices_.size(), 0);
    std::vector<std::vector<int>> comps;
    for (std::size_t start = 0; start < vertices_.size(); ++start) {
        if (seen[start]) continue;
        std::vector<int> comp;
        std::queue<int> frontier;  // dense indices
        frontier.push(int(start));
        seen[start] = 1;
        while (!frontier.empty()) {
            int d = frontier.front();
            frontier.pop();
            comp.push_back(vertices_[d]);
            for (int nb : adjacency_[d]) {
                int nd = dense_.at(nb);
                if (!seen[nd]) {
                    seen[nd] = 1;
                    frontier.push(nd);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    std::stable_sort(comps.begin(), comps.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return comps;
}

bool HardwareGraph::connected() const {
    return vertices_.empty() || components().size() == 1;
}

std::vector<int> HardwareGraph::shortest_path(int from, int to, bool error_metric) const {
    int src = dense_index(from), dst = dense_index(to);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(vertices_.size(), inf);
    std::vector<int> prev(vertices_.size(), -1);
    using Item = std::pair<double, int>;  // (cost, dense); dense id breaks ties
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        if (u == dst) break;
        for (int nb : adjacency_[u]) {
            int v = dense_.at(nb);
            const GraphEdge* e = find_edge(vertices_[u], nb);
            double cost = error_metric ? e->gate_error + kWeightEpsilon : 1.0;
            if (dist[u] + cost < dist[v]) {
                dist[v] = dist[u] + cost;
                prev[v] = u;
                heap.emplace(dist[v], v);
            }
        }
    }
    if (dist[dst] == inf) return {};
    std::vector<int> path;
    for (int at = dst; at != -1; at = prev[at]) path.push_back(vertices_[at]);
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace qvm
