#pragma once

// Shared fixtures and independent oracles used across the test binaries.
// Oracles here are deliberately written against the definitions, not the
// library internals, so they can catch bookkeeping bugs in the real
// implementations.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qvm/calibration.hpp"
#include "qvm/hardware_graph.hpp"

namespace testutil {

struct EdgeSpec {
    int u;
    int v;
    double error = 0.01;
};

// Snapshot over qubits 0..n-1, all operational, fixed readout unless given.
inline qvm::CalibrationSnapshot make_snapshot(int n, const std::vector<EdgeSpec>& edges,
                                              double readout = 0.01) {
    qvm::CalibrationSnapshot snap;
    snap.device = "testdev";
    snap.timestamp = "2025-01-01T00:00:00Z";
    for (int i = 0; i < n; ++i) {
        qvm::QubitProps q;
        q.index = i;
        q.t1_us = 100.0;
        q.t2_us = 80.0;
        q.readout_error = readout;
        snap.qubits.push_back(q);
    }
    for (const auto& e : edges) {
        qvm::CouplerProps c;
        c.q0 = e.u;
        c.q1 = e.v;
        c.gate_error = e.error;
        snap.couplers.push_back(c);
    }
    return snap;
}

inline qvm::HardwareGraph make_graph(int n, const std::vector<EdgeSpec>& edges,
                                     double readout = 0.01) {
    return qvm::HardwareGraph::build(make_snapshot(n, edges, readout));
}

// Literal Newman modularity: loop over every ordered vertex pair and apply
// the definition term by term. O(n^2), fine for oracle-sized graphs.
inline double brute_modularity(const qvm::HardwareGraph& g, const std::map<int, int>& community) {
    std::map<int, double> strength;
    for (int v : g.vertices()) strength[v] = 0.0;
    for (const auto& e : g.edges()) {
        strength[e.u] += e.weight;
        strength[e.v] += e.weight;
    }
    double two_w = 0.0;
    for (const auto& [v, s] : strength) two_w += s;
    double q = 0.0;
    for (int u : g.vertices()) {
        for (int v : g.vertices()) {
            if (community.at(u) != community.at(v)) continue;
            double w_uv = 0.0;
            if (u != v) {
                const qvm::GraphEdge* e = g.find_edge(u, v);
                if (e) w_uv = e->weight;
            }
            q += w_uv - strength[u] * strength[v] / two_w;
        }
    }
    return q / two_w;
}

// Seeded Erdos-Renyi graph with continuous edge errors (no ties anywhere),
// conditioned on having at least one edge.
inline qvm::HardwareGraph random_graph(int n, double p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_real_distribution<double> err(0.001, 0.2);
    std::vector<EdgeSpec> edges;
    while (edges.empty()) {
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (coin(rng) < p) edges.push_back({u, v, err(rng)});
    }
    return make_graph(n, edges);
}

inline std::vector<int> sorted_copy(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace testutil
