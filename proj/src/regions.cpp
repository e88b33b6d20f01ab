#include "qvm/regions.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <string>

#include "qvm/community.hpp"
#include "qvm/error.hpp"

namespace qvm {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

RegionScores score_region(const HardwareGraph& g, const std::vector<int>& vertices,
                          const ScoreWeights& w) {
    if (vertices.size() < 2)
        throw ValidationError("score_region: need at least 2 vertices, got " +
                              std::to_string(vertices.size()));
    HardwareGraph sub = g.induced(vertices);
    if (!sub.connected())
        throw ValidationError("score_region: vertex set induces a disconnected subgraph");
    const auto& edges = sub.edges();
    if (edges.empty())
        throw ValidationError("score_region: vertex set induces no couplers");

    double n = static_cast<double>(sub.num_vertices());
    double m = static_cast<double>(edges.size());

    double gate_mean = 0.0;
    for (const auto& e : edges) gate_mean += e.gate_error;
    gate_mean /= m;
    double gate_var = 0.0;
    for (const auto& e : edges) {
        double d = e.gate_error - gate_mean;
        gate_var += d * d;
    }
    double gate_sd = std::sqrt(gate_var / m);

    double ro_mean = 0.0;
    for (int v : sub.vertices()) ro_mean += sub.readout_error(v);
    ro_mean /= n;

    RegionScores s;
    // Density against a (n-1)^2 / 2 pair budget instead of the complete
    // graph's n(n-1)/2: a linear chain then scores exactly 2/(n-1) and
    // anything from a near-double-chain upward clamps to 1.
    s.s_conn = clamp01(2.0 * m / ((n - 1.0) * (n - 1.0)));
    s.s_gate = clamp01(1.0 - 100.0 * gate_mean);
    s.s_ro = clamp01(1.0 - 10.0 * ro_mean);
    // Coefficient of variation; an all-zero-error region counts as uniform.
    s.s_unif = gate_mean <= 0.0 ? 1.0 : clamp01(1.0 - gate_sd / gate_mean);
    s.q = clamp01(w.conn * s.s_conn + w.gate * s.s_gate + w.readout * s.s_ro +
                  w.uniformity * s.s_unif);
    return s;
}

std::vector<GraphEdge> induced_edges(const HardwareGraph& g, const std::vector<int>& vertices) {
    std::set<int> inside(vertices.begin(), vertices.end());
    std::vector<GraphEdge> out;
    for (const auto& e : g.edges()) {
        if (inside.count(e.u) && inside.count(e.v)) out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    return out;
}

std::vector<Region> score_candidates(const HardwareGraph& g,
                                     const std::vector<std::vector<int>>& candidates,
                                     bool parallel, const ScoreWeights& w) {
    std::vector<Region> out(candidates.size());
    int k = static_cast<int>(candidates.size());
    // Exceptions must not cross the parallel-for boundary; the first one is
    // captured and rethrown after the loop drains.
    std::exception_ptr failure = nullptr;

#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < k; ++i) {
        try {
            Region r;
            r.id = i;
            r.vertices = candidates[static_cast<std::size_t>(i)];
            std::sort(r.vertices.begin(), r.vertices.end());
            r.scores = score_region(g, r.vertices, w);
            r.edges = induced_edges(g, r.vertices);
            out[static_cast<std::size_t>(i)] = std::move(r);
        } catch (...) {
#pragma omp critical
            {
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

RegionPool select_pool(std::vector<Region> candidates) {
    std::sort(candidates.begin(), candidates.end(), [](const Region& a, const Region& b) {
        double da = a.quality_density();
        double db = b.quality_density();
        if (da != db) return da > db;
        if (a.vertices.size() != b.vertices.size()) return a.vertices.size() > b.vertices.size();
        return a.id < b.id;
    });

    RegionPool pool;
    std::set<int> taken;
    for (auto& cand : candidates) {
        bool clash = false;
        for (int v : cand.vertices) {
            if (taken.count(v)) {
                clash = true;
                break;
            }
        }
        if (clash) continue;
        taken.insert(cand.vertices.begin(), cand.vertices.end());
        pool.regions.push_back(std::move(cand));
    }
    pool.covered.assign(taken.begin(), taken.end());
    return pool;
}

RegionPool discover(const HardwareGraph& g, std::uint64_t seed, bool parallel,
                    const ScoreWeights& w, int min_size) {
    LouvainResult hierarchy = louvain(g, seed);
    std::vector<std::vector<int>> candidates = candidate_communities(g, hierarchy, min_size);
    RegionPool pool = select_pool(score_candidates(g, candidates, parallel, w));

    std::set<int> covered(pool.covered.begin(), pool.covered.end());
    for (int v : g.vertices()) {
        if (!covered.count(v)) pool.uncovered.push_back(v);
    }
    return pool;
}

}  // namespace qvm
