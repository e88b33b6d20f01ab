#pragma once

#include <cstdint>
#include <vector>

#include "qvm/hardware_graph.hpp"

namespace qvm {

// Mixing weights for the composite region quality score. Gate quality
// carries the most weight; the defaults are deliberate and every consumer
// should use them unless an experiment says otherwise.
struct ScoreWeights {
    double conn = 0.25;
    double gate = 0.35;
    double readout = 0.20;
    double uniformity = 0.20;
};

// Per-region quality axes, each in [0, 1], plus their weighted blend q.
//
//   s_conn  edge density, normalized so a linear chain of n vertices scores
//           2/(n-1) and anything at least as dense as a complete graph
//           saturates at 1
//   s_gate  max(0, 1 - 100 * mean two-qubit gate error)
//   s_ro    max(0, 1 - 10 * mean readout error)
//   s_unif  max(0, 1 - coefficient of variation of gate errors)
struct RegionScores {
    double s_conn = 0.0;
    double s_gate = 0.0;
    double s_ro = 0.0;
    double s_unif = 0.0;
    double q = 0.0;
};

// A connected, scored patch of the device graph. Ids are assigned in
// candidate order during scoring and stay stable through selection.
struct Region {
    int id = -1;
    std::vector<int> vertices;      // sorted physical ids
    std::vector<GraphEdge> edges;   // induced couplers, endpoints ascending
    RegionScores scores;

    // Greedy selection key: composite quality per qubit.
    double quality_density() const {
        return vertices.empty() ? 0.0 : scores.q / static_cast<double>(vertices.size());
    }
};

// Disjoint set of regions chosen from the candidates. covered is the union
// of the region vertex sets; uncovered lists the graph vertices left out
// (filled by discover, which knows the full graph).
struct RegionPool {
    std::vector<Region> regions;
    std::vector<int> covered;
    std::vector<int> uncovered;
};

// Scores one vertex set against the graph. Throws ValidationError when the
// set has fewer than two vertices, contains an unknown vertex, or induces a
// disconnected subgraph (a single vertex has no edges to score).
RegionScores score_region(const HardwareGraph& g, const std::vector<int>& vertices,
                          const ScoreWeights& w = {});

// Induced couplers for a vertex set, sorted by endpoints. The set does not
// need to be connected here; this is also used for composed footprints.
std::vector<GraphEdge> induced_edges(const HardwareGraph& g, const std::vector<int>& vertices);

// Scores every candidate and packages them as Region values with ids in
// input order. Candidates are independent, so with parallel = true the loop
// runs under OpenMP; results are written by index and are bit-identical to
// the serial path regardless of thread count.
std::vector<Region> score_candidates(const HardwareGraph& g,
                                     const std::vector<std::vector<int>>& candidates,
                                     bool parallel = false, const ScoreWeights& w = {});

// Greedy weighted set packing: scan candidates by quality density
// descending (ties: larger region first, then lower id) and accept each one
// that is vertex-disjoint from everything accepted before it. uncovered is
// left empty; only discover can compute it.
RegionPool select_pool(std::vector<Region> candidates);

// Full offline pipeline: community detection on the weighted graph, the
// hierarchy's connected communities of at least min_size vertices as
// candidates, scoring, then greedy disjoint selection. uncovered is set.
RegionPool discover(const HardwareGraph& g, std::uint64_t seed, bool parallel = false,
                    const ScoreWeights& w = {}, int min_size = 3);

}  // namespace qvm
