#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qvm/calibration.hpp"

namespace qvm {

// Regularizer added to gate errors before inversion so that a perfect
// coupler gets a finite weight: w = 1 / (error + kWeightEpsilon).
inline constexpr double kWeightEpsilon = 1e-6;

// Couplers at or above this error are considered dead for all practical
// purposes. They stay in the graph (flagged) so callers can reason about
// them, e.g. the stale-calibration baseline.
inline constexpr double kDeadErrorThreshold = 0.5;

struct GraphEdge {
    int u = -1;  // physical ids, u < v
    int v = -1;
    double gate_error = 0.0;
    double weight = 0.0;
    bool degraded = false;  // gate_error >= kDeadErrorThreshold
};

// Weighted view of the operational part of a device. Vertices are the
// operational qubits (sparse physical ids preserved); edges are operational
// couplers whose both endpoints are operational. Internally vertices are
// also given dense indices 0..n-1 in ascending physical-id order, which is
// what the community code works with.
class HardwareGraph {
  public:
    HardwareGraph() = default;

    // Accessors by physical id.
    const std::vector<int>& vertices() const { return vertices_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    bool has_vertex(int physical) const { return dense_.count(physical) > 0; }
    bool has_edge(int u, int v) const;
    const GraphEdge* find_edge(int u, int v) const;
    double readout_error(int physical) const;
    // Neighbor physical ids, ascending.
    const std::vector<int>& neighbors(int physical) const;

    // Dense-index view (used by Louvain and the router internals).
    int dense_index(int physical) const;
    int physical_id(int dense) const { return vertices_[dense]; }
    double weighted_degree(int physical) const;

    // Induced subgraph on a set of physical ids; all of them must exist.
    HardwareGraph induced(const std::vector<int>& physical_ids) const;

    bool connected() const;
    // Connected components as sorted lists of physical ids, largest first.
    std::vector<std::vector<int>> components() const;

    // Minimum-cost path between two vertices, inclusive of endpoints.
    // cost = gate_error + kWeightEpsilon per edge when error_metric, else 1
    // per edge (hop count). Empty if unreachable.
    std::vector<int> shortest_path(int from, int to, bool error_metric) const;

    static HardwareGraph build(const CalibrationSnapshot& snap);

  private:
    std::vector<int> vertices_;                    // ascending physical ids
    std::vector<GraphEdge> edges_;
    std::unordered_map<int, int> dense_;           // physical -> dense
    std::vector<std::vector<int>> adjacency_;      // by dense index
    std::vector<double> readout_;                  // by dense index
    std::unordered_map<std::uint64_t, int> edge_index_;  // packed pair -> edge

    static std::uint64_t pack(int u, int v);
};

// Weight from a raw gate error, exposed for tests: 1 / (error + 1e-6).
double edge_weight(double gate_error);

}  // namespace qvm
