#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "qvm/hardware_graph.hpp"

namespace qvm {

// A grouping of the graph's vertices. Community ids are dense and
// contiguous from 0; community_of and communities always agree.
struct Partition {
    std::unordered_map<int, int> community_of;   // physical vertex -> community id
    std::vector<std::vector<int>> communities;   // community id -> sorted physical ids

    static Partition singletons(const HardwareGraph& g);
    static Partition from_assignment(const HardwareGraph& g, const std::vector<int>& comm_of_dense);
    std::size_t size() const { return communities.size(); }
};

// Newman weighted modularity of a partition: the weight mass that falls
// inside communities minus the mass a degree-preserving random graph would
// put there. Requires at least one edge.
double modularity(const HardwareGraph& g, const Partition& p);

// Change in modularity from moving one vertex into target_community,
// computed incrementally (no full rescan). Matches
// modularity(after) - modularity(before) to floating-point accuracy.
double modularity_gain(const HardwareGraph& g, const Partition& p, int vertex,
                       int target_community);

// Vertex visit order used by one local-move pass: a permutation of
// [0, n). Injectable so tests can pin the traversal; production uses a
// seeded shuffle per (level, pass).
using VisitOrderFn = std::function<std::vector<int>(int level, int pass, int n)>;

struct LouvainResult {
    // One partition per hierarchy level (projected to original vertices),
    // plus a final refinement pass at the finest level appended when it
    // changes anything. levels.back() is the result partition.
    std::vector<Partition> levels;

    const Partition& final_partition() const { return levels.back(); }
};

// Two-phase modularity maximization: repeated local vertex moves (accepting
// the best positive gain, ties to the lowest community id) until a pass
// improves total modularity by less than 1e-7, then aggregation of
// communities into supervertices, repeated until the partition stops
// changing. A last local-move pass on the original graph guarantees the
// returned partition is a single-vertex-move local optimum.
LouvainResult louvain(const HardwareGraph& g, std::uint64_t seed);
LouvainResult louvain(const HardwareGraph& g, std::uint64_t seed, const VisitOrderFn& order);

// Region candidates from every hierarchy level: each community is split
// into connected components, components smaller than min_size are dropped,
// and duplicates (same vertex set found at different levels) are removed.
// Sorted deterministically (by size descending, then lexicographically).
std::vector<std::vector<int>> candidate_communities(const HardwareGraph& g,
                                                    const LouvainResult& hierarchy,
                                                    int min_size = 3);

}  // namespace qvm
