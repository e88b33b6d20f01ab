#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qvm/hardware_graph.hpp"
#include "qvm/qasm.hpp"

namespace qvm {

// Path cost used when choosing SWAP chains: calibrated two-qubit error, or
// plain hop count for the naive full-chip baseline.
enum class RouteMetric { error, hops };

struct RouterOptions {
    RouteMetric metric = RouteMetric::error;
    // Forced starting placement, logical index -> physical vertex. Empty
    // selects the interaction-weighted automatic layout. Mostly a test and
    // baseline-experiment hook.
    std::vector<int> initial_layout;
};

// A circuit lowered onto hardware: every gate operand is a physical vertex
// and every two-qubit gate sits on a coupler of the footprint.
struct RoutedCircuit {
    std::string name;
    int num_clbits = 0;
    std::vector<Gate> gates;  // operands are physical vertex ids

    std::vector<int> footprint;       // sorted physical vertices granted
    std::vector<int> initial_layout;  // logical -> physical before any gate
    std::vector<int> pi;              // logical -> physical after all SWAPs
    std::vector<int> measure_map;     // clbit -> physical vertex, -1 if unread
    int swap_count = 0;               // router-inserted SWAPs only
    int depth = 0;

    // Physical vertices any gate touches, sorted. SWAP detours can pull in
    // vertices beyond the initial placement, so this is the simulation width.
    std::vector<int> active_vertices() const;

    // The same gate stream relabeled to dense indices 0..k-1 by ascending
    // active vertex, as a plain circuit. Feeding this to ideal_distribution
    // must reproduce the source circuit's distribution exactly; tests lean
    // on that equivalence.
    CircuitIR dense_ir() const;
};

// Lowers circ onto the footprint graph: interaction-weighted initial layout
// (the busiest logical qubit lands on the highest weighted-degree vertex,
// partners spread outward by BFS), then SWAPs along minimum-cost paths with
// a one-gate lookahead deciding which endpoint travels. Fully deterministic:
// ties fall back to vertex and index order. The seed is part of the calling
// convention for stochastic router variants and is unused by this policy.
RoutedCircuit route(const CircuitIR& circ, const HardwareGraph& footprint_graph,
                    std::uint64_t seed, const RouterOptions& options = {});

// Circuit depth over the gate list: unitaries and measures each occupy one
// slot on their operands, barriers only synchronize.
int circuit_depth(const std::vector<Gate>& gates);

}  // namespace qvm
