#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qvm/composite.hpp"
#include "qvm/hardware_graph.hpp"
#include "qvm/metrics.hpp"
#include "qvm/router.hpp"

namespace qvm {

// Stochastic error model distilled from a calibration snapshot. After each
// gate, with the gate's firing rate, a uniformly random non-identity Pauli
// hits its operands (1 of 3 on one qubit, 1 of 15 on two); each measurement
// flips its bit with the vertex's readout rate.
struct NoiseModel {
    double one_qubit_depol = 1e-4;
    std::map<std::pair<int, int>, double> two_qubit_depol;  // keyed (min, max)
    std::map<int, double> readout_flip;

    // Two-qubit rates from coupler gate errors, readout rates from vertex
    // readout errors, and the given uniform one-qubit rate.
    static NoiseModel from_graph(const HardwareGraph& g, double one_qubit_rate = 1e-4);

    // The noiseless model: nothing fires, nothing flips.
    static NoiseModel none();

    // Unmodeled couplers and vertices are treated as clean.
    double edge_rate(int u, int v) const;
    double flip_rate(int vertex) const;
};

// Seed for one tenant inside a shared batch: the base seed folded with a
// digest of the tenant id, so a tenant's shot stream does not depend on
// which other tenants happen to share the batch.
std::uint64_t segment_seed(std::uint64_t base_seed, const std::string& circuit_id);

// Monte Carlo sampling of a routed circuit, one trajectory per shot. Keys
// are clbit strings with clbit 0 rightmost. Deterministic in (circuit,
// model, shots, seed); the parallel flag changes wall time only, never a
// byte of the histogram.
Counts simulate(const RoutedCircuit& routed, const NoiseModel& noise, int shots,
                std::uint64_t seed, bool parallel = false);

// Runs every tenant of a composite under its segment seed and packs the
// shot-aligned outcomes into composite keys. Demultiplexing the result
// reproduces, exactly, what simulate() gives each tenant on its own.
Counts simulate_composite(const CompositeCircuit& comp, const NoiseModel& noise, int shots,
                          std::uint64_t base_seed, bool parallel = false);

}  // namespace qvm
