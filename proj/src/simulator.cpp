#include "qvm/simulator.hpp"

#include <algorithm>
#include <random>

#include "qvm/error.hpp"
#include "qvm/statevector.hpp"

namespace qvm {

namespace {

// One unitary of the compiled stream: dense operands plus its firing rate.
struct Step {
    Gate gate;  // operands remapped to dense local indices
    double rate = 0.0;
};

struct Readout {
    int dense_qubit = 0;
    int clbit = 0;
    double flip = 0.0;
};

// Routed circuit lowered to simulation form: dense qubit labels, per-gate
// noise rates resolved, the noiseless final state evolved once up front.
struct Compiled {
    int width = 0;
    int num_clbits = 0;
    std::vector<Step> steps;
    std::vector<Readout> readouts;  // in gate order
    Statevector noiseless{1};
};

Compiled compile(const RoutedCircuit& routed, const NoiseModel& noise) {
    std::vector<int> active = routed.active_vertices();
    if (active.empty()) throw ValidationError("circuit '" + routed.name + "' has no gates");
    if (static_cast<int>(active.size()) > kMaxStatevectorQubits)
        throw ValidationError("circuit '" + routed.name + "' touches " +
                              std::to_string(active.size()) + " vertices; the sampler is capped at " +
                              std::to_string(kMaxStatevectorQubits));

    std::map<int, int> rank;
    for (std::size_t i = 0; i < active.size(); ++i) rank[active[i]] = static_cast<int>(i);

    Compiled out;
    out.width = static_cast<int>(active.size());
    out.num_clbits = routed.num_clbits;
    out.noiseless = Statevector(out.width);

    bool measuring = false;
    for (const Gate& g : routed.gates) {
        if (g.kind == GateKind::barrier) continue;
        if (g.kind == GateKind::measure) {
            measuring = true;
            if (g.clbit < 0 || g.clbit >= routed.num_clbits)
                throw ValidationError("measure clbit " + std::to_string(g.clbit) +
                                      " outside creg of size " + std::to_string(routed.num_clbits));
            out.readouts.push_back(
                {rank.at(g.qubits[0]), g.clbit, noise.flip_rate(g.qubits[0])});
            continue;
        }
        if (measuring)
            throw ValidationError("gate after measure in routed circuit '" + routed.name + "'");
        Step step;
        step.gate = g;
        for (int& q : step.gate.qubits) q = rank.at(q);
        step.rate = is_two_qubit(g.kind) ? noise.edge_rate(g.qubits[0], g.qubits[1])
                                         : noise.one_qubit_depol;
        out.noiseless.apply(step.gate);
        out.steps.push_back(std::move(step));
    }
    if (out.readouts.empty())
        throw ValidationError("circuit '" + routed.name + "' measures nothing; nothing to sample");
    return out;
}

std::uint64_t splitmix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Uniform in [0, 1) with the full 53-bit mantissa, independent of any
// library distribution's implementation details.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One trajectory. The draw order is a contract, not an accident: one
// uniform per unitary (fire or not), then one Pauli choice per firing gate
// in stream order, then the basis sample, then one uniform per readout.
// Solo/composite equality and the serial/parallel byte-identity both hang
// on this sequence never changing.
std::string run_shot(const Compiled& c, std::uint64_t seed, std::uint64_t shot) {
    std::mt19937_64 rng(splitmix(seed + 0x9E3779B97F4A7C15ull * (shot + 1)));

    std::vector<bool> fires(c.steps.size(), false);
    bool any = false;
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
        fires[i] = canonical(rng) < c.steps[i].rate;
        any = any || fires[i];
    }
    std::vector<int> pauli(c.steps.size(), 0);
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
        if (!fires[i]) continue;
        bool two = is_two_qubit(c.steps[i].gate.kind);
        pauli[i] = 1 + static_cast<int>(rng() % (two ? 15 : 3));
    }

    // Clean shots sample the precomputed state; only noisy ones re-evolve.
    std::size_t basis;
    if (!any) {
        basis = c.noiseless.sample(canonical(rng));
    } else {
        Statevector state(c.width);
        for (std::size_t i = 0; i < c.steps.size(); ++i) {
            const Step& s = c.steps[i];
            state.apply(s.gate);
            if (!fires[i]) continue;
            if (is_two_qubit(s.gate.kind)) {
                int first = pauli[i] >> 2;
                int second = pauli[i] & 3;
                if (first) state.apply_pauli(s.gate.qubits[0], first);
                if (second) state.apply_pauli(s.gate.qubits[1], second);
            } else {
                state.apply_pauli(s.gate.qubits[0], pauli[i]);
            }
        }
        basis = state.sample(canonical(rng));
    }

    std::string key(static_cast<std::size_t>(c.num_clbits), '0');
    for (const Readout& r : c.readouts) {
        int bit = static_cast<int>((basis >> r.dense_qubit) & 1u);
        if (canonical(rng) < r.flip) bit ^= 1;
        if (bit) key[static_cast<std::size_t>(c.num_clbits - 1 - r.clbit)] = '1';
    }
    return key;
}

// Per-shot outcome strings in shot order; the shared core of both entry
// points, so their histograms cannot drift apart.
std::vector<std::string> run_shots(const RoutedCircuit& routed, const NoiseModel& noise,
                                   int shots, std::uint64_t seed, bool parallel) {
    if (shots < 1) throw ValidationError("shots must be positive");
    Compiled c = compile(routed, noise);
    std::vector<std::string> out(static_cast<std::size_t>(shots));
#pragma omp parallel for schedule(static) if (parallel)
    for (int s = 0; s < shots; ++s)
        out[static_cast<std::size_t>(s)] = run_shot(c, seed, static_cast<std::uint64_t>(s));
    return out;
}

}  // namespace

NoiseModel NoiseModel::from_graph(const HardwareGraph& g, double one_qubit_rate) {
    NoiseModel m;
    m.one_qubit_depol = one_qubit_rate;
    for (const GraphEdge& e : g.edges())
        m.two_qubit_depol[{std::min(e.u, e.v), std::max(e.u, e.v)}] = e.gate_error;
    for (int v : g.vertices()) m.readout_flip[v] = g.readout_error(v);
    return m;
}

NoiseModel NoiseModel::none() {
    NoiseModel m;
    m.one_qubit_depol = 0.0;
    return m;
}

double NoiseModel::edge_rate(int u, int v) const {
    auto it = two_qubit_depol.find({std::min(u, v), std::max(u, v)});
    return it == two_qubit_depol.end() ? 0.0 : it->second;
}

double NoiseModel::flip_rate(int vertex) const {
    auto it = readout_flip.find(vertex);
    return it == readout_flip.end() ? 0.0 : it->second;
}

std::uint64_t segment_seed(std::uint64_t base_seed, const std::string& circuit_id) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : circuit_id) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return base_seed ^ h;
}

Counts simulate(const RoutedCircuit& routed, const NoiseModel& noise, int shots,
                std::uint64_t seed, bool parallel) {
    Counts counts;
    for (const std::string& key : run_shots(routed, noise, shots, seed, parallel))
        counts[key] += 1;
    return counts;
}

Counts simulate_composite(const CompositeCircuit& comp, const NoiseModel& noise, int shots,
                          std::uint64_t base_seed, bool parallel) {
    if (shots < 1) throw ValidationError("shots must be positive");
    std::vector<std::string> merged(static_cast<std::size_t>(shots),
                                    std::string(static_cast<std::size_t>(comp.total_clbits), '0'));
    for (const CompositeSegment& seg : comp.segments) {
        std::vector<std::string> keys = run_shots(
            seg.routed, noise, shots, segment_seed(base_seed, seg.circuit_id), parallel);
        for (int s = 0; s < shots; ++s) {
            std::string slice = seg.logical_to_slice(keys[static_cast<std::size_t>(s)]);
            int w = seg.routed.num_clbits;
            for (int b = 0; b < w; ++b) {
                char bit = slice[static_cast<std::size_t>(w - 1 - b)];
                merged[static_cast<std::size_t>(s)]
                      [static_cast<std::size_t>(comp.total_clbits - 1 - (seg.clbit_offset + b))] =
                          bit;
            }
        }
    }
    Counts counts;
    for (const std::string& key : merged) counts[key] += 1;
    return counts;
}

}  // namespace qvm
