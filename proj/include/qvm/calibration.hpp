#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qvm {

// One physical qubit as reported by a calibration snapshot. T1/T2 are kept
// for completeness and round-tripping; nothing downstream consumes them yet.
struct QubitProps {
    int index = -1;
    double t1_us = 0.0;
    double t2_us = 0.0;
    double readout_error = 0.0;
    bool operational = true;
};

// One two-qubit coupler. Undirected; (q0, q1) is stored as given but
// compared unordered.
struct CouplerProps {
    int q0 = -1;
    int q1 = -1;
    double gate_error = 0.0;
    bool operational = true;
};

struct CalibrationSnapshot {
    std::string device;
    std::string timestamp;
    std::vector<QubitProps> qubits;
    std::vector<CouplerProps> couplers;

    const QubitProps* find_qubit(int index) const;
    CouplerProps* find_coupler(int q0, int q1);
    const CouplerProps* find_coupler(int q0, int q1) const;
};

// Parses and validates a snapshot from JSON text. Requirements enforced:
// every coupler endpoint refers to a declared qubit, no duplicate qubit
// indices, no duplicate couplers (unordered), all error rates in [0, 1].
// Unknown JSON fields are ignored. Throws ValidationError with the name of
// the offending entity.
CalibrationSnapshot parse_snapshot(const std::string& json_text);

// Inverse of parse_snapshot, stable field order, suitable for fixtures.
std::string snapshot_to_json(const CalibrationSnapshot& snap);

// Error-rate recipe for synthetic snapshots. With clusters == 0 every edge
// draws from N(gate_error_mean, gate_error_std). With clusters >= 2 the
// device is split into that many contiguous column zones whose means
// alternate low/high around gate_error_mean; zone means can be pinned
// explicitly through zone_means. Draws are clamped to [1e-4, 0.9].
struct ErrorProfile {
    double gate_error_mean = 0.014;
    double gate_error_std = 0.007;
    double readout_error_mean = 0.02;
    double readout_error_std = 0.01;
    int clusters = 0;
    std::vector<double> zone_means;  // optional, overrides the derived means
    std::uint64_t seed = 1;
};

// Builds a heavy-hex style snapshot of `rows` x `cols` hexagonal cells.
//
// Construction: rows+1 horizontal chains of length 4*cols+1 are stacked;
// the gap below chain i carries bridge qubits at columns 0, 4, 8, ... when
// i is even and at columns 2, 6, 10, ... when i is odd (the stagger that
// keeps every vertex at degree <= 3). Qubits are numbered chain 0 left to
// right, then gap 0 bridges, then chain 1, and so on. rows=1, cols=1 is the
// single 12-qubit hexagon unit; rows=1, cols=17 gives the 156-qubit device
// used as the bundled synthetic fixture.
CalibrationSnapshot generate_heavy_hex(int rows, int cols, const ErrorProfile& profile);

// Column coordinate (x position) of a qubit in a generated device, used to
// assign cluster zones and by tests that reason about geometry. Returns
// nullopt for indices outside the device.
std::optional<double> heavy_hex_column(int rows, int cols, int qubit_index);

// Marks the listed couplers non-operational (dead). Unknown couplers raise
// ValidationError. Pure transform: input is not modified.
CalibrationSnapshot kill_couplers(const CalibrationSnapshot& snap,
                                  const std::vector<std::pair<int, int>>& couplers);

// Seeded random choice of floor(fraction * |couplers|) operational couplers.
std::vector<std::pair<int, int>> sample_couplers(const CalibrationSnapshot& snap,
                                                 double fraction, std::uint64_t seed);

// Same selection semantics as kill_couplers, but keeps the couplers
// operational with gate_error = 1.0. Models a stale calibration that still
// advertises a broken link.
CalibrationSnapshot degrade_couplers(const CalibrationSnapshot& snap,
                                     const std::vector<std::pair<int, int>>& couplers);

}  // namespace qvm
