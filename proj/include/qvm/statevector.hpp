#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qvm/qasm.hpp"

namespace qvm {

// Exact simulation is used for oracles and for the noiseless core of the
// trajectory sampler, so the width cap is deliberate: beyond this the memory
// for the amplitude vector stops being trivial and the tool is the wrong one.
inline constexpr int kMaxStatevectorQubits = 14;

// Dense amplitude vector over little-endian basis indices: bit k of the
// basis index is qubit k. Starts in |0...0>.
class Statevector {
  public:
    explicit Statevector(int num_qubits);

    int num_qubits() const { return n_; }

    // Applies one unitary gate; barrier is a no-op, measure is rejected.
    void apply(const Gate& g);

    // Applies a single Pauli (1 = X, 2 = Y, 3 = Z) to one qubit. Two-qubit
    // Paulis factor into two of these.
    void apply_pauli(int qubit, int pauli);

    // Returns the basis index whose cumulative probability interval contains
    // u, for u drawn uniformly from [0, 1).
    std::size_t sample(double u) const;

    double probability(std::size_t basis) const;
    const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

  private:
    int n_;
    std::vector<std::complex<double>> amp_;

    void apply1(int q, const std::complex<double> m[4]);
};

// Exact outcome distribution over classical-bit strings, clbit 0 rightmost.
// Measures bind qubits to clbits; clbits nothing measures into stay 0. A
// circuit with no measures reads every qubit in register order instead.
// Entries below 1e-12 are dropped after aggregation.
std::map<std::string, double> ideal_distribution(const CircuitIR& circ);

// Formats a basis outcome as a bit string of the given width, index 0 as the
// rightmost character.
std::string format_bits(std::size_t value, int width);

}  // namespace qvm
