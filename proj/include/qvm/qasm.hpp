#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qvm/error.hpp"

namespace qvm {

// Gate vocabulary accepted by the parser and understood by the simulators.
// Anything else in a source file must be a user-defined gate that expands,
// possibly through several levels, into these primitives.
enum class GateKind {
    h,
    x,
    y,
    z,
    s,
    sdg,
    t,
    tdg,
    rx,
    ry,
    rz,
    u,
    cx,
    cz,
    swap,
    measure,
    barrier,
};

const char* gate_name(GateKind kind);

// Number of qubit operands the kind requires (barrier is variadic, reported
// as 0 here) and the number of angle parameters it carries.
int gate_arity(GateKind kind);
int gate_param_count(GateKind kind);
bool is_two_qubit(GateKind kind);

struct Gate {
    GateKind kind = GateKind::h;
    std::vector<int> qubits;     // operand indices, logical before routing
    std::vector<double> params;  // angles in radians
    int clbit = -1;              // measure target, unused otherwise

    bool operator==(const Gate& other) const = default;
};

// Flat circuit form: one quantum register, at most one classical register,
// gates in program order with measures only at the tail.
struct CircuitIR {
    std::string name;
    int num_qubits = 0;
    int num_clbits = 0;
    std::vector<Gate> gates;

    int gate_count(GateKind kind) const;
    int two_qubit_gate_count() const;
};

// Parses the OpenQASM 2.0 subset: one qreg, at most one creg, the primitive
// gates above, user gate definitions built from them (inlined at call sites),
// angle expressions over pi, literals, +, -, *, /, and unary minus, and
// register broadcast for one-qubit gates and measure. include directives are
// skipped. Violations raise ParseError carrying line and column.
CircuitIR parse_qasm(const std::string& text, const std::string& name = "");

// parse_qasm applied to a file's contents; the circuit name defaults to the
// file stem.
CircuitIR load_qasm_file(const std::string& path);

// Order-sensitive digest of the gate sequence (kinds, operands, rounded
// angles, measure wiring). Circuits that hash equal route identically on the
// same footprint, which is what the transpilation cache needs.
std::uint64_t structural_hash(const CircuitIR& circ);

}  // namespace qvm
