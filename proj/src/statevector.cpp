#include "qvm/statevector.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qvm/error.hpp"

namespace qvm {

namespace {

using cd = std::complex<double>;

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

Statevector::Statevector(int num_qubits) : n_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxStatevectorQubits)
        throw ValidationError("statevector width must be in [1, " +
                              std::to_string(kMaxStatevectorQubits) + "], got " +
                              std::to_string(num_qubits));
    amp_.assign(std::size_t{1} << n_, cd(0.0, 0.0));
    amp_[0] = cd(1.0, 0.0);
}

void Statevector::apply1(int q, const cd m[4]) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t base = 0; base < amp_.size(); ++base) {
        if (base & bit) continue;
        cd a0 = amp_[base];
        cd a1 = amp_[base | bit];
        amp_[base] = m[0] * a0 + m[1] * a1;
        amp_[base | bit] = m[2] * a0 + m[3] * a1;
    }
}

void Statevector::apply_pauli(int qubit, int pauli) {
    const std::size_t bit = std::size_t{1} << qubit;
    switch (pauli) {
        case 1:  // X
            for (std::size_t base = 0; base < amp_.size(); ++base)
                if (!(base & bit)) std::swap(amp_[base], amp_[base | bit]);
            break;
        case 2:  // Y
            for (std::size_t base = 0; base < amp_.size(); ++base) {
                if (base & bit) continue;
                cd a0 = amp_[base];
                cd a1 = amp_[base | bit];
                amp_[base] = cd(0.0, -1.0) * a1;
                amp_[base | bit] = cd(0.0, 1.0) * a0;
            }
            break;
        case 3:  // Z
            for (std::size_t base = 0; base < amp_.size(); ++base)
                if (base & bit) amp_[base] = -amp_[base];
            break;
        default:
            throw ValidationError("pauli code must be 1, 2, or 3");
    }
}

void Statevector::apply(const Gate& g) {
    for (int q : g.qubits)
        if (q < 0 || q >= n_)
            throw ValidationError("gate operand " + std::to_string(q) +
                                  " outside statevector width " + std::to_string(n_));

    switch (g.kind) {
        case GateKind::barrier:
            return;
        case GateKind::measure:
            throw ValidationError("statevector cannot apply a measure gate");

        case GateKind::h: {
            const cd m[4] = {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
            apply1(g.qubits[0], m);
            return;
        }
        case GateKind::x:
            apply_pauli(g.qubits[0], 1);
            return;
        case GateKind::y:
            apply_pauli(g.qubits[0], 2);
            return;
        case GateKind::z:
            apply_pauli(g.qubits[0], 3);
            return;
        case GateKind::s: {
            const cd m[4] = {1.0, 0.0, 0.0, cd(0.0, 1.0)};
            apply1(g.qubits[0], m);
            return;
        }
        case GateKind::sdg: {
            const cd m[4] = {1.0, 0.0, 0.0, cd(0.0, -1.0)};
            apply1(g.qubits[0], m);
            return;
        }
        case GateKind::t: {
            const cd m[4] = {1.0, 0.0, 0.0, std::polar(1.0, M_PI / 4)};
            apply1(g.qubits[0], m);
            return;
        }
        case GateKind::tdg: {
            const cd m[4] = {1.0, 0.0, 0.0, std::polar(1.0, -M_PI / 4)};
            apply1(g.qubits[0], m);
            return;
        }
        case GateKind::rx: {
            double h = g.params.at(0) / 2;
            const cd m[4] = {std::cos(h), cd(0.0, -std::sin(h)), cd(0.0, -std::sin(h)),
                             std::cos(h)};
            apply1(g.qubits[0], m);
            return;
        }
        case GateKind::ry: {
            double h = g.params.at(0) / 2;
            const cd m[4] = {std::cos(h), -std::sin(h), std::sin(h), std::cos(h)};
            apply1(g.qubits[0], m);
            return;
        }
        case GateKind::rz: {
            double h = g.params.at(0) / 2;
            const cd m[4] = {std::polar(1.0, -h), 0.0, 0.0, std::polar(1.0, h)};
            apply1(g.qubits[0], m);
            return;
        }
        case GateKind::u: {
            double th = g.params.at(0) / 2;
            double phi = g.params.at(1);
            double lam = g.params.at(2);
            const cd m[4] = {std::cos(th), -std::polar(1.0, lam) * std::sin(th),
                             std::polar(1.0, phi) * std::sin(th),
                             std::polar(1.0, phi + lam) * std::cos(th)};
            apply1(g.qubits[0], m);
            return;
        }

        case GateKind::cx: {
            const std::size_t cbit = std::size_t{1} << g.qubits[0];
            const std::size_t tbit = std::size_t{1} << g.qubits[1];
            for (std::size_t base = 0; base < amp_.size(); ++base)
                if ((base & cbit) && !(base & tbit)) std::swap(amp_[base], amp_[base | tbit]);
            return;
        }
        case GateKind::cz: {
            const std::size_t mask =
                (std::size_t{1} << g.qubits[0]) | (std::size_t{1} << g.qubits[1]);
            for (std::size_t base = 0; base < amp_.size(); ++base)
                if ((base & mask) == mask) amp_[base] = -amp_[base];
            return;
        }
        case GateKind::swap: {
            const std::size_t b0 = std::size_t{1} << g.qubits[0];
            const std::size_t b1 = std::size_t{1} << g.qubits[1];
            for (std::size_t base = 0; base < amp_.size(); ++base)
                if ((base & b0) && !(base & b1)) std::swap(amp_[base], amp_[(base ^ b0) | b1]);
            return;
        }
    }
    throw ValidationError("unhandled gate kind");
}

std::size_t Statevector::sample(double u) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        acc += std::norm(amp_[i]);
        if (u < acc) return i;
    }
    return amp_.size() - 1;  // u landed in rounding slack at the top
}

double Statevector::probability(std::size_t basis) const {
    return basis < amp_.size() ? std::norm(amp_[basis]) : 0.0;
}

std::string format_bits(std::size_t value, int width) {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int j = 0; j < width; ++j)
        if (value & (std::size_t{1} << j)) s[static_cast<std::size_t>(width - 1 - j)] = '1';
    return s;
}

std::map<std::string, double> ideal_distribution(const CircuitIR& circ) {
    if (circ.num_qubits > kMaxStatevectorQubits)
        throw ValidationError("ideal_distribution is capped at " +
                              std::to_string(kMaxStatevectorQubits) + " qubits; circuit '" +
                              circ.name + "' has " + std::to_string(circ.num_qubits));

    Statevector state(circ.num_qubits);
    std::vector<int> clbit_source;  // clbit index -> qubit, -1 when unmeasured
    int width = circ.num_clbits;
    bool saw_measure = false;
    clbit_source.assign(static_cast<std::size_t>(std::max(width, 0)), -1);

    for (const Gate& g : circ.gates) {
        if (g.kind == GateKind::measure) {
            saw_measure = true;
            if (g.clbit < 0 || g.clbit >= width)
                throw ValidationError("measure clbit " + std::to_string(g.clbit) +
                                      " outside creg of size " + std::to_string(width));
            clbit_source[static_cast<std::size_t>(g.clbit)] = g.qubits.at(0);
        } else {
            state.apply(g);
        }
    }
    if (!saw_measure) {
        width = circ.num_qubits;
        clbit_source.resize(static_cast<std::size_t>(width));
        for (int j = 0; j < width; ++j) clbit_source[static_cast<std::size_t>(j)] = j;
    }

    std::map<std::string, double> dist;
    const auto& amps = state.amplitudes();
    for (std::size_t basis = 0; basis < amps.size(); ++basis) {
        double p = std::norm(amps[basis]);
        if (p == 0.0) continue;
        std::string key(static_cast<std::size_t>(width), '0');
        for (int j = 0; j < width; ++j) {
            int q = clbit_source[static_cast<std::size_t>(j)];
            if (q >= 0 && (basis & (std::size_t{1} << q)))
                key[static_cast<std::size_t>(width - 1 - j)] = '1';
        }
        dist[key] += p;
    }
    for (auto it = dist.begin(); it != dist.end();) {
        if (it->second < 1e-12) {
            it = dist.erase(it);
        } else {
            ++it;
        }
    }
    return dist;
}

}  // namespace qvm
