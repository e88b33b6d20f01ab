#include "qvm/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qvm/error.hpp"

namespace qvm {

using json = nlohmann::json;

const QubitProps* CalibrationSnapshot::find_qubit(int index) const {
    for (const auto& q : qubits)
        if (q.index == index) return &q;
    return nullptr;
}

CouplerProps* CalibrationSnapshot::find_coupler(int q0, int q1) {
    for (auto& c : couplers)
        if ((c.q0 == q0 && c.q1 == q1) || (c.q0 == q1 && c.q1 == q0)) return &c;
    return nullptr;
}

const CouplerProps* CalibrationSnapshot::find_coupler(int q0, int q1) const {
    return const_cast<CalibrationSnapshot*>(this)->find_coupler(q0, q1);
}

namespace {

double require_rate(const json& j, const char* field, const std::string& who) {
    if (!j.contains(field))
        throw ValidationError(who + ": missing field '" + field + "'");
    if (!j[field].is_number())
        throw ValidationError(who + ": field '" + field + "' is not a number");
    double v = j[field].get<double>();
    if (v < 0.0 || v > 1.0)
        throw ValidationError(who + ": " + field + " = " + std::to_string(v) +
                              " outside [0, 1]");
    return v;
}

}  // namespace

CalibrationSnapshot parse_snapshot(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("calibration JSON: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("calibration JSON: root is not an object");

    CalibrationSnapshot snap;
    snap.device = root.value("device", std::string{});
    snap.timestamp = root.value("timestamp", std::string{});

    if (!root.contains("qubits") || !root["qubits"].is_array())
        throw ValidationError("calibration JSON: missing 'qubits' array");
    if (!root.contains("couplers") || !root["couplers"].is_array())
        throw ValidationError("calibration JSON: missing 'couplers' array");

    std::set<int> seen;
    for (const auto& jq : root["qubits"]) {
        QubitProps q;
        if (!jq.contains("index") || !jq["index"].is_number_integer())
            throw ValidationError("qubit entry without integer 'index'");
        q.index = jq["index"].get<int>();
        std::string who = "qubit " + std::to_string(q.index);
        if (q.index < 0) throw ValidationError(who + ": negative index");
        if (!seen.insert(q.index).second)
            throw ValidationError("duplicate qubit index " + std::to_string(q.index));
        q.t1_us = jq.value("t1_us", 0.0);
        q.t2_us = jq.value("t2_us", 0.0);
        q.readout_error = require_rate(jq, "readout_error", who);
        q.operational = jq.value("operational", true);
        snap.qubits.push_back(q);
    }

    std::set<std::pair<int, int>> seen_pairs;
    for (const auto& jc : root["couplers"]) {
        CouplerProps c;
        if (!jc.contains("q0") || !jc.contains("q1"))
            throw ValidationError("coupler entry without q0/q1");
        c.q0 = jc["q0"].get<int>();
        c.q1 = jc["q1"].get<int>();
        std::string who = "coupler (" + std::to_string(c.q0) + ", " + std::to_string(c.q1) + ")";
        if (c.q0 == c.q1) throw ValidationError(who + ": self loop");
        if (!seen.count(c.q0))
            throw ValidationError(who + ": endpoint " + std::to_string(c.q0) +
                                  " is not a declared qubit");
        if (!seen.count(c.q1))
            throw ValidationError(who + ": endpoint " + std::to_string(c.q1) +
                                  " is not a declared qubit");
        auto key = std::minmax(c.q0, c.q1);
        if (!seen_pairs.insert(key).second) throw ValidationError("duplicate " + who);
        c.gate_error = require_rate(jc, "gate_error", who);
        c.operational = jc.value("operational", true);
        snap.couplers.push_back(c);
    }
    return snap;
}

std::string snapshot_to_json(const CalibrationSnapshot& snap) {
    json root;
    root["device"] = snap.device;
    root["timestamp"] = snap.timestamp;
    root["qubits"] = json::array();
    for (const auto& q : snap.qubits) {
        root["qubits"].push_back({{"index", q.index},
                                  {"t1_us", q.t1_us},
                                  {"t2_us", q.t2_us},
                                  {"readout_error", q.readout_error},
                                  {"operational", q.operational}});
    }
    root["couplers"] = json::array();
    for (const auto& c : snap.couplers) {
        root["couplers"].push_back({{"q0", c.q0},
                                    {"q1", c.q1},
                                    {"gate_error", c.gate_error},
                                    {"operational", c.operational}});
    }
    return root.dump(2) + "\n";
}

namespace {

// Geometry shared by the generator and heavy_hex_column. Chains are indexed
// 0..rows and live at even y; the gap below chain i holds its bridges.
struct HexLayout {
    int rows, cols, chain_len;

    explicit HexLayout(int rows, int cols)
        : rows(rows), cols(cols), chain_len(4 * cols + 1) {}

    std::vector<int> bridge_columns(int gap) const {
        std::vector<int> out;
        int start = (gap % 2 == 0) ? 0 : 2;
        for (int c = start; c < chain_len; c += 4) out.push_back(c);
        return out;
    }

    // id layout: chain 0, gap 0 bridges, chain 1, gap 1 bridges, ...
    int chain_base(int chain) const {
        int base = 0;
        for (int i = 0; i < chain; ++i)
            base += chain_len + static_cast<int>(bridge_columns(i).size());
        return base;
    }

    // Last chain has no gap below it.
    int total() const { return chain_base(rows) + chain_len; }
};

double clamp_rate(double v) { return std::min(0.9, std::max(1e-4, v)); }

}  // namespace

CalibrationSnapshot generate_heavy_hex(int rows, int cols, const ErrorProfile& profile) {
    if (rows < 1 || cols < 1)
        throw ValidationError("heavy-hex generator: rows and cols must be >= 1");
    HexLayout lay(rows, cols);

    // Column coordinate per qubit id, for zone assignment.
    std::vector<double> column;
    std::vector<std::pair<int, int>> edges;  // by qubit id
    int id = 0;
    std::vector<int> chain_start(rows + 2, 0);
    for (int chain = 0; chain <= rows; ++chain) {
        chain_start[chain] = id;
        for (int c = 0; c < lay.chain_len; ++c) {
            if (c > 0) edges.emplace_back(id - 1, id);
            column.push_back(static_cast<double>(c));
            ++id;
        }
        if (chain < rows) {
            for (int c : lay.bridge_columns(chain)) {
                // Bridge below (chain, c); the matching vertex of chain+1 is
                // wired up once that chain has been numbered.
                column.push_back(static_cast<double>(c));
                ++id;
            }
        }
    }
    chain_start[rows + 1] = id;
    // Bridge edges, second pass now that all chain bases are known.
    id = 0;
    for (int chain = 0; chain <= rows; ++chain) {
        id += lay.chain_len;
        if (chain < rows) {
            for (int c : lay.bridge_columns(chain)) {
                edges.emplace_back(chain_start[chain] + c, id);
                edges.emplace_back(id, chain_start[chain + 1] + c);
                ++id;
            }
        }
    }
    int n = lay.total();

    // Zone means: alternating mean*(1 -/+ delta) with delta chosen so the
    // overall sample std lands near gate_error_std (between-zone spread
    // carries 3/4 of the variance, within-zone noise the rest).
    int zones = std::max(0, profile.clusters);
    std::vector<double> zone_mean = profile.zone_means;
    double within_std = profile.gate_error_std;
    if (zones >= 2) {
        within_std = profile.gate_error_std / 2.0;
        if (zone_mean.empty()) {
            double delta = std::sqrt(3.0) / 2.0 * profile.gate_error_std / profile.gate_error_mean;
            for (int z = 0; z < zones; ++z) {
                double sign = (z % 2 == 0) ? -1.0 : 1.0;
                zone_mean.push_back(profile.gate_error_mean * (1.0 + sign * delta));
            }
        }
    }
    double max_col = 4.0 * cols;
    auto zone_of = [&](double col) {
        if (zones < 2) return 0;
        int z = static_cast<int>(col / (max_col + 1e-9) * zones);
        return std::min(z, zones - 1);
    };

    std::mt19937_64 rng(profile.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    CalibrationSnapshot snap;
    snap.device = "heavyhex-" + std::to_string(rows) + "x" + std::to_string(cols);
    snap.timestamp = "2025-01-01T00:00:00Z";  // fixed: outputs must be reproducible
    for (int q = 0; q < n; ++q) {
        QubitProps props;
        props.index = q;
        props.t1_us = 150.0 + 50.0 * gauss(rng);
        props.t2_us = 100.0 + 40.0 * gauss(rng);
        props.readout_error =
            clamp_rate(profile.readout_error_mean + profile.readout_error_std * gauss(rng));
        snap.qubits.push_back(props);
    }
    for (auto [a, b] : edges) {
        CouplerProps c;
        c.q0 = a;
        c.q1 = b;
        double mid = 0.5 * (column[a] + column[b]);
        double mean = (zones >= 2) ? zone_mean[zone_of(mid) % zone_mean.size()]
                                   : profile.gate_error_mean;
        c.gate_error = clamp_rate(mean + within_std * gauss(rng));
        snap.couplers.push_back(c);
    }
    std::sort(snap.couplers.begin(), snap.couplers.end(), [](const auto& x, const auto& y) {
        return std::pair(x.q0, x.q1) < std::pair(y.q0, y.q1);
    });
    return snap;
}

std::optional<double> heavy_hex_column(int rows, int cols, int qubit_index) {
    HexLayout lay(rows, cols);
    if (qubit_index < 0 || qubit_index >= lay.total()) return std::nullopt;
    int id = 0;
    for (int chain = 0; chain <= rows; ++chain) {
        if (qubit_index < id + lay.chain_len) return double(qubit_index - id);
        id += lay.chain_len;
        if (chain < rows) {
            auto bc = lay.bridge_columns(chain);
            if (qubit_index < id + static_cast<int>(bc.size()))
                return double(bc[qubit_index - id]);
            id += static_cast<int>(bc.size());
        }
    }
    return std::nullopt;
}

CalibrationSnapshot kill_couplers(const CalibrationSnapshot& snap,
                                  const std::vector<std::pair<int, int>>& couplers) {
    CalibrationSnapshot out = snap;
    for (auto [a, b] : couplers) {
        CouplerProps* c = out.find_coupler(a, b);
        if (!c)
            throw ValidationError("kill_couplers: no coupler (" + std::to_string(a) + ", " +
                                  std::to_string(b) + ")");
        c->operational = false;
    }
    return out;
}

CalibrationSnapshot degrade_couplers(const CalibrationSnapshot& snap,
                                     const std::vector<std::pair<int, int>>& couplers) {
    CalibrationSnapshot out = snap;
    for (auto [a, b] : couplers) {
        CouplerProps* c = out.find_coupler(a, b);
        if (!c)
            throw ValidationError("degrade_couplers: no coupler (" + std::to_string(a) + ", " +
                                  std::to_string(b) + ")");
        c->gate_error = 1.0;
        c->operational = true;
    }
    return out;
}

std::vector<std::pair<int, int>> sample_couplers(const CalibrationSnapshot& snap,
                                                 double fraction, std::uint64_t seed) {
    std::vector<std::pair<int, int>> alive;
    for (const auto& c : snap.couplers)
        if (c.operational) alive.emplace_back(c.q0, c.q1);
    std::mt19937_64 rng(seed);
    std::shuffle(alive.begin(), alive.end(), rng);
    auto count = static_cast<std::size_t>(fraction * static_cast<double>(alive.size()));
    alive.resize(std::min(count, alive.size()));
    std::sort(alive.begin(), alive.end());
    return alive;
}

}  // namespace qvm
