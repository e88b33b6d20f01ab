#include "qvm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qvm/error.hpp"

namespace qvm {

using json = nlohmann::json;

namespace {

std::vector<double> weight_vector(const json& j, const std::string& key, std::size_t len) {
    const json& arr = j.at(key);
    if (!arr.is_array() || arr.size() != len)
        throw ValidationError("config key '" + key + "' must be an array of " +
                              std::to_string(len) + " numbers");
    std::vector<double> out;
    for (const json& v : arr) {
        if (!v.is_number()) throw ValidationError("config key '" + key + "' has a non-number entry");
        double x = v.get<double>();
        if (!std::isfinite(x) || x < 0.0)
            throw ValidationError("config key '" + key + "' has a negative or non-finite entry");
        out.push_back(x);
    }
    return out;
}

}  // namespace

Config parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config root must be a JSON object");

    static const char* known[] = {"score_weights", "fitness_weights", "compose_weights",
                                  "min_region_size", "shots", "seed"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ValidationError("unknown config key '" + key + "'");
    }

    Config cfg;
    if (j.contains("score_weights")) {
        auto w = weight_vector(j, "score_weights", 4);
        double sum = w[0] + w[1] + w[2] + w[3];
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValidationError("score_weights must sum to 1, got " + std::to_string(sum));
        cfg.score_weights = {w[0], w[1], w[2], w[3]};
    }
    if (j.contains("fitness_weights")) {
        auto w = weight_vector(j, "fitness_weights", 3);
        cfg.alloc.fit_size = w[0];
        cfg.alloc.fit_conn = w[1];
        cfg.alloc.fit_q = w[2];
    }
    if (j.contains("compose_weights")) {
        auto w = weight_vector(j, "compose_weights", 3);
        cfg.alloc.comp_q = w[0];
        cfg.alloc.comp_conn = w[1];
        cfg.alloc.comp_bridge = w[2];
    }
    if (j.contains("min_region_size")) {
        if (!j["min_region_size"].is_number_integer())
            throw ValidationError("min_region_size must be an integer");
        cfg.min_region_size = j["min_region_size"].get<int>();
        if (cfg.min_region_size < 2)
            throw ValidationError("min_region_size must be at least 2");
    }
    if (j.contains("shots")) {
        if (!j["shots"].is_number_integer()) throw ValidationError("shots must be an integer");
        cfg.shots = j["shots"].get<int>();
        if (cfg.shots < 1) throw ValidationError("shots must be positive");
    }
    if (j.contains("seed")) {
        const json& s = j["seed"];
        if (!s.is_number_integer()) throw ValidationError("seed must be a nonnegative integer");
        if (!s.is_number_unsigned() && s.get<long long>() < 0)
            throw ValidationError("seed must be a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const Config& cfg) {
    json j;
    j["score_weights"] = {cfg.score_weights.conn, cfg.score_weights.gate,
                          cfg.score_weights.readout, cfg.score_weights.uniformity};
    j["fitness_weights"] = {cfg.alloc.fit_size, cfg.alloc.fit_conn, cfg.alloc.fit_q};
    j["compose_weights"] = {cfg.alloc.comp_q, cfg.alloc.comp_conn, cfg.alloc.comp_bridge};
    j["min_region_size"] = cfg.min_region_size;
    j["shots"] = cfg.shots;
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

}  // namespace qvm
