#pragma once

#include <cstdint>
#include <string>

#include "qvm/allocator.hpp"
#include "qvm/regions.hpp"

namespace qvm {

// Every tunable constant of the pipeline in one overridable place. The
// weight vectors are positional: score_weights blends {conn, gate, readout,
// uniformity}, fitness_weights {size, conn, q}, compose_weights
// {q, conn, bridge}.
struct Config {
    ScoreWeights score_weights;
    AllocPolicy alloc;
    int min_region_size = 3;
    int shots = 1024;
    std::uint64_t seed = 1;
};

// Parses a JSON config. Schema, all keys optional:
//
//   {
//     "score_weights":   [0.25, 0.35, 0.20, 0.20],
//     "fitness_weights": [0.2, 0.4, 0.4],
//     "compose_weights": [0.4, 0.4, 0.2],
//     "min_region_size": 3,
//     "shots": 1024,
//     "seed": 1
//   }
//
// Weights must be nonnegative and score_weights must sum to 1 within 1e-9.
// Unknown keys are rejected so that a typo cannot silently fall back to a
// default.
Config parse_config(const std::string& json_text);

// parse_config over a file's contents.
Config load_config(const std::string& path);

// Inverse of parse_config, stable key order.
std::string config_to_json(const Config& cfg);

}  // namespace qvm
