#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qvm/experiment.hpp"
#include "qvm/hardware_graph.hpp"
#include "qvm/regions.hpp"

namespace qvm {

// Reads a workload manifest:
//
//   {"name": "...", "description": "...",
//    "circuits": [{"id": "bell", "file": "bell_n2.qasm"}, ...]}
//
// Circuit files are resolved relative to the manifest's directory and
// parsed as OpenQASM 2. The circuits array keeps its order; it is the
// arrival order the batch scheduler sees.
std::vector<WorkloadItem> load_workload(const std::string& manifest_path);

// Region pool persistence for the discover -> schedule/run handoff. The
// file stores vertex sets and scores; induced edges are a function of the
// snapshot, so parse_pool rebuilds them from the graph instead of trusting
// a second copy that could drift out of sync.
std::string pool_to_json(const RegionPool& pool);
RegionPool parse_pool(const std::string& json_text, const HardwareGraph& g);
RegionPool load_pool(const std::string& path, const HardwareGraph& g);

// One run's results on disk. baseline and sweep are optional sections;
// schema_version is bumped whenever the layout changes shape.
struct ReportFile {
    int schema_version = 1;
    int batch_cap = 0;
    int shots = 0;
    std::uint64_t seed = 0;
    ExperimentReport experiment;
    std::optional<ExperimentReport> baseline;
    std::optional<SweepResult> sweep;
};

std::string report_to_json(const ReportFile& report);
ReportFile parse_report(const std::string& json_text);
ReportFile load_report(const std::string& path);

// Reads a whole file into a string. Throws ValidationError when the file
// cannot be opened.
std::string read_text_file(const std::string& path);

// Writes text to a file, replacing any previous contents.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qvm
