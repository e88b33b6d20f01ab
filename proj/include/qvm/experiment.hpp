#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qvm/allocator.hpp"
#include "qvm/metrics.hpp"
#include "qvm/qasm.hpp"
#include "qvm/regions.hpp"
#include "qvm/router.hpp"
#include "qvm/simulator.hpp"

namespace qvm {

// One named circuit in a workload. Ids must be unique per workload; they key
// everything downstream (seeds, reports, demultiplexed counts).
struct WorkloadItem {
    std::string circuit_id;
    CircuitIR circuit;
};

// Outcome of one circuit through the pipeline.
struct RunResult {
    std::string circuit_id;
    Counts counts;
    int shots = 0;
    double d_l1 = 0.0;      // L1 distance to the ideal distribution, in [0, 2]
    double fidelity = 0.0;  // 1 - d_l1 / 2
    int swap_count = 0;
    std::vector<int> footprint;  // physical vertices granted, sorted
    int job_index = -1;          // which executed job carried this circuit
};

struct ExperimentReport {
    int batch_cap = 0;
    int shots = 0;
    std::uint64_t seed = 0;
    int jobs_used = 0;
    double cost_reduction = 0.0;  // 1 - jobs_used / workload size
    double mean_fidelity = 0.0;   // over completed circuits, equal weight
    double std_fidelity = 0.0;    // population convention
    std::vector<RunResult> results;  // workload order, completed circuits only
    std::vector<std::string> infeasible;
    // Transpile cache traffic: repeats of the same circuit structure on the
    // same footprint reuse the routed result instead of routing again.
    int cache_hits = 0;
    int cache_misses = 0;
};

struct ExperimentOptions {
    AllocPolicy policy;
    RouteMetric metric = RouteMetric::error;
    bool parallel = false;  // OpenMP over shots inside the simulator
};

// Full pipeline over one workload: schedule into batches against the region
// pool, route each admitted circuit onto its granted footprint, combine each
// batch into a composite program, sample it, demultiplex, and score every
// circuit against its ideal distribution.
//
// Every composite is sampled with the same root seed; the simulator derives
// per-segment streams from the circuit id, so a circuit's counts do not
// depend on which batch it landed in or who its neighbors were.
ExperimentReport run_experiment(const HardwareGraph& g, const RegionPool& pool,
                                const std::vector<WorkloadItem>& workload, int batch_cap,
                                const NoiseModel& noise, int shots, std::uint64_t seed,
                                const ExperimentOptions& opts = {});

struct BaselineOptions {
    // Noise-blind routing is the point of the baseline, so hop count is the
    // default metric here, not error weight.
    RouteMetric metric = RouteMetric::hops;
    // Optional forced placements by circuit id, e.g. to pin a circuit onto a
    // known-bad corridor when studying defective hardware.
    std::map<std::string, std::vector<int>> pinned_layouts;
    bool parallel = false;
};

// Comparison arm without region discovery: every circuit routes on the full
// device graph and runs as its own job. jobs_used equals the workload size
// and cost_reduction is zero by construction. Per-circuit seeds are derived
// exactly as in run_experiment so the two arms are sample-for-sample
// comparable.
ExperimentReport run_baseline(const HardwareGraph& g, const std::vector<WorkloadItem>& workload,
                              const NoiseModel& noise, int shots, std::uint64_t seed,
                              const BaselineOptions& opts = {});

// One point of a batch-size sweep: fidelity statistics pooled over every
// completed circuit and every seed at that cap.
struct BatchPoint {
    int batch_cap = 0;
    int jobs_used = 0;
    double cost_reduction = 0.0;
    double mean_fidelity = 0.0;
    double std_fidelity = 0.0;
    int infeasible = 0;
};

struct SweepResult {
    std::vector<BatchPoint> points;
    double pearson_r = 0.0;  // correlation of batch cap against mean fidelity
};

// Fidelity-versus-batch-size study with placements held fixed. A single
// scheduling pass at unbounded cap grants every circuit its footprint once;
// each sweep cap then regroups those placements into composite jobs of at
// most `cap` consecutive circuits, never regrouping across the canonical
// job boundaries (which is what keeps every chunk's footprints disjoint).
// Batching is thereby the only variable under study: a circuit keeps its
// region, its routed form, and its sample stream at every cap, and the
// correlation measures exactly what grouping adds. Without a crosstalk
// model that is nothing, so the curve is flat; on hardware the same sweep
// would expose batching-induced interference.
SweepResult sweep_batch_caps(const HardwareGraph& g, const RegionPool& pool,
                             const std::vector<WorkloadItem>& workload,
                             const std::vector<int>& caps, const NoiseModel& noise, int shots,
                             const std::vector<std::uint64_t>& seeds,
                             const ExperimentOptions& opts = {});

}  // namespace qvm
