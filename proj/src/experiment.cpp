#include "qvm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qvm/composite.hpp"
#include "qvm/error.hpp"
#include "qvm/statevector.hpp"

namespace qvm {

namespace {

// Routed circuits keyed by (circuit structure, footprint). The device graph
// is fixed for the lifetime of one experiment, so the sorted vertex list
// identifies the induced subgraph completely.
class TranspileCache {
  public:
    const RoutedCircuit& get(const CircuitIR& circuit, const HardwareGraph& g,
                             const std::vector<int>& footprint, std::uint64_t seed,
                             RouteMetric metric) {
        Key key{structural_hash(circuit), footprint};
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            ++hits_;
            return it->second;
        }
        ++misses_;
        RouterOptions opts;
        opts.metric = metric;
        RoutedCircuit routed = route(circuit, g.induced(footprint), seed, opts);
        return cache_.emplace(std::move(key), std::move(routed)).first->second;
    }

    int hits() const { return hits_; }
    int misses() const { return misses_; }

  private:
    using Key = std::pair<std::uint64_t, std::vector<int>>;
    std::map<Key, RoutedCircuit> cache_;
    int hits_ = 0;
    int misses_ = 0;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd fidelity_stats(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size()));
    return out;
}

void finalize_stats(ExperimentReport& report) {
    std::vector<double> f;
    f.reserve(report.results.size());
    for (const RunResult& r : report.results) f.push_back(r.fidelity);
    MeanStd stats = fidelity_stats(f);
    report.mean_fidelity = stats.mean;
    report.std_fidelity = stats.std;
}

std::map<std::string, const WorkloadItem*> index_workload(
    const std::vector<WorkloadItem>& workload) {
    std::map<std::string, const WorkloadItem*> by_id;
    for (const WorkloadItem& item : workload) {
        if (item.circuit_id.empty()) throw ValidationError("workload circuit id is empty");
        if (!by_id.emplace(item.circuit_id, &item).second)
            throw ValidationError("duplicate circuit id '" + item.circuit_id + "' in workload");
    }
    return by_id;
}

}  // namespace

ExperimentReport run_experiment(const HardwareGraph& g, const RegionPool& pool,
                                const std::vector<WorkloadItem>& workload, int batch_cap,
                                const NoiseModel& noise, int shots, std::uint64_t seed,
                                const ExperimentOptions& opts) {
    if (shots < 1) throw ValidationError("shots must be positive");
    auto by_id = index_workload(workload);

    std::vector<AllocationRequest> requests;
    requests.reserve(workload.size());
    for (const WorkloadItem& item : workload)
        requests.push_back({item.circuit_id, item.circuit.num_qubits});

    // Ideal distributions are computed on first use so that circuits the
    // scheduler rejects (too wide for any region) never hit the statevector
    // width cap here.
    std::map<std::string, Distribution> ideals;
    auto ideal_of = [&](const std::string& id) -> const Distribution& {
        auto it = ideals.find(id);
        if (it == ideals.end())
            it = ideals.emplace(id, ideal_distribution(by_id.at(id)->circuit)).first;
        return it->second;
    };

    TranspileCache cache;
    std::map<std::string, RunResult> done;

    BatchExecutor executor = [&](int job_index, const std::vector<Allocation>& allocations) {
        std::vector<std::pair<std::string, RoutedCircuit>> parts;
        parts.reserve(allocations.size());
        for (const Allocation& a : allocations) {
            const WorkloadItem& item = *by_id.at(a.circuit_id);
            parts.emplace_back(a.circuit_id, cache.get(item.circuit, g, a.physical_vertices,
                                                       seed, opts.metric));
        }
        CompositeCircuit comp = combine(parts);
        SegmentCounts split =
            demultiplex(comp, simulate_composite(comp, noise, shots, seed, opts.parallel));

        for (const Allocation& a : allocations) {
            RunResult r;
            r.circuit_id = a.circuit_id;
            r.counts = split.at(a.circuit_id);
            r.shots = shots;
            r.d_l1 = l1_distance(normalize(r.counts), ideal_of(a.circuit_id));
            r.fidelity = fidelity_from_l1(r.d_l1);
            r.swap_count = comp.find(a.circuit_id)->routed.swap_count;
            r.footprint = a.physical_vertices;
            r.job_index = job_index;
            done[a.circuit_id] = std::move(r);
        }
    };

    BatchReport sched = schedule_batches(g, pool, requests, batch_cap, executor, opts.policy);

    ExperimentReport report;
    report.batch_cap = batch_cap;
    report.shots = shots;
    report.seed = seed;
    report.jobs_used = sched.jobs_used;
    report.cost_reduction = sched.cost_reduction(workload.size());
    report.infeasible = sched.infeasible;
    report.cache_hits = cache.hits();
    report.cache_misses = cache.misses();
    for (const WorkloadItem& item : workload) {
        auto it = done.find(item.circuit_id);
        if (it != done.end()) report.results.push_back(std::move(it->second));
    }
    finalize_stats(report);
    return report;
}

ExperimentReport run_baseline(const HardwareGraph& g, const std::vector<WorkloadItem>& workload,
                              const NoiseModel& noise, int shots, std::uint64_t seed,
                              const BaselineOptions& opts) {
    if (shots < 1) throw ValidationError("shots must be positive");
    index_workload(workload);  // uniqueness check only

    ExperimentReport report;
    report.batch_cap = 1;
    report.shots = shots;
    report.seed = seed;
    for (std::size_t i = 0; i < workload.size(); ++i) {
        const WorkloadItem& item = workload[i];
        RouterOptions ropts;
        ropts.metric = opts.metric;
        auto pinned = opts.pinned_layouts.find(item.circuit_id);
        if (pinned != opts.pinned_layouts.end()) ropts.initial_layout = pinned->second;

        RoutedCircuit routed = route(item.circuit, g, seed, ropts);
        Counts counts = simulate(routed, noise, shots, segment_seed(seed, item.circuit_id),
                                 opts.parallel);

        RunResult r;
        r.circuit_id = item.circuit_id;
        r.counts = std::move(counts);
        r.shots = shots;
        r.d_l1 = l1_distance(normalize(r.counts), ideal_distribution(item.circuit));
        r.fidelity = fidelity_from_l1(r.d_l1);
        r.swap_count = routed.swap_count;
        r.footprint = routed.active_vertices();
        r.job_index = static_cast<int>(i);
        report.results.push_back(std::move(r));
    }
    report.jobs_used = static_cast<int>(workload.size());
    report.cost_reduction = 0.0;
    finalize_stats(report);
    return report;
}

SweepResult sweep_batch_caps(const HardwareGraph& g, const RegionPool& pool,
                             const std::vector<WorkloadItem>& workload,
                             const std::vector<int>& caps, const NoiseModel& noise, int shots,
                             const std::vector<std::uint64_t>& seeds,
                             const ExperimentOptions& opts) {
    if (workload.empty()) throw ValidationError("batch cap sweep needs a workload");
    if (caps.empty()) throw ValidationError("batch cap sweep needs at least one cap");
    if (seeds.empty()) throw ValidationError("batch cap sweep needs at least one seed");
    for (int cap : caps)
        if (cap < 1) throw ValidationError("batch caps must be positive");
    auto by_id = index_workload(workload);

    // Canonical placement pass: schedule once with the cap wide open and
    // remember each job's allocations in admission order.
    std::vector<AllocationRequest> requests;
    requests.reserve(workload.size());
    for (const WorkloadItem& item : workload)
        requests.push_back({item.circuit_id, item.circuit.num_qubits});

    std::vector<std::vector<Allocation>> placement_groups;
    BatchExecutor capture = [&](int, const std::vector<Allocation>& allocations) {
        placement_groups.push_back(allocations);
    };
    BatchReport canonical = schedule_batches(g, pool, requests,
                                             static_cast<int>(workload.size()), capture,
                                             opts.policy);

    // Route every placed circuit once; placements never change again.
    RouterOptions ropts;
    ropts.metric = opts.metric;
    std::map<std::string, RoutedCircuit> routed;
    std::map<std::string, Distribution> ideals;
    for (const auto& group : placement_groups) {
        for (const Allocation& a : group) {
            const CircuitIR& circuit = by_id.at(a.circuit_id)->circuit;
            routed.emplace(a.circuit_id,
                           route(circuit, g.induced(a.physical_vertices), seeds[0], ropts));
            ideals.emplace(a.circuit_id, ideal_distribution(circuit));
        }
    }

    SweepResult sweep;
    std::vector<double> xs;
    std::vector<double> ys;
    for (int cap : caps) {
        BatchPoint point;
        point.batch_cap = cap;
        point.infeasible = static_cast<int>(canonical.infeasible.size());

        int chunk_jobs = 0;
        std::vector<double> pooled;
        for (std::uint64_t seed : seeds) {
            int jobs_this_seed = 0;
            for (const auto& group : placement_groups) {
                for (std::size_t begin = 0; begin < group.size();
                     begin += static_cast<std::size_t>(cap)) {
                    std::size_t end =
                        std::min(group.size(), begin + static_cast<std::size_t>(cap));
                    std::vector<std::pair<std::string, RoutedCircuit>> parts;
                    for (std::size_t i = begin; i < end; ++i)
                        parts.emplace_back(group[i].circuit_id,
                                           routed.at(group[i].circuit_id));
                    CompositeCircuit comp = combine(parts);
                    SegmentCounts split = demultiplex(
                        comp, simulate_composite(comp, noise, shots, seed, opts.parallel));
                    for (std::size_t i = begin; i < end; ++i) {
                        const std::string& id = group[i].circuit_id;
                        double d = l1_distance(normalize(split.at(id)), ideals.at(id));
                        pooled.push_back(fidelity_from_l1(d));
                    }
                    ++jobs_this_seed;
                }
            }
            chunk_jobs = jobs_this_seed;
        }
        point.jobs_used = chunk_jobs;
        point.cost_reduction =
            1.0 - static_cast<double>(chunk_jobs) / static_cast<double>(workload.size());
        MeanStd stats = fidelity_stats(pooled);
        point.mean_fidelity = stats.mean;
        point.std_fidelity = stats.std;
        sweep.points.push_back(point);
        xs.push_back(static_cast<double>(cap));
        ys.push_back(point.mean_fidelity);
    }
    sweep.pearson_r = pearson(xs, ys);
    return sweep;
}

}  // namespace qvm
