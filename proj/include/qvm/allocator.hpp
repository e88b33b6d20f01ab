#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qvm/error.hpp"
#include "qvm/hardware_graph.hpp"
#include "qvm/regions.hpp"

namespace qvm {

// Allocation failures are control flow for the scheduler, not crashes. The
// three kinds differ in what the caller should do next: defer and retry
// (the first two) or give up on the circuit entirely (the third).
struct AllocationError : Error {
    using Error::Error;
};
struct NoFeasibleRegion : AllocationError {
    using AllocationError::AllocationError;
};
struct CompositionFailed : AllocationError {
    using AllocationError::AllocationError;
};
struct WidthExceedsHardware : AllocationError {
    using AllocationError::AllocationError;
};

struct AllocationRequest {
    std::string circuit_id;
    int width = 1;  // logical qubits needed
};

// A granted footprint. region_ids has one entry for a plain allocation and
// several for a composed one; physical_vertices is their union. pi starts
// as an identity placeholder over the first `width` vertices in sorted
// order and is overwritten by the router's layout pass.
struct Allocation {
    std::string circuit_id;
    int width = 0;
    std::vector<int> region_ids;
    std::vector<int> physical_vertices;  // sorted
    std::vector<int> pi;                 // logical index -> physical vertex
    bool composed = false;
    std::vector<GraphEdge> bridge_edges;  // inter-region couplers, composed only
    RegionScores footprint_scores;        // re-scored over the full footprint
};

// Allocation-time constants: fitness terms for single-region choice and
// marginal-score terms for composition. Change only via config.
struct AllocPolicy {
    double fit_size = 0.2;
    double fit_conn = 0.4;
    double fit_q = 0.4;
    double comp_q = 0.4;
    double comp_conn = 0.4;
    double comp_bridge = 0.2;
};

// Best-fit size preference: exact fit is ideal, oversize decays smoothly,
// undersize is forbidden outright.
double size_score(int region_size, int n);

// Allocation fitness F = 0.2 * size + 0.4 * s_conn + 0.4 * q. Returns 0 for
// undersized regions; callers must treat that as exclusion, not as a low
// score that a high q could rescue.
double fitness(const Region& region, int n, const AllocPolicy& policy = {});

// Interface quality of a set of bridge couplers: max(0, 1 - 100 * mean).
double bridge_score(const std::vector<GraphEdge>& bridge_edges);

// Occupancy tracker over a fixed pool. allocate and release keep the busy
// set equal to the union of active allocations' region ids at all times.
// Not internally synchronized; callers serialize access.
class AllocationState {
  public:
    AllocationState(const HardwareGraph& g, RegionPool pool, AllocPolicy policy = {});

    // Grants the best-fitting free region, falling back to greedy
    // multi-region composition when no single free region is wide enough.
    // Throws WidthExceedsHardware / NoFeasibleRegion / CompositionFailed.
    const Allocation& allocate(const AllocationRequest& req);

    // Frees every region of the circuit's allocation. Unknown or already
    // released ids raise ValidationError.
    void release(const std::string& circuit_id);

    bool is_busy(int region_id) const { return busy_.count(region_id) > 0; }
    std::size_t free_regions() const { return pool_.regions.size() - busy_.size(); }
    const RegionPool& pool() const { return pool_; }
    const std::map<std::string, Allocation>& active() const { return active_; }

  private:
    const HardwareGraph* graph_;
    RegionPool pool_;
    AllocPolicy policy_;
    std::set<int> busy_;
    std::map<std::string, Allocation> active_;

    Allocation compose(const AllocationRequest& req);
};

struct BatchRecord {
    std::vector<std::string> admitted;
    std::vector<std::string> deferred;  // failed in this batch, queued for retry
    int regions_used = 0;               // sum of region_ids sizes over admitted
    int queue_after = 0;                // retry queue length when the batch ended
    bool sweep = false;                 // true for final-sweep single executions
};

struct BatchReport {
    std::vector<BatchRecord> batches;  // executed batches only, sweep included
    std::vector<std::string> infeasible;
    int jobs_used = 0;

    double cost_reduction(std::size_t workload_size) const {
        if (workload_size == 0) return 0.0;
        return 1.0 - static_cast<double>(jobs_used) / static_cast<double>(workload_size);
    }
};

// Called once per executed job with the live allocations, before release.
using BatchExecutor = std::function<void(int job_index, const std::vector<Allocation>&)>;

// Two-level deferred-retry scheduling. Each batch drains the retry queue
// first, then new arrivals, up to batch_cap attempts; in-batch failures are
// re-queued. A circuit that fails while the batch holds nothing (so against
// the fully free pool) skips the retry queue and goes straight to the final
// sweep, which gives every leftover one last solo attempt on the free pool;
// sweep failures are reported infeasible. Requests whose width exceeds the
// hardware are infeasible immediately.
BatchReport schedule_batches(const HardwareGraph& g, const RegionPool& pool,
                             const std::vector<AllocationRequest>& workload, int batch_cap,
                             const BatchExecutor& on_execute = {}, const AllocPolicy& policy = {});

}  // namespace qvm
