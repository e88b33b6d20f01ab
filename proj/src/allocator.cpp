#include "qvm/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace qvm {

double size_score(int region_size, int n) {
    if (region_size < n) return 0.0;
    if (region_size == n) return 1.0;
    return std::exp(-0.5 * static_cast<double>(region_size - n) / static_cast<double>(n));
}

double fitness(const Region& region, int n, const AllocPolicy& policy) {
    if (static_cast<int>(region.vertices.size()) < n) return 0.0;
    return policy.fit_size * size_score(static_cast<int>(region.vertices.size()), n) +
           policy.fit_conn * region.scores.s_conn + policy.fit_q * region.scores.q;
}

double bridge_score(const std::vector<GraphEdge>& bridge_edges) {
    if (bridge_edges.empty()) return 0.0;
    double mean = 0.0;
    for (const auto& e : bridge_edges) mean += e.gate_error;
    mean /= static_cast<double>(bridge_edges.size());
    return std::max(0.0, 1.0 - 100.0 * mean);
}

namespace {

// Placeholder logical-to-physical map: the first `width` footprint vertices
// in ascending order. The router replaces it with a routing-aware layout.
std::vector<int> identity_layout(const std::vector<int>& footprint, int width) {
    return {footprint.begin(), footprint.begin() + width};
}

}  // namespace

AllocationState::AllocationState(const HardwareGraph& g, RegionPool pool, AllocPolicy policy)
    : graph_(&g), pool_(std::move(pool)), policy_(policy) {}

const Allocation& AllocationState::allocate(const AllocationRequest& req) {
    if (req.width < 1)
        throw ValidationError("allocate: width must be positive for '" + req.circuit_id + "'");
    if (active_.count(req.circuit_id))
        throw ValidationError("allocate: circuit '" + req.circuit_id + "' is already active");
    if (req.width > static_cast<int>(graph_->num_vertices()))
        throw WidthExceedsHardware("circuit '" + req.circuit_id + "' needs " +
                                   std::to_string(req.width) + " qubits but the device has " +
                                   std::to_string(graph_->num_vertices()));

    const Region* best = nullptr;
    double best_f = -1.0;
    for (const auto& r : pool_.regions) {
        if (busy_.count(r.id) || static_cast<int>(r.vertices.size()) < req.width) continue;
        double f = fitness(r, req.width, policy_);
        bool wins = best == nullptr || f > best_f;
        if (!wins && f == best_f) {
            // Equal fitness: waste less first, then keep ids stable.
            wins = r.vertices.size() < best->vertices.size() ||
                   (r.vertices.size() == best->vertices.size() && r.id < best->id);
        }
        if (wins) {
            best = &r;
            best_f = f;
        }
    }

    Allocation a;
    if (best != nullptr) {
        a.circuit_id = req.circuit_id;
        a.width = req.width;
        a.region_ids = {best->id};
        a.physical_vertices = best->vertices;
        a.pi = identity_layout(a.physical_vertices, req.width);
        a.footprint_scores = best->scores;
    } else {
        if (busy_.size() == pool_.regions.size())
            throw NoFeasibleRegion("no free region for circuit '" + req.circuit_id + "'");
        a = compose(req);
    }
    for (int rid : a.region_ids) busy_.insert(rid);
    auto [it, inserted] = active_.emplace(req.circuit_id, std::move(a));
    (void)inserted;
    return it->second;
}

Allocation AllocationState::compose(const AllocationRequest& req) {
    std::vector<const Region*> free;
    for (const auto& r : pool_.regions) {
        if (!busy_.count(r.id)) free.push_back(&r);
    }

    // Seed with the largest free region, lowest id on ties.
    const Region* seed = free.front();
    for (const Region* r : free) {
        if (r->vertices.size() > seed->vertices.size() ||
            (r->vertices.size() == seed->vertices.size() && r->id < seed->id))
            seed = r;
    }

    std::vector<const Region*> parts{seed};
    std::set<int> part_ids{seed->id};
    std::vector<int> footprint = seed->vertices;
    std::set<int> inside(footprint.begin(), footprint.end());

    auto bridges_to = [&](const Region* cand) {
        std::vector<GraphEdge> bridges;
        for (int v : cand->vertices) {
            for (int nb : graph_->neighbors(v)) {
                if (!inside.count(nb)) continue;
                const GraphEdge* e = graph_->find_edge(v, nb);
                bridges.push_back(*e);
            }
        }
        std::sort(bridges.begin(), bridges.end(), [](const GraphEdge& x, const GraphEdge& y) {
            return std::pair(x.u, x.v) < std::pair(y.u, y.v);
        });
        return bridges;
    };

    while (static_cast<int>(footprint.size()) < req.width) {
        const Region* pick = nullptr;
        double pick_s = -1.0;
        for (const Region* cand : free) {
            if (part_ids.count(cand->id)) continue;
            std::vector<GraphEdge> bridges = bridges_to(cand);
            if (bridges.empty()) continue;  // not adjacent to the footprint

            std::vector<int> merged = footprint;
            merged.insert(merged.end(), cand->vertices.begin(), cand->vertices.end());
            std::sort(merged.begin(), merged.end());
            double conn = score_region(*graph_, merged).s_conn;
            double s = policy_.comp_q * cand->scores.q + policy_.comp_conn * conn +
                       policy_.comp_bridge * bridge_score(bridges);
            if (pick == nullptr || s > pick_s || (s == pick_s && cand->id < pick->id)) {
                pick = cand;
                pick_s = s;
            }
        }
        if (pick == nullptr)
            throw CompositionFailed("composition stuck at " + std::to_string(footprint.size()) +
                                    " of " + std::to_string(req.width) + " qubits for '" +
                                    req.circuit_id + "'");
        parts.push_back(pick);
        part_ids.insert(pick->id);
        footprint.insert(footprint.end(), pick->vertices.begin(), pick->vertices.end());
        std::sort(footprint.begin(), footprint.end());
        inside.insert(pick->vertices.begin(), pick->vertices.end());
    }

    Allocation a;
    a.circuit_id = req.circuit_id;
    a.width = req.width;
    a.composed = true;
    for (const Region* p : parts) a.region_ids.push_back(p->id);
    a.physical_vertices = footprint;
    a.pi = identity_layout(footprint, req.width);

    // Every coupler joining two different constituents is a bridge.
    std::map<int, int> region_of;
    for (const Region* p : parts)
        for (int v : p->vertices) region_of[v] = p->id;
    for (const auto& e : induced_edges(*graph_, footprint)) {
        if (region_of.at(e.u) != region_of.at(e.v)) a.bridge_edges.push_back(e);
    }

    a.footprint_scores = score_region(*graph_, footprint);  // also checks connectivity
    return a;
}

void AllocationState::release(const std::string& circuit_id) {
    auto it = active_.find(circuit_id);
    if (it == active_.end())
        throw ValidationError("release: circuit '" + circuit_id + "' is not active");
    for (int rid : it->second.region_ids) busy_.erase(rid);
    active_.erase(it);
}

BatchReport schedule_batches(const HardwareGraph& g, const RegionPool& pool,
                             const std::vector<AllocationRequest>& workload, int batch_cap,
                             const BatchExecutor& on_execute, const AllocPolicy& policy) {
    if (batch_cap < 1) throw ValidationError("schedule_batches: batch_cap must be >= 1");

    BatchReport report;
    AllocationState state(g, pool, policy);
    std::deque<AllocationRequest> arrivals(workload.begin(), workload.end());
    std::deque<AllocationRequest> retry;
    // Circuits that failed against the fully free pool. Batch retries
    // cannot help them (any batch offers at most that much), so they wait
    // for the final sweep and its verdict.
    std::deque<AllocationRequest> sweep_queue;

    while (!arrivals.empty() || !retry.empty()) {
        std::vector<AllocationRequest> attempts;
        while (static_cast<int>(attempts.size()) < batch_cap && !retry.empty()) {
            attempts.push_back(retry.front());
            retry.pop_front();
        }
        while (static_cast<int>(attempts.size()) < batch_cap && !arrivals.empty()) {
            attempts.push_back(arrivals.front());
            arrivals.pop_front();
        }

        BatchRecord rec;
        std::vector<Allocation> live;
        for (const auto& req : attempts) {
            try {
                const Allocation& a = state.allocate(req);
                rec.admitted.push_back(req.circuit_id);
                rec.regions_used += static_cast<int>(a.region_ids.size());
                live.push_back(a);
            } catch (const WidthExceedsHardware&) {
                report.infeasible.push_back(req.circuit_id);
            } catch (const AllocationError&) {
                if (live.empty()) {
                    // Nothing was held when this failed, so the whole pool
                    // was available. Only the sweep may look at it again.
                    sweep_queue.push_back(req);
                } else {
                    rec.deferred.push_back(req.circuit_id);
                    retry.push_back(req);
                }
            }
        }

        if (rec.admitted.empty()) continue;  // nothing ran; not a job

        int job = report.jobs_used++;
        if (on_execute) on_execute(job, live);
        for (const auto& id : rec.admitted) state.release(id);
        rec.queue_after = static_cast<int>(retry.size());
        report.batches.push_back(std::move(rec));
    }

    // Final sweep: one solo attempt per leftover against the free pool.
    while (!sweep_queue.empty()) {
        AllocationRequest req = sweep_queue.front();
        sweep_queue.pop_front();
        try {
            const Allocation& a = state.allocate(req);
            BatchRecord rec;
            rec.sweep = true;
            rec.admitted.push_back(req.circuit_id);
            rec.regions_used = static_cast<int>(a.region_ids.size());
            rec.queue_after = static_cast<int>(sweep_queue.size());
            int job = report.jobs_used++;
            if (on_execute) on_execute(job, {a});
            state.release(req.circuit_id);
            report.batches.push_back(std::move(rec));
        } catch (const AllocationError&) {
            report.infeasible.push_back(req.circuit_id);
        }
    }
    return report;
}

}  // namespace qvm
