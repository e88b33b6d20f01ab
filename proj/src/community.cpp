#include "qvm/community.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "qvm/error.hpp"

namespace qvm {

namespace {

// Mixes (seed, level, pass) into one RNG stream id so every pass gets an
// independent, reproducible shuffle.
std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// Dense weighted graph with self-loops; what the hierarchy levels operate
// on. strength[i] counts self-loops twice, total_w is half the strength sum.
struct WGraph {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<double> loop;
    std::vector<double> strength;
    double total_w = 0.0;

    void finish() {
        strength.assign(std::size_t(n), 0.0);
        for (int i = 0; i < n; ++i) {
            for (const auto& [j, w] : adj[std::size_t(i)]) strength[std::size_t(i)] += w;
            strength[std::size_t(i)] += 2.0 * loop[std::size_t(i)];
        }
        total_w = std::accumulate(strength.begin(), strength.end(), 0.0) / 2.0;
    }
};

WGraph level_zero(const HardwareGraph& g) {
    WGraph wg;
    wg.n = int(g.num_vertices());
    wg.adj.resize(std::size_t(wg.n));
    wg.loop.assign(std::size_t(wg.n), 0.0);
    for (const auto& e : g.edges()) {
        int u = g.dense_index(e.u), v = g.dense_index(e.v);
        wg.adj[std::size_t(u)].emplace_back(v, e.weight);
        wg.adj[std::size_t(v)].emplace_back(u, e.weight);
    }
    for (auto& a : wg.adj) std::sort(a.begin(), a.end());
    wg.finish();
    return wg;
}

constexpr double kPassGainFloor = 1e-7;

// One complete local-move phase: sweeps in the provided visit order until a
// full pass gains less than kPassGainFloor. comm is updated in place.
// Returns true when at least one move happened.
bool local_phase(const WGraph& wg, std::vector<int>& comm, int level, const VisitOrderFn& order) {
    std::vector<double> comm_strength(std::size_t(wg.n), 0.0);
    int max_comm = 0;
    for (int c : comm) max_comm = std::max(max_comm, c);
    comm_strength.resize(std::size_t(max_comm) + 1, 0.0);
    for (int i = 0; i < wg.n; ++i)
        comm_strength[std::size_t(comm[std::size_t(i)])] += wg.strength[std::size_t(i)];

    bool any_move = false;
    const double w = wg.total_w;
    for (int pass = 0;; ++pass) {
        double pass_gain = 0.0;
        std::vector<int> visit = order(level, pass, wg.n);
        for (int i : visit) {
            int home = comm[std::size_t(i)];
            // Links from i into each neighboring community.
            std::map<int, double> k_to;
            for (const auto& [j, wij] : wg.adj[std::size_t(i)])
                k_to[comm[std::size_t(j)]] += wij;
            double k_home = k_to.count(home) ? k_to[home] : 0.0;
            double s_i = wg.strength[std::size_t(i)];
            double s_home_less = comm_strength[std::size_t(home)] - s_i;

            double best_gain = 0.0;
            int best = home;
            for (const auto& [cand, k_cand] : k_to) {  // ascending id: ties keep the lowest
                if (cand == home) continue;
                double gain = (k_cand - k_home) / w -
                              s_i * (comm_strength[std::size_t(cand)] - s_home_less) /
                                  (2.0 * w * w);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = cand;
                }
            }
            if (best != home) {
                comm[std::size_t(i)] = best;
                comm_strength[std::size_t(home)] -= s_i;
                comm_strength[std::size_t(best)] += s_i;
                pass_gain += best_gain;
                any_move = true;
            }
        }
        if (pass_gain < kPassGainFloor) break;
    }
    return any_move;
}

// Contiguous community ids, ordered by first appearance along the given
// vertex order. Visit-order-based (not id-based) so that relabeled graphs
// walked in the corresponding order produce corresponding ids.
int relabel(std::vector<int>& comm, const std::vector<int>& scan_order) {
    std::map<int, int> remap;
    for (int i : scan_order) {
        int c = comm[std::size_t(i)];
        if (!remap.count(c)) {
            int next = int(remap.size());
            remap[c] = next;
        }
    }
    for (auto& c : comm) c = remap.at(c);
    return int(remap.size());
}

WGraph aggregate(const WGraph& wg, const std::vector<int>& comm, int k) {
    WGraph out;
    out.n = k;
    out.adj.resize(std::size_t(k));
    out.loop.assign(std::size_t(k), 0.0);
    std::map<std::pair<int, int>, double> between;
    for (int i = 0; i < wg.n; ++i) {
        int ci = comm[std::size_t(i)];
        out.loop[std::size_t(ci)] += wg.loop[std::size_t(i)];
        for (const auto& [j, wij] : wg.adj[std::size_t(i)]) {
            if (j < i) continue;  // each undirected edge once
            int cj = comm[std::size_t(j)];
            if (ci == cj)
                out.loop[std::size_t(ci)] += wij;
            else
                between[std::minmax(ci, cj)] += wij;
        }
    }
    for (const auto& [pair, wsum] : between) {
        out.adj[std::size_t(pair.first)].emplace_back(pair.second, wsum);
        out.adj[std::size_t(pair.second)].emplace_back(pair.first, wsum);
    }
    for (auto& a : out.adj) std::sort(a.begin(), a.end());
    out.finish();
    return out;
}

}  // namespace

Partition Partition::singletons(const HardwareGraph& g) {
    std::vector<int> comm(g.num_vertices());
    std::iota(comm.begin(), comm.end(), 0);
    return from_assignment(g, comm);
}

Partition Partition::from_assignment(const HardwareGraph& g, const std::vector<int>& comm_of_dense) {
    if (comm_of_dense.size() != g.num_vertices())
        throw ValidationError("partition: assignment size does not match vertex count");
    Partition p;
    std::map<int, int> remap;
    for (std::size_t d = 0; d < comm_of_dense.size(); ++d) {
        int c = comm_of_dense[d];
        auto [it, fresh] = remap.emplace(c, int(remap.size()));
        if (fresh) p.communities.emplace_back();
        p.communities[std::size_t(it->second)].push_back(g.physical_id(int(d)));
        p.community_of[g.physical_id(int(d))] = it->second;
    }
    for (auto& comm : p.communities) std::sort(comm.begin(), comm.end());
    return p;
}

double modularity(const HardwareGraph& g, const Partition& p) {
    if (g.num_edges() == 0)
        throw ValidationError("modularity: graph has no edges (total weight is zero)");
    std::unordered_map<int, double> strength;
    for (int v : g.vertices()) strength[v] = 0.0;
    for (const auto& e : g.edges()) {
        strength[e.u] += e.weight;
        strength[e.v] += e.weight;
    }
    double two_w = 0.0;
    for (const auto& [v, s] : strength) two_w += s;

    std::vector<double> internal(p.size(), 0.0);   // 2 * intra-community weight
    std::vector<double> comm_strength(p.size(), 0.0);
    for (const auto& e : g.edges()) {
        int cu = p.community_of.at(e.u), cv = p.community_of.at(e.v);
        if (cu == cv) internal[std::size_t(cu)] += 2.0 * e.weight;
    }
    for (int v : g.vertices()) comm_strength[std::size_t(p.community_of.at(v))] += strength[v];

    double q = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        double frac = comm_strength[c] / two_w;
        q += internal[c] / two_w - frac * frac;
    }
    return q;
}

double modularity_gain(const HardwareGraph& g, const Partition& p, int vertex,
                       int target_community) {
    if (target_community < 0 || std::size_t(target_community) >= p.size())
        throw ValidationError("modularity_gain: unknown target community " +
                              std::to_string(target_community));
    int home = p.community_of.at(vertex);
    if (home == target_community) return 0.0;
    if (g.num_edges() == 0) throw ValidationError("modularity_gain: graph has no edges");

    std::unordered_map<int, double> strength;
    for (int v : g.vertices()) strength[v] = 0.0;
    for (const auto& e : g.edges()) {
        strength[e.u] += e.weight;
        strength[e.v] += e.weight;
    }
    double w = 0.0;
    for (const auto& [v, s] : strength) w += s;
    w /= 2.0;

    double k_home = 0.0, k_target = 0.0;
    for (int nb : g.neighbors(vertex)) {
        double wij = g.find_edge(vertex, nb)->weight;
        if (p.community_of.at(nb) == home) k_home += wij;
        if (p.community_of.at(nb) == target_community) k_target += wij;
    }
    double s_home = 0.0, s_target = 0.0;
    for (int v : p.communities[std::size_t(home)]) s_home += strength[v];
    for (int v : p.communities[std::size_t(target_community)]) s_target += strength[v];
    double s_i = strength[vertex];

    return (k_target - k_home) / w -
           s_i * (s_target - (s_home - s_i)) / (2.0 * w * w);
}

LouvainResult louvain(const HardwareGraph& g, std::uint64_t seed) {
    VisitOrderFn shuffled = [seed](int level, int pass, int n) {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(mix(mix(seed, std::uint64_t(level)), std::uint64_t(pass)));
        std::shuffle(order.begin(), order.end(), rng);
        return order;
    };
    return louvain(g, seed, shuffled);
}

LouvainResult louvain(const HardwareGraph& g, std::uint64_t /*seed*/, const VisitOrderFn& order) {
    if (g.num_edges() == 0)
        throw ValidationError("louvain: graph has no edges");

    LouvainResult result;
    WGraph wg = level_zero(g);
    // members[supernode] = original dense vertices it absorbed
    std::vector<std::vector<int>> members(std::size_t(wg.n));
    for (int i = 0; i < wg.n; ++i) members[std::size_t(i)] = {i};

    int level = 0;
    while (true) {
        std::vector<int> comm(std::size_t(wg.n));
        std::iota(comm.begin(), comm.end(), 0);
        local_phase(wg, comm, level, order);
        int k = relabel(comm, order(level, 0, wg.n));

        std::vector<int> global(g.num_vertices());
        for (int i = 0; i < wg.n; ++i)
            for (int orig : members[std::size_t(i)])
                global[std::size_t(orig)] = comm[std::size_t(i)];
        result.levels.push_back(Partition::from_assignment(g, global));

        if (k == wg.n || k == 1) break;  // nothing merged, or nothing left to merge
        std::vector<std::vector<int>> merged(static_cast<std::size_t>(k));
        for (int i = 0; i < wg.n; ++i) {
            auto& dst = merged[std::size_t(comm[std::size_t(i)])];
            dst.insert(dst.end(), members[std::size_t(i)].begin(), members[std::size_t(i)].end());
        }
        members = std::move(merged);
        wg = aggregate(wg, comm, k);
        ++level;
    }

    // Refinement on the original graph: guarantees the returned partition
    // is a local optimum under single-vertex moves at the finest level.
    const Partition& coarse = result.levels.back();
    WGraph base = level_zero(g);
    std::vector<int> comm(g.num_vertices());
    for (int d = 0; d < int(g.num_vertices()); ++d)
        comm[std::size_t(d)] = coarse.community_of.at(g.physical_id(d));
    if (local_phase(base, comm, int(result.levels.size()), order)) {
        relabel(comm, order(int(result.levels.size()), 0, base.n));
        result.levels.push_back(Partition::from_assignment(g, comm));
    }
    return result;
}

std::vector<std::vector<int>> candidate_communities(const HardwareGraph& g,
                                                    const LouvainResult& hierarchy,
                                                    int min_size) {
    std::set<std::vector<int>> unique;
    for (const Partition& level : hierarchy.levels) {
        for (const auto& comm : level.communities) {
            for (auto& component : g.induced(comm).components()) {
                if (int(component.size()) < min_size) continue;
                unique.insert(component);
            }
        }
    }
    std::vector<std::vector<int>> out(unique.begin(), unique.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    return out;
}

}  // namespace qvm
