#include "qvm/composite.hpp"

#include <algorithm>
#include <set>

#include "qvm/error.hpp"

namespace qvm {

namespace {

// measure wiring of one segment: measured vertices ascending, and for each
// clbit the rank of its vertex in that order (-1 when the clbit is unread).
std::vector<int> clbit_ranks(const RoutedCircuit& routed) {
    std::vector<int> measured;
    for (int v : routed.measure_map)
        if (v >= 0) measured.push_back(v);
    std::sort(measured.begin(), measured.end());

    std::vector<int> ranks(routed.measure_map.size(), -1);
    for (std::size_t c = 0; c < routed.measure_map.size(); ++c) {
        int v = routed.measure_map[c];
        if (v < 0) continue;
        ranks[c] = static_cast<int>(
            std::lower_bound(measured.begin(), measured.end(), v) - measured.begin());
    }
    return ranks;
}

char bit_at(const std::string& key, int width, int index) {
    return key[static_cast<std::size_t>(width - 1 - index)];
}

void set_bit(std::string& key, int width, int index, char value) {
    key[static_cast<std::size_t>(width - 1 - index)] = value;
}

}  // namespace

std::string CompositeSegment::logical_to_slice(const std::string& logical) const {
    int width = routed.num_clbits;
    if (static_cast<int>(logical.size()) != width)
        throw ValidationError("count key '" + logical + "' does not match clbit width " +
                              std::to_string(width));
    std::vector<int> ranks = clbit_ranks(routed);
    std::string slice(static_cast<std::size_t>(width), '0');
    for (int c = 0; c < width; ++c) {
        char bit = bit_at(logical, width, c);
        if (ranks[static_cast<std::size_t>(c)] < 0) {
            if (bit != '0')
                throw ValidationError("count key '" + logical + "' sets unmeasured clbit " +
                                      std::to_string(c));
            continue;
        }
        set_bit(slice, width, ranks[static_cast<std::size_t>(c)], bit);
    }
    return slice;
}

std::string CompositeSegment::slice_to_logical(const std::string& slice) const {
    int width = routed.num_clbits;
    if (static_cast<int>(slice.size()) != width)
        throw ValidationError("slice '" + slice + "' does not match clbit width " +
                              std::to_string(width));
    std::vector<int> ranks = clbit_ranks(routed);
    std::string logical(static_cast<std::size_t>(width), '0');
    for (int c = 0; c < width; ++c) {
        int r = ranks[static_cast<std::size_t>(c)];
        if (r >= 0) set_bit(logical, width, c, bit_at(slice, width, r));
    }
    return logical;
}

const CompositeSegment* CompositeCircuit::find(const std::string& circuit_id) const {
    for (const auto& seg : segments)
        if (seg.circuit_id == circuit_id) return &seg;
    return nullptr;
}

CompositeCircuit combine(const std::vector<std::pair<std::string, RoutedCircuit>>& parts) {
    if (parts.empty()) throw ValidationError("combine needs at least one tenant");

    CompositeCircuit comp;
    for (const auto& [id, routed] : parts) {
        CompositeSegment seg;
        seg.circuit_id = id;
        seg.routed = routed;
        comp.segments.push_back(std::move(seg));
    }
    std::sort(comp.segments.begin(), comp.segments.end(),
              [](const CompositeSegment& a, const CompositeSegment& b) {
                  return a.circuit_id < b.circuit_id;
              });

    std::set<int> used;
    int offset = 0;
    for (std::size_t i = 0; i < comp.segments.size(); ++i) {
        CompositeSegment& seg = comp.segments[i];
        if (i > 0 && comp.segments[i - 1].circuit_id == seg.circuit_id)
            throw ValidationError("duplicate circuit id '" + seg.circuit_id + "' in combine");

        bool measures = false;
        for (int v : seg.routed.measure_map) measures = measures || v >= 0;
        if (!measures)
            throw ValidationError("tenant '" + seg.circuit_id + "' measures nothing");

        for (int v : seg.routed.footprint)
            if (!used.insert(v).second)
                throw ValidationError("tenant footprints overlap at vertex " + std::to_string(v));

        seg.clbit_offset = offset;
        offset += seg.routed.num_clbits;
    }
    comp.total_clbits = offset;
    return comp;
}

std::map<std::string, long long> multiplex(const CompositeCircuit& comp,
                                           const SegmentCounts& per_segment) {
    long long shots = -1;
    // Expanded per-shot slice strings for each segment, key order.
    std::vector<std::vector<std::string>> streams;
    for (const auto& seg : comp.segments) {
        auto it = per_segment.find(seg.circuit_id);
        if (it == per_segment.end())
            throw ValidationError("multiplex: no counts for tenant '" + seg.circuit_id + "'");
        std::vector<std::string> stream;
        long long total = 0;
        for (const auto& [key, n] : it->second) {
            if (n < 0) throw ValidationError("multiplex: negative count for '" + key + "'");
            std::string slice = seg.logical_to_slice(key);
            for (long long k = 0; k < n; ++k) stream.push_back(slice);
            total += n;
        }
        if (shots < 0) shots = total;
        if (total != shots)
            throw ValidationError("multiplex: tenant '" + seg.circuit_id + "' has " +
                                  std::to_string(total) + " shots, expected " +
                                  std::to_string(shots));
        streams.push_back(std::move(stream));
    }

    std::map<std::string, long long> out;
    for (long long s = 0; s < shots; ++s) {
        std::string key(static_cast<std::size_t>(comp.total_clbits), '0');
        for (std::size_t i = 0; i < comp.segments.size(); ++i) {
            const CompositeSegment& seg = comp.segments[i];
            const std::string& slice = streams[i][static_cast<std::size_t>(s)];
            for (int b = 0; b < seg.routed.num_clbits; ++b)
                set_bit(key, comp.total_clbits, seg.clbit_offset + b,
                        bit_at(slice, seg.routed.num_clbits, b));
        }
        out[key] += 1;
    }
    return out;
}

SegmentCounts demultiplex(const CompositeCircuit& comp,
                          const std::map<std::string, long long>& counts) {
    SegmentCounts out;
    for (const auto& seg : comp.segments) out[seg.circuit_id];  // tenants with zero shots exist

    for (const auto& [key, n] : counts) {
        if (static_cast<int>(key.size()) != comp.total_clbits)
            throw ValidationError("composite key '" + key + "' does not match width " +
                                  std::to_string(comp.total_clbits));
        for (const auto& seg : comp.segments) {
            std::string slice(static_cast<std::size_t>(seg.routed.num_clbits), '0');
            for (int b = 0; b < seg.routed.num_clbits; ++b)
                set_bit(slice, seg.routed.num_clbits, b,
                        bit_at(key, comp.total_clbits, seg.clbit_offset + b));
            out[seg.circuit_id][seg.slice_to_logical(slice)] += n;
        }
    }
    return out;
}

}  // namespace qvm
