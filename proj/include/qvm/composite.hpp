#pragma once

#include <map>
#include <string>
#include <vector>

#include "qvm/router.hpp"

namespace qvm {

// Per-tenant counts keyed by the tenant's circuit id.
using SegmentCounts = std::map<std::string, std::map<std::string, long long>>;

struct CompositeSegment {
    std::string circuit_id;
    RoutedCircuit routed;
    int clbit_offset = 0;  // position of this tenant's slice in composite keys

    // Slice bit p (p = 0 rightmost within the slice) carries the outcome of
    // the p-th smallest measured vertex. The maps between that wire order
    // and the tenant's clbit order are derived from routed.measure_map.
    std::string logical_to_slice(const std::string& logical) const;
    std::string slice_to_logical(const std::string& slice) const;
};

// One batch program: tenant circuits on pairwise disjoint footprints,
// segments ordered by circuit id, clbit slices packed in that order.
struct CompositeCircuit {
    std::vector<CompositeSegment> segments;
    int total_clbits = 0;

    const CompositeSegment* find(const std::string& circuit_id) const;
};

// Builds the composite from routed tenants. Rejects duplicate ids, empty
// input, overlapping footprints, and tenants without any measurement.
CompositeCircuit combine(const std::vector<std::pair<std::string, RoutedCircuit>>& parts);

// Packs per-tenant counts into composite bitstring counts. Tenants must
// agree on the total number of shots; shots are paired by expanding each
// tenant's histogram in key order. Demultiplexing the result recovers the
// inputs exactly regardless of that pairing.
std::map<std::string, long long> multiplex(const CompositeCircuit& comp,
                                           const SegmentCounts& per_segment);

// Splits composite counts back out: slices each tenant's bit range and
// reorders it from measured-wire order into the tenant's clbit order.
SegmentCounts demultiplex(const CompositeCircuit& comp,
                          const std::map<std::string, long long>& counts);

}  // namespace qvm
