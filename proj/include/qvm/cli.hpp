#pragma once

#include <string>
#include <vector>

#include "qvm/serialize.hpp"

namespace qvm {

// Renders a loaded report for humans. format "md" gives summary bullets,
// a batch-sweep table when sweep data is present, a per-circuit table, and
// a win/loss tally against the baseline at a 1% fidelity tolerance when
// baseline data is present. format "csv" gives the sweep table if there is
// one, otherwise the per-circuit table. Anything else is a ValidationError.
std::string render_report(const ReportFile& report, const std::string& format);

// Entry point behind the qvm binary. args is argv without the program
// name, in natural order. Returns the process exit code: 0 on success,
// 1 on usage or validation errors, 2 when scheduling finished but every
// workload item was infeasible.
int run_cli(const std::vector<std::string>& args);

}  // namespace qvm
