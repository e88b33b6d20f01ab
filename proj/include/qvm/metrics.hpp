#pragma once

#include <map>
#include <string>
#include <vector>

namespace qvm {

using Distribution = std::map<std::string, double>;
using Counts = std::map<std::string, long long>;

// Empirical distribution from counts. Total must be positive.
Distribution normalize(const Counts& counts);

// Total variation styled as an L1 norm over the union of supports; lands in
// [0, 2] for two probability distributions.
double l1_distance(const Distribution& p, const Distribution& q);

// Distribution fidelity proxy used throughout the reports.
inline double fidelity_from_l1(double d_l1) { return 1.0 - d_l1 / 2.0; }

// Sample Pearson correlation. Series of unequal length are rejected; a
// series with zero variance has no direction, so the correlation is defined
// as exactly 0 rather than NaN.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qvm
