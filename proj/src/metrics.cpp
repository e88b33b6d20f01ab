#include "qvm/metrics.hpp"

#include <cmath>
#include <set>

#include "qvm/error.hpp"

namespace qvm {

Distribution normalize(const Counts& counts) {
    long long total = 0;
    for (const auto& [key, n] : counts) {
        if (n < 0) throw ValidationError("negative count for outcome '" + key + "'");
        total += n;
    }
    if (total <= 0) throw ValidationError("cannot normalize an empty histogram");
    Distribution dist;
    for (const auto& [key, n] : counts)
        if (n > 0) dist[key] = static_cast<double>(n) / static_cast<double>(total);
    return dist;
}

double l1_distance(const Distribution& p, const Distribution& q) {
    std::set<std::string> keys;
    for (const auto& [k, v] : p) keys.insert(k);
    for (const auto& [k, v] : q) keys.insert(k);
    double d = 0.0;
    for (const auto& k : keys) {
        auto ip = p.find(k);
        auto iq = q.find(k);
        double a = ip == p.end() ? 0.0 : ip->second;
        double b = iq == q.end() ? 0.0 : iq->second;
        d += std::abs(a - b);
    }
    return d;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw ValidationError("pearson needs series of equal length");
    if (x.size() < 2) return 0.0;

    double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;

    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace qvm
