#include "recap/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace recap {

void Dataset::validate() const {
    if (k == 0) throw std::invalid_argument("dataset needs at least one list");
    if (units.empty()) throw std::invalid_argument("dataset has no units");
    const PatternCode full = static_cast<PatternCode>((std::size_t{1} << k) - 1);
    for (std::size_t i = 0; i < units.size(); ++i) {
        const Unit& u = units[i];
        if (u.pattern == 0 || u.pattern > full)
            throw std::invalid_argument("unit " + u.id + ": pattern out of range");
        if (u.x.size() != covariate_names.size())
            throw std::invalid_argument("unit " + u.id + ": covariate arity mismatch");
        for (double v : u.x)
            if (!std::isfinite(v)) throw std::invalid_argument("unit " + u.id + ": non-finite covariate");
    }
}

double CrossClassification::n_c() const {
    return std::accumulate(counts.begin(), counts.end(), 0.0);
}

void PatternDistribution::validate() const {
    double s = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("pattern distribution has a negative entry");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-10) throw std::invalid_argument("pattern distribution does not sum to 1");
}

CrossClassification cross_classify(const Dataset& data) {
    data.validate();
    CrossClassification cc;
    cc.k = data.k;
    cc.counts.assign(n_nonzero_patterns(data.k), 0.0);
    for (const Unit& u : data.units) cc.counts[index_of_code(data.k, u.pattern)] += 1.0;
    return cc;
}

CrossClassification collapse_lists(const CrossClassification& cc, unsigned keep_a, unsigned keep_b) {
    if (cc.k < 2) throw std::invalid_argument("collapse_lists needs k >= 2");
    if (keep_a >= cc.k || keep_b >= cc.k || keep_a == keep_b)
        throw std::out_of_range("collapse_lists: invalid list indices");
    if (cc.missing_cell) throw std::invalid_argument("collapse_lists: missing_cell already set");

    CrossClassification out;
    out.k = 2;
    out.counts.assign(3, 0.0);
    double dropped = 0.0;
    for (std::size_t idx = 0; idx < cc.counts.size(); ++idx) {
        const PatternCode code = code_of_index(cc.k, idx);
        const unsigned a = pattern_bit(cc.k, code, keep_a);
        const unsigned b = pattern_bit(cc.k, code, keep_b);
        const PatternCode code2 = static_cast<PatternCode>((a << 1) | b);
        if (code2 == 0)
            dropped += cc.counts[idx];  // observed elsewhere, unseen by both kept lists
        else
            out.counts[index_of_code(2, code2)] += cc.counts[idx];
    }
    if (dropped > 0.0) out.missing_cell = dropped;
    return out;
}

Dataset rank_covariate(const Dataset& data) {
    data.validate();
    std::vector<std::size_t> order(data.units.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pattern_weight(data.units[a].pattern) < pattern_weight(data.units[b].pattern);
    });
    Dataset out = data;
    out.covariate_names.push_back("rank");
    for (std::size_t r = 0; r < order.size(); ++r)
        out.units[order[r]].x.push_back(static_cast<double>(r + 1));
    return out;
}

}  // namespace recap
