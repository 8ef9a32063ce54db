#pragma once

#include <optional>
#include <string>
#include <vector>

#include "recap/pattern.hpp"

namespace recap {

struct Unit {
    std::string id;
    std::vector<double> x;  // covariates
    PatternCode pattern;    // nonzero capture pattern
};

struct Dataset {
    unsigned k = 0;
    std::vector<std::string> covariate_names;
    std::vector<Unit> units;

    std::size_t n_c() const { return units.size(); }
    std::size_t n_cov() const { return covariate_names.size(); }

    void validate() const;
};

// Contingency table over the 2^k - 1 observable patterns, canonical order.
// Counts are reals so smoothed pseudo-count arrays can reuse the type;
// integrality holds for raw data only. missing_cell receives mass that a
// list collapse maps onto the all-zero pattern.
struct CrossClassification {
    unsigned k = 0;
    std::vector<double> counts;
    std::optional<double> missing_cell;

    double n_c() const;
    double at(PatternCode code) const { return counts[index_of_code(k, code)]; }
};

// Conditional pattern distribution given capture: entries >= 0, sum 1.
struct PatternDistribution {
    unsigned k = 0;
    std::vector<double> probs;

    double at(PatternCode code) const { return probs[index_of_code(k, code)]; }
    void validate() const;
};

CrossClassification cross_classify(const Dataset& data);

// Marginalize a k-list table to the two kept lists (0-based list indices).
CrossClassification collapse_lists(const CrossClassification& cc, unsigned keep_a, unsigned keep_b);

// Append a rank covariate: units sorted ascending by total capture count,
// least observed gets rank 1, ties broken by input order.
Dataset rank_covariate(const Dataset& data);

}  // namespace recap
