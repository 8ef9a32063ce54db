#pragma once

#include <vector>

#include "recap/loglinear.hpp"

namespace recap {

enum class Criterion { bic, aicc };

struct SelectionConfig {
    Criterion criterion = Criterion::bic;
    std::vector<LogLinearModel> candidates;  // empty = default family
};

// BIC_i = -2 log L_i + q log eta
double bic_score(const LocalFit& fit);

// AICc_i = -2 log L_i + 2q + 2(q+1)(q+2)/(eta - q - 2); requires eta > q + 2
double aicc_score(const LocalFit& fit);

inline bool aicc_admissible(unsigned q, double eta) { return eta > q + 2.0; }

// Intercept-only, equal-catch, and every hierarchical model with all
// singletons and a downward-closed interaction set (k-way term excluded).
std::vector<LogLinearModel> default_candidates(unsigned k);

// Fits admissible candidates and returns the criterion minimizer; ties break
// to smaller q then earlier candidate. k >= 5 with no explicit candidates
// uses forward stepwise search instead of enumeration. Never fails: the
// intercept-only model is the fallback.
LocalFit select_local_model(const PatternDistribution& dist, double eta, const SelectionConfig& cfg);

}  // namespace recap
