#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "recap/kernel.hpp"
#include "recap/selection.hpp"
#include "recap/types.hpp"

namespace recap {

double petersen(const CrossClassification& cc);

inline double detection_prob(double pi0) { return 1.0 / (pi0 + 1.0); }

// Sum of inverse detection probabilities; entries below the floor are
// clamped. Returns the estimate and how many were clamped.
struct HTResult {
    double n_hat = 0.0;
    std::size_t clamped = 0;
};
HTResult horvitz_thompson(const std::vector<double>& psi, double psi_floor);

// Equal-catch fit blended with the raw smoothed table by
// alpha = eta nu/(1 + eta nu), nu = min_y dist(y), then odd/even imputation.
double adjusted_saturated_impute(const PatternDistribution& dist, double eta);

struct Restriction {
    std::string covariate;  // name, or "x" for the first covariate
    std::string op;         // <, <=, >, >=
    double value = 0.0;
    std::string text;

    bool contains(const Dataset& data, const std::vector<double>& x) const;
};
Restriction parse_restriction(const std::string& text);

struct PipelineConfig {
    BandwidthConfig bandwidth;
    std::string model = "independence";  // model name, term spec, select-bic, select-aicc
    std::vector<LogLinearModel> candidates;  // optional override for select-*
    double psi_floor = 1e-3;
    int threads = 0;
    std::optional<Restriction> restrict;
};

struct PerUnitResult {
    std::string id;
    std::vector<double> x;
    double pi0 = 0.0;
    double psi = 1.0;
    std::string model;
    FitStatus status = FitStatus::ok;
    bool clamped = false;
    bool restricted_out = false;
};

struct EstimateReport {
    double n_hat = 0.0;
    double c0_hat = 0.0;
    std::size_t n_c = 0;
    std::string model;
    BandwidthConfig bandwidth;  // resolved
    double psi_floor = 1e-3;
    std::vector<PerUnitResult> per_unit;
    std::vector<std::string> warnings;
    bool partial = false;

    // stage-1 state kept for bootstrap resimulation and curve emission
    std::vector<PatternDistribution> dists;
    std::vector<double> etas;
};

// The two-stage smooth post-stratification pipeline: per-unit kernel
// smoothing, local log-linear imputation of pi(0, x_i), and the
// Horvitz-Thompson roll-up n_hat = n_c + sum_i pi0_i.
EstimateReport smooth_poststrat_estimate(const Dataset& data, const PipelineConfig& cfg);

// Zero imputations outside the region and recompute totals.
EstimateReport restrict_region(const EstimateReport& report, const Dataset& data,
                               const Restriction& r);

// Stacked conditional-frequency curves: one row per unit sorted by the first
// covariate; cumulative pi(y) over the nonzero patterns plus 1 + pi0 on top.
void emit_curves(const EstimateReport& report, const Dataset& data, const std::string& path);

}  // namespace recap
