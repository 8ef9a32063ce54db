#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "recap/estimators.hpp"

namespace recap {

// Extended population for the parametric bootstrap: every observed unit plus
// its expected uncaptured copies, each carrying the full-pattern law
// r(y) = psi pi(y) for y != 0 and r(0) = 1 - psi.
struct SimulatedPopulation {
    unsigned k = 0;
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> r_hat;  // 2^k entries: nonzero canonical order, zero last
};

SimulatedPopulation expand_population(const EstimateReport& report, std::mt19937_64& rng);

Dataset simulate_capture(const SimulatedPopulation& pop,
                         const std::vector<std::string>& covariate_names, std::mt19937_64& rng);

struct BootstrapResult {
    std::vector<double> replicates;  // successful replicate c0 values, index order
    double c0_hat = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double level = 0.9;
    int requested = 0;
    int failed = 0;
    std::uint64_t seed = 0;
};

// Parametric bootstrap of the full pipeline: expand, resimulate, re-estimate
// (bandwidths re-selected when method is lscv). Replicates get independent
// streams keyed by index, so results do not depend on the worker count.
// More than 10% failed replicates is an error.
BootstrapResult bootstrap_ci(const Dataset& data, const PipelineConfig& cfg, int B, double level,
                             std::uint64_t seed, EstimateReport* base_out = nullptr);

// Empirical quantile with linear interpolation on the sorted sample.
double quantile(std::vector<double> values, double p);

struct SyntheticSpec {
    std::size_t n = 1000;
    unsigned k = 3;
    // per-list capture probability: constant, or logistic in x when slopes given
    std::vector<double> p;          // intercepts (probabilities when slopes empty)
    std::vector<double> slopes;     // logit slopes; empty = constant probabilities
    double x_lo = 0.0, x_hi = 1.0;  // covariate range, uniform draw
};

struct SyntheticTruth {
    std::size_t n_true = 0;
    std::size_t n_observed = 0;
    std::vector<double> psi;  // detection probability of every true unit
};

// Draws a closed population with independent-given-x lists and returns the
// observed subset plus ground truth.
std::pair<Dataset, SyntheticTruth> simulate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace recap
