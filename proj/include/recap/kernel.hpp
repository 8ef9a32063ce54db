#pragma once

#include <cstddef>
#include <vector>

#include "recap/types.hpp"

namespace recap {

enum class KernelFamily { gaussian, boxcar };

enum class BandwidthMethod { fixed, lscv };

struct BandwidthConfig {
    BandwidthMethod method = BandwidthMethod::lscv;
    KernelFamily kernel = KernelFamily::gaussian;
    std::vector<double> values;  // diagonal of D; required when fixed, filled by selection otherwise
    int grid_points = 20;

    bool resolved() const { return !values.empty(); }
};

struct WeightProfile {
    std::size_t index = 0;
    std::vector<double> weights;  // normalized, length n_c
    double eta = 1.0;             // (sum w)/(max w) = 1/max after normalization
};

WeightProfile kernel_weights(const Dataset& data, std::size_t i, const BandwidthConfig& bw);

PatternDistribution local_distribution(const Dataset& data, const WeightProfile& wp);

// Leave-one-out least-squares cross-validation over a log-spaced bandwidth
// grid; returns the config with values filled in. Ties pick the smallest
// bandwidth. CV(D) = sum_i sum_y (1{y_i = y} - pi^{(-i)}(y, x_i; D))^2.
BandwidthConfig select_bandwidth(const Dataset& data, const BandwidthConfig& cfg, int threads = 0);

// The grid evaluated by select_bandwidth: per covariate, grid_points
// log-spaced values spanning [range/n_c, range].
std::vector<std::vector<double>> bandwidth_grid(const Dataset& data, int grid_points);

double lscv_score(const Dataset& data, const std::vector<double>& bandwidths, KernelFamily kernel);

}  // namespace recap
