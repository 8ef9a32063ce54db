#include "recap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "recap/parallel.hpp"

namespace recap {

namespace {

void check_bandwidths(const Dataset& data, const BandwidthConfig& bw) {
    if (bw.values.size() != data.n_cov())
        throw std::invalid_argument("bandwidth arity does not match covariate count");
    for (double v : bw.values)
        if (!(v > 0.0)) throw std::invalid_argument("bandwidths must be positive");
}

// Unnormalized weights; Gaussian computed in log space with max subtraction
// so distant points underflow to 0 instead of poisoning the normalization.
void raw_weights(const Dataset& data, std::size_t i, const BandwidthConfig& bw,
                 std::vector<double>& out) {
    const std::size_t n = data.n_c();
    const std::size_t q = data.n_cov();
    out.resize(n);
    const std::vector<double>& xi = data.units[i].x;
    if (bw.kernel == KernelFamily::gaussian) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            double lg = 0.0;
            const std::vector<double>& xt = data.units[t].x;
            for (std::size_t d = 0; d < q; ++d) {
                const double z = (xi[d] - xt[d]) / bw.values[d];
                lg -= 0.5 * z * z;
            }
            out[t] = lg;
            if (lg > mx) mx = lg;
        }
        for (std::size_t t = 0; t < n; ++t) out[t] = std::exp(out[t] - mx);
    } else {
        for (std::size_t t = 0; t < n; ++t) {
            const std::vector<double>& xt = data.units[t].x;
            bool in = true;
            for (std::size_t d = 0; d < q; ++d)
                if (std::abs(xi[d] - xt[d]) > bw.values[d]) { in = false; break; }
            out[t] = in ? 1.0 : 0.0;
        }
    }
}

}  // namespace

WeightProfile kernel_weights(const Dataset& data, std::size_t i, const BandwidthConfig& bw) {
    if (i >= data.n_c()) throw std::out_of_range("unit index");
    check_bandwidths(data, bw);
    WeightProfile wp;
    wp.index = i;
    raw_weights(data, i, bw, wp.weights);
    double sum = 0.0, mx = 0.0;
    for (double w : wp.weights) {
        sum += w;
        if (w > mx) mx = w;
    }
    // self weight is always in support, so sum > 0
    for (double& w : wp.weights) w /= sum;
    wp.eta = sum / mx;
    return wp;
}

PatternDistribution local_distribution(const Dataset& data, const WeightProfile& wp) {
    PatternDistribution dist;
    dist.k = data.k;
    dist.probs.assign(n_nonzero_patterns(data.k), 0.0);
    for (std::size_t t = 0; t < data.n_c(); ++t)
        dist.probs[index_of_code(data.k, data.units[t].pattern)] += wp.weights[t];
    return dist;
}

std::vector<std::vector<double>> bandwidth_grid(const Dataset& data, int grid_points) {
    if (grid_points < 1) throw std::invalid_argument("bandwidth grid needs at least one point");
    const std::size_t q = data.n_cov();
    const double n = static_cast<double>(data.n_c());
    std::vector<std::vector<double>> grid(q);
    for (std::size_t d = 0; d < q; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const Unit& u : data.units) {
            lo = std::min(lo, u.x[d]);
            hi = std::max(hi, u.x[d]);
        }
        double range = hi - lo;
        if (range <= 0.0) range = 1.0;  // constant covariate: any bandwidth is equivalent
        const double gmin = range / n;
        grid[d].resize(grid_points);
        if (grid_points == 1) {
            grid[d][0] = range;
            continue;
        }
        const double step = (std::log(range) - std::log(gmin)) / (grid_points - 1);
        for (int g = 0; g < grid_points; ++g) grid[d][g] = std::exp(std::log(gmin) + step * g);
    }
    return grid;
}

double lscv_score(const Dataset& data, const std::vector<double>& bandwidths, KernelFamily kernel) {
    const std::size_t n = data.n_c();
    const std::size_t m = n_nonzero_patterns(data.k);
    BandwidthConfig bw;
    bw.kernel = kernel;
    bw.values = bandwidths;
    check_bandwidths(data, bw);

    std::vector<double> raw, acc(m);
    double cv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        raw_weights(data, i, bw, raw);
        std::fill(acc.begin(), acc.end(), 0.0);
        double total = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            acc[index_of_code(data.k, data.units[t].pattern)] += raw[t];
            total += raw[t];
        }
        const std::size_t self = index_of_code(data.k, data.units[i].pattern);
        acc[self] -= raw[i];
        total -= raw[i];
        // boxcar can leave a unit with no leave-one-out neighbours; score it
        // against the uniform distribution
        const double denom = total > 0.0 ? total : 1.0;
        for (std::size_t y = 0; y < m; ++y) {
            const double pi = total > 0.0 ? acc[y] / denom : 1.0 / static_cast<double>(m);
            const double ind = (y == self) ? 1.0 : 0.0;
            const double r = ind - pi;
            cv += r * r;
        }
    }
    return cv;
}

BandwidthConfig select_bandwidth(const Dataset& data, const BandwidthConfig& cfg, int threads) {
    if (cfg.method != BandwidthMethod::lscv)
        throw std::invalid_argument("select_bandwidth requires method=lscv");
    if (data.n_c() < 2) throw std::invalid_argument("leave-one-out needs at least two units");
    if (data.n_cov() == 0) throw std::invalid_argument("no covariates to smooth over");

    const auto grid = bandwidth_grid(data, cfg.grid_points);
    const int G = cfg.grid_points;
    std::vector<double> scores(G);
    parallel_for(static_cast<std::size_t>(G), threads, [&](std::size_t g) {
        std::vector<double> bws(data.n_cov());
        for (std::size_t d = 0; d < data.n_cov(); ++d) bws[d] = grid[d][g];
        scores[g] = lscv_score(data, bws, cfg.kernel);
    });

    // ascending grid + strict improvement = smallest bandwidth on ties
    int best = 0;
    for (int g = 1; g < G; ++g)
        if (scores[g] < scores[best]) best = g;

    BandwidthConfig out = cfg;
    out.values.resize(data.n_cov());
    for (std::size_t d = 0; d < data.n_cov(); ++d) out.values[d] = grid[d][best];
    return out;
}

}  // namespace recap
