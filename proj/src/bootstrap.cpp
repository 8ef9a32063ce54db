#include "recap/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "recap/parallel.hpp"
#include "recap/rng.hpp"

namespace recap {

SimulatedPopulation expand_population(const EstimateReport& report, std::mt19937_64& rng) {
    SimulatedPopulation pop;
    if (report.dists.empty()) throw std::invalid_argument("report carries no stage-1 state");
    pop.k = report.dists.front().k;
    const std::size_t m = n_nonzero_patterns(pop.k);
    for (std::size_t i = 0; i < report.per_unit.size(); ++i) {
        const PerUnitResult& u = report.per_unit[i];
        const double o = 1.0 / u.psi - 1.0;
        const double oint = std::floor(o);
        std::size_t copies = 1 + static_cast<std::size_t>(oint);
        if (uniform01(rng) < o - oint) ++copies;

        std::vector<double> row(m + 1);
        for (std::size_t y = 0; y < m; ++y) row[y] = u.psi * report.dists[i].probs[y];
        row[m] = 1.0 - u.psi;
        for (std::size_t c = 0; c < copies; ++c) {
            pop.x.push_back(u.x);
            pop.r_hat.push_back(row);
        }
    }
    return pop;
}

Dataset simulate_capture(const SimulatedPopulation& pop,
                         const std::vector<std::string>& covariate_names, std::mt19937_64& rng) {
    Dataset out;
    out.k = pop.k;
    out.covariate_names = covariate_names;
    const std::size_t m = n_nonzero_patterns(pop.k);
    for (std::size_t i = 0; i < pop.x.size(); ++i) {
        const std::size_t draw = draw_categorical(rng, pop.r_hat[i]);
        if (draw == m) continue;  // zero pattern: never observed
        Unit u;
        u.id = "s" + std::to_string(out.units.size() + 1);
        u.x = pop.x[i];
        u.pattern = code_of_index(pop.k, draw);
        out.units.push_back(std::move(u));
    }
    return out;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - std::floor(h);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

BootstrapResult bootstrap_ci(const Dataset& data, const PipelineConfig& cfg, int B, double level,
                             std::uint64_t seed, EstimateReport* base_out) {
    if (B < 2) throw std::invalid_argument("bootstrap needs B >= 2");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0,1)");

    const EstimateReport base = smooth_poststrat_estimate(data, cfg);
    if (base_out) *base_out = base;

    BootstrapResult res;
    res.c0_hat = base.c0_hat;
    res.level = level;
    res.requested = B;
    res.seed = seed;

    // replicate pipelines are single-threaded; parallelism is across replicates
    PipelineConfig rep_cfg = cfg;
    rep_cfg.threads = 1;

    std::vector<double> values(static_cast<std::size_t>(B));
    std::vector<char> ok(static_cast<std::size_t>(B), 0);
    parallel_for(static_cast<std::size_t>(B), cfg.threads, [&](std::size_t b) {
        std::mt19937_64 rng = make_stream(seed, b);
        try {
            const SimulatedPopulation pop = expand_population(base, rng);
            const Dataset sim = simulate_capture(pop, data.covariate_names, rng);
            if (sim.units.size() < 2) return;
            const EstimateReport rep = smooth_poststrat_estimate(sim, rep_cfg);
            values[b] = rep.c0_hat;
            ok[b] = 1;
        } catch (const std::exception&) {
            // counted as failed
        }
    });

    for (int b = 0; b < B; ++b) {
        if (ok[static_cast<std::size_t>(b)])
            res.replicates.push_back(values[static_cast<std::size_t>(b)]);
        else
            ++res.failed;
    }
    if (res.failed * 10 > B)
        throw std::runtime_error("bootstrap: more than 10% of replicates failed (" +
                                 std::to_string(res.failed) + "/" + std::to_string(B) + ")");

    const std::size_t n = res.replicates.size();
    double mean = 0.0;
    for (double v : res.replicates) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : res.replicates) ss += (v - mean) * (v - mean);
    res.se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    res.ci_lo = quantile(res.replicates, (1.0 - level) / 2.0);
    res.ci_hi = quantile(res.replicates, (1.0 + level) / 2.0);
    return res;
}

std::pair<Dataset, SyntheticTruth> simulate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.n == 0 || spec.k == 0) throw std::invalid_argument("empty synthetic spec");
    if (spec.p.size() != spec.k) throw std::invalid_argument("need one capture probability per list");
    if (!spec.slopes.empty() && spec.slopes.size() != spec.k)
        throw std::invalid_argument("need one slope per list");
    for (double p : spec.p)
        if (spec.slopes.empty() && !(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("capture probabilities must lie in [0,1]");

    std::mt19937_64 rng = make_stream(seed, 0);
    Dataset data;
    data.k = spec.k;
    data.covariate_names = {"x"};
    SyntheticTruth truth;
    truth.n_true = spec.n;

    for (std::size_t i = 0; i < spec.n; ++i) {
        const double x = spec.x_lo + (spec.x_hi - spec.x_lo) * uniform01(rng);
        PatternCode code = 0;
        double pi0 = 1.0;
        for (unsigned j = 0; j < spec.k; ++j) {
            double pj = spec.p[j];
            if (!spec.slopes.empty()) pj = 1.0 / (1.0 + std::exp(-(spec.p[j] + spec.slopes[j] * x)));
            pi0 *= 1.0 - pj;
            code = (code << 1) | (uniform01(rng) < pj ? 1u : 0u);
        }
        truth.psi.push_back(1.0 - pi0);
        if (code == 0) continue;
        Unit u;
        u.id = "u" + std::to_string(i + 1);
        u.x = {x};
        u.pattern = code;
        data.units.push_back(std::move(u));
    }
    truth.n_observed = data.units.size();
    return {std::move(data), std::move(truth)};
}

}  // namespace recap
