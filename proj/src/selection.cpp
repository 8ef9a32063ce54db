#include "recap/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace recap {

double bic_score(const LocalFit& fit) {
    if (!fit.usable()) throw std::invalid_argument("scoring a failed fit");
    return -2.0 * fit.loglik + fit.q * std::log(fit.eta);
}

double aicc_score(const LocalFit& fit) {
    if (!fit.usable()) throw std::invalid_argument("scoring a failed fit");
    const double q = fit.q;
    if (!aicc_admissible(fit.q, fit.eta))
        throw std::domain_error("AICc inadmissible: eta <= q + 2");
    return -2.0 * fit.loglik + 2.0 * q + 2.0 * (q + 1.0) * (q + 2.0) / (fit.eta - q - 2.0);
}

namespace {

std::string interaction_model_name(unsigned k, const std::vector<unsigned>& masks, unsigned all) {
    if (masks.empty()) return "independence";
    if (masks.size() == static_cast<std::size_t>(all)) return "saturated";
    LogLinearModel m;
    m.k = k;
    for (unsigned j = 1; j <= k; ++j) m.terms.push_back({j});
    for (unsigned mask : masks) {
        std::vector<unsigned> t;
        for (unsigned j = 1; j <= k; ++j)
            if (pattern_bit(k, mask, j - 1)) t.push_back(j);
        m.terms.push_back(std::move(t));
    }
    std::string s;
    for (std::size_t i = 0; i < m.terms.size(); ++i) {
        if (i) s += ',';
        for (unsigned j : m.terms[i]) s += std::to_string(j);
    }
    return s;
}

LogLinearModel interaction_model(unsigned k, const std::vector<unsigned>& masks, unsigned n_all) {
    LogLinearModel m;
    m.k = k;
    for (unsigned j = 1; j <= k; ++j) m.terms.push_back({j});
    for (unsigned mask : masks) {
        std::vector<unsigned> t;
        for (unsigned j = 1; j <= k; ++j)
            if (pattern_bit(k, mask, j - 1)) t.push_back(j);
        m.terms.push_back(std::move(t));
    }
    m.name = interaction_model_name(k, masks, n_all);
    return m;
}

// interaction bitmasks of order 2..k-1, sorted by (order, value)
std::vector<unsigned> interaction_masks(unsigned k) {
    std::vector<unsigned> masks;
    const unsigned full = static_cast<unsigned>((1u << k) - 1);
    for (unsigned mask = 1; mask < full; ++mask)
        if (pattern_weight(mask) >= 2) masks.push_back(mask);
    std::sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
        if (pattern_weight(a) != pattern_weight(b)) return pattern_weight(a) < pattern_weight(b);
        return a > b;  // high bit = list 1; earlier lists first
    });
    return masks;
}

bool hierarchical(const std::vector<unsigned>& chosen) {
    for (unsigned mask : chosen) {
        if (pattern_weight(mask) < 3) continue;
        for (unsigned sub = (mask - 1) & mask; sub; sub = (sub - 1) & mask)
            if (pattern_weight(sub) >= 2 &&
                std::find(chosen.begin(), chosen.end(), sub) == chosen.end())
                return false;
    }
    return true;
}

}  // namespace

std::vector<LogLinearModel> default_candidates(unsigned k) {
    std::vector<LogLinearModel> out;
    out.push_back(model_intercept(k));
    out.push_back(model_equal_catch(k));
    const std::vector<unsigned> masks = interaction_masks(k);
    const unsigned n = static_cast<unsigned>(masks.size());
    // subsets of the interaction pool, kept when downward closed
    for (unsigned long long bits = 0; bits < (1ull << n); ++bits) {
        std::vector<unsigned> chosen;
        for (unsigned i = 0; i < n; ++i)
            if (bits & (1ull << i)) chosen.push_back(masks[i]);
        if (!hierarchical(chosen)) continue;
        out.push_back(interaction_model(k, chosen, n));
    }
    return out;
}

namespace {

struct Scored {
    LocalFit fit;
    double score = 0.0;
    bool ok = false;
};

Scored try_candidate(const LogLinearModel& model, const PatternDistribution& dist, double eta,
                     Criterion crit) {
    Scored s;
    if (crit == Criterion::aicc && !aicc_admissible(model.q(), eta)) return s;
    s.fit = pmml_fit(model, dist, eta);
    if (s.fit.status != FitStatus::ok) return s;
    s.score = crit == Criterion::bic ? bic_score(s.fit) : aicc_score(s.fit);
    s.ok = std::isfinite(s.score);
    return s;
}

LocalFit stepwise_select(const PatternDistribution& dist, double eta, Criterion crit) {
    const unsigned k = dist.k;
    Scored best = try_candidate(model_intercept(k), dist, eta, crit);
    for (const LogLinearModel& m : {model_equal_catch(k), model_independence(k)}) {
        Scored s = try_candidate(m, dist, eta, crit);
        if (s.ok && (!best.ok || s.score < best.score)) best = s;
    }

    const std::vector<unsigned> pool = interaction_masks(k);
    std::vector<unsigned> chosen;
    Scored cur = try_candidate(interaction_model(k, chosen, static_cast<unsigned>(pool.size())),
                               dist, eta, crit);
    while (cur.ok) {
        Scored next;
        unsigned next_mask = 0;
        for (unsigned mask : pool) {
            if (std::find(chosen.begin(), chosen.end(), mask) != chosen.end()) continue;
            std::vector<unsigned> trial = chosen;
            trial.push_back(mask);
            if (!hierarchical(trial)) continue;
            Scored s = try_candidate(interaction_model(k, trial, static_cast<unsigned>(pool.size())),
                                     dist, eta, crit);
            if (s.ok && (!next.ok || s.score < next.score)) {
                next = s;
                next_mask = mask;
            }
        }
        if (!next.ok || next.score >= cur.score) break;
        chosen.push_back(next_mask);
        cur = next;
    }
    if (cur.ok && (!best.ok || cur.score < best.score)) best = cur;
    if (!best.ok) return pmml_fit(model_intercept(k), dist, eta);
    return best.fit;
}

}  // namespace

LocalFit select_local_model(const PatternDistribution& dist, double eta, const SelectionConfig& cfg) {
    dist.validate();
    if (cfg.candidates.empty() && dist.k >= 5) return stepwise_select(dist, eta, cfg.criterion);

    const std::vector<LogLinearModel> candidates =
        cfg.candidates.empty() ? default_candidates(dist.k) : cfg.candidates;

    Scored best;
    for (const LogLinearModel& m : candidates) {
        Scored s = try_candidate(m, dist, eta, cfg.criterion);
        if (!s.ok) continue;
        if (!best.ok || s.score < best.score ||
            (s.score == best.score && s.fit.q < best.fit.q))
            best = s;
    }
    if (!best.ok) return pmml_fit(model_intercept(dist.k), dist, eta);
    return best.fit;
}

}  // namespace recap
