#include "recap/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "recap/parallel.hpp"

namespace recap {

double petersen(const CrossClassification& cc) {
    if (cc.k != 2) throw std::invalid_argument("petersen needs a 2-list table");
    const double c11 = cc.at(parse_pattern("11"));
    const double c10 = cc.at(parse_pattern("10"));
    const double c01 = cc.at(parse_pattern("01"));
    if (!(c11 > 0.0)) throw std::domain_error("petersen: no overlap between lists");
    return c10 * c01 / c11;
}

HTResult horvitz_thompson(const std::vector<double>& psi, double psi_floor) {
    HTResult r;
    for (double p : psi) {
        if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("detection probabilities must lie in (0,1]");
        if (p < psi_floor) {
            p = psi_floor;
            ++r.clamped;
        }
        r.n_hat += 1.0 / p;
    }
    return r;
}

double adjusted_saturated_impute(const PatternDistribution& dist, double eta) {
    if (!(eta >= 1.0)) throw std::invalid_argument("eta must be >= 1");
    const LocalFit ec = pmml_fit(model_equal_catch(dist.k), dist, eta);
    if (ec.status == FitStatus::failed) throw std::runtime_error("equal-catch fit failed");
    double nu = dist.probs[0];
    for (double p : dist.probs) nu = std::min(nu, p);
    const double alpha = eta * nu / (1.0 + eta * nu);
    PatternDistribution blend;
    blend.k = dist.k;
    blend.probs.resize(dist.probs.size());
    for (std::size_t y = 0; y < dist.probs.size(); ++y)
        blend.probs[y] = (1.0 - alpha) * ec.fitted[y] + alpha * dist.probs[y];
    return odd_even_impute(blend);
}

Restriction parse_restriction(const std::string& text) {
    Restriction r;
    r.text = text;
    const std::string ops[] = {"<=", ">=", "<", ">"};
    std::size_t pos = std::string::npos;
    for (const std::string& op : ops) {
        pos = text.find(op);
        if (pos != std::string::npos) {
            r.op = op;
            break;
        }
    }
    if (pos == std::string::npos) throw std::invalid_argument("restriction needs an operator: " + text);
    auto strip = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
    };
    r.covariate = strip(text.substr(0, pos));
    const std::string rhs = strip(text.substr(pos + r.op.size()));
    if (r.covariate.empty() || rhs.empty()) throw std::invalid_argument("bad restriction: " + text);
    char* end = nullptr;
    r.value = std::strtod(rhs.c_str(), &end);
    if (end != rhs.c_str() + rhs.size()) throw std::invalid_argument("bad restriction value: " + rhs);
    return r;
}

bool Restriction::contains(const Dataset& data, const std::vector<double>& x) const {
    std::size_t d = 0;
    if (covariate != "x") {
        bool found = false;
        for (std::size_t j = 0; j < data.covariate_names.size(); ++j)
            if (data.covariate_names[j] == covariate) {
                d = j;
                found = true;
                break;
            }
        if (!found) throw std::invalid_argument("restriction covariate '" + covariate + "' not in dataset");
    }
    const double v = x[d];
    if (op == "<") return v < value;
    if (op == "<=") return v <= value;
    if (op == ">") return v > value;
    return v >= value;
}

namespace {

struct ImputerOutcome {
    double pi0 = 0.0;
    std::string model;
    FitStatus status = FitStatus::ok;
};

ImputerOutcome run_imputer(const PipelineConfig& cfg, const PatternDistribution& dist, double eta) {
    ImputerOutcome out;
    const std::string& m = cfg.model;
    const unsigned k = dist.k;
    if (m == "select-bic" || m == "select-aicc") {
        SelectionConfig sc;
        sc.criterion = m == "select-bic" ? Criterion::bic : Criterion::aicc;
        sc.candidates = cfg.candidates;
        const LocalFit fit = select_local_model(dist, eta, sc);
        out.pi0 = fit.pi0;
        out.model = fit.model.name;
        out.status = fit.status;
        return out;
    }
    if (m == "adjusted-saturated") {
        out.model = m;
        try {
            out.pi0 = adjusted_saturated_impute(dist, eta);
        } catch (const std::exception&) {
            out.status = FitStatus::failed;
        }
        return out;
    }
    LogLinearModel model;
    if (m == "independence") model = model_independence(k);
    else if (m == "saturated") model = model_saturated(k);
    else if (m == "equal-catch") model = model_equal_catch(k);
    else if (m == "quasi-symmetry") model = model_quasi_symmetry(k);
    else if (m == "intercept") model = model_intercept(k);
    else model = model_from_terms(k, m);
    const LocalFit fit = pmml_fit(model, dist, eta);
    out.pi0 = fit.pi0;
    out.model = fit.model.name;
    out.status = fit.status;
    return out;
}

void recompute_totals(EstimateReport& rep) {
    double c0 = 0.0;
    for (const PerUnitResult& u : rep.per_unit) c0 += u.pi0;
    rep.c0_hat = c0;
    rep.n_hat = static_cast<double>(rep.n_c) + c0;
}

}  // namespace

EstimateReport smooth_poststrat_estimate(const Dataset& data, const PipelineConfig& cfg) {
    data.validate();
    if (data.n_cov() == 0) throw std::invalid_argument("pipeline needs at least one covariate");

    EstimateReport rep;
    rep.n_c = data.n_c();
    rep.model = cfg.model;
    rep.psi_floor = cfg.psi_floor;
    if (cfg.bandwidth.method == BandwidthMethod::fixed && !cfg.bandwidth.resolved())
        throw std::invalid_argument("fixed bandwidth method needs values");
    rep.bandwidth = cfg.bandwidth.method == BandwidthMethod::lscv
                        ? select_bandwidth(data, cfg.bandwidth, cfg.threads)
                        : cfg.bandwidth;

    const std::size_t n = data.n_c();
    rep.per_unit.resize(n);
    rep.dists.resize(n);
    rep.etas.resize(n);

    parallel_for(n, cfg.threads, [&](std::size_t i) {
        const WeightProfile wp = kernel_weights(data, i, rep.bandwidth);
        rep.dists[i] = local_distribution(data, wp);
        rep.etas[i] = wp.eta;
        const ImputerOutcome oc = run_imputer(cfg, rep.dists[i], wp.eta);
        PerUnitResult& r = rep.per_unit[i];
        r.id = data.units[i].id;
        r.x = data.units[i].x;
        r.model = oc.model;
        r.status = oc.status;
        r.pi0 = oc.status == FitStatus::failed ? 0.0 : oc.pi0;
    });

    // sequential pass: clamping, warnings, totals (deterministic order)
    const double pi0_cap = 1.0 / cfg.psi_floor - 1.0;
    char buf[160];
    for (std::size_t i = 0; i < n; ++i) {
        PerUnitResult& r = rep.per_unit[i];
        if (r.status == FitStatus::failed) {
            rep.partial = true;
            rep.warnings.push_back("unit " + r.id + ": fit failed; imputation set to 0");
        } else if (r.status == FitStatus::boundary) {
            rep.warnings.push_back("unit " + r.id + ": boundary fit (separation); imputation kept");
        }
        if (r.pi0 > pi0_cap) {
            std::snprintf(buf, sizeof buf,
                          "unit %s: detection probability %.3g below floor %.3g; imputation clamped",
                          r.id.c_str(), 1.0 / (r.pi0 + 1.0), cfg.psi_floor);
            rep.warnings.push_back(buf);
            r.pi0 = pi0_cap;
            r.clamped = true;
        }
        r.psi = detection_prob(r.pi0);
    }
    recompute_totals(rep);

    if (cfg.restrict) return restrict_region(rep, data, *cfg.restrict);
    return rep;
}

EstimateReport restrict_region(const EstimateReport& report, const Dataset& data,
                               const Restriction& r) {
    EstimateReport out = report;
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < out.per_unit.size(); ++i) {
        PerUnitResult& u = out.per_unit[i];
        if (!r.contains(data, u.x)) {
            u.pi0 = 0.0;
            u.psi = 1.0;
            u.restricted_out = true;
            ++dropped;
        }
    }
    recompute_totals(out);
    out.warnings.push_back("restriction '" + r.text + "': imputations zeroed for " +
                           std::to_string(dropped) + " units");
    return out;
}

void emit_curves(const EstimateReport& report, const Dataset& data, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    const std::size_t n = report.per_unit.size();
    const std::size_t m = n_nonzero_patterns(data.k);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.units[a].x[0] < data.units[b].x[0];
    });

    f << "id,x";
    for (std::size_t y = 0; y < m; ++y)
        f << ",cum_" << pattern_string(data.k, code_of_index(data.k, y));
    f << ",top\n";
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        f << ',' << buf;
    };
    for (std::size_t i : order) {
        f << report.per_unit[i].id;
        put(data.units[i].x[0]);
        double cum = 0.0;
        for (std::size_t y = 0; y < m; ++y) {
            cum += report.dists[i].probs[y];
            put(cum);
        }
        put(1.0 + report.per_unit[i].pi0);
        f << '\n';
    }
}

}  // namespace recap
