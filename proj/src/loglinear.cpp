#include "recap/loglinear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace recap {

namespace {

constexpr double kCoefBound = 30.0;
constexpr double kGradTol = 1e-9;
constexpr int kMaxIter = 200;

std::string term_name(const std::vector<unsigned>& term) {
    std::string s;
    for (unsigned j : term) s += std::to_string(j);
    return s;
}

std::string terms_name(const std::vector<std::vector<unsigned>>& terms) {
    std::string s;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) s += ',';
        s += term_name(terms[i]);
    }
    return s;
}

void sort_terms(std::vector<std::vector<unsigned>>& terms) {
    for (auto& t : terms) std::sort(t.begin(), t.end());
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
}

}  // namespace

void LogLinearModel::validate() const {
    if (k == 0) throw std::invalid_argument("model needs k >= 1");
    for (const auto& t : terms) {
        if (t.empty()) throw std::invalid_argument("empty interaction term");
        if (t.size() >= k && k > 1)
            throw std::invalid_argument("the k-way interaction is excluded (zero cell would be free)");
        for (unsigned j : t)
            if (j < 1 || j > k) throw std::invalid_argument("term index out of range");
    }
    if (q() > n_nonzero_patterns(k) - 1)
        throw std::invalid_argument("model has more parameters than free cells");
}

LogLinearModel model_intercept(unsigned k) {
    LogLinearModel m;
    m.k = k;
    m.name = "intercept";
    return m;
}

LogLinearModel model_independence(unsigned k) {
    LogLinearModel m;
    m.k = k;
    for (unsigned j = 1; j <= k; ++j) m.terms.push_back({j});
    m.name = "independence";
    return m;
}

LogLinearModel model_equal_catch(unsigned k) {
    LogLinearModel m;
    m.k = k;
    m.equal_catch = true;
    m.name = "equal-catch";
    return m;
}

LogLinearModel model_quasi_symmetry(unsigned k) {
    LogLinearModel m;
    m.k = k;
    for (unsigned j = 1; j <= k; ++j) m.terms.push_back({j});
    m.squared_sum = true;
    m.name = "quasi-symmetry";
    return m;
}

LogLinearModel model_saturated(unsigned k) {
    LogLinearModel m;
    m.k = k;
    const PatternCode full = static_cast<PatternCode>((std::size_t{1} << k) - 1);
    for (PatternCode mask = 1; mask < full; ++mask) {
        std::vector<unsigned> t;
        for (unsigned j = 1; j <= k; ++j)
            if (pattern_bit(k, mask, j - 1)) t.push_back(j);
        m.terms.push_back(std::move(t));
    }
    if (k == 1) m.terms.clear();  // single list: only the intercept survives
    sort_terms(m.terms);
    m.name = "saturated";
    return m;
}

LogLinearModel model_from_terms(unsigned k, const std::string& spec) {
    LogLinearModel m;
    m.k = k;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        std::vector<unsigned> t;
        for (char c : cur) {
            if (c < '1' || c > '9') throw std::invalid_argument("bad term spec: " + spec);
            t.push_back(static_cast<unsigned>(c - '0'));
        }
        m.terms.push_back(std::move(t));
        cur.clear();
    };
    for (char c : spec) {
        if (c == ',') flush();
        else if (c != ' ') cur += c;
    }
    flush();
    if (m.terms.empty()) throw std::invalid_argument("empty term spec");
    sort_terms(m.terms);
    m.name = terms_name(m.terms);
    m.validate();
    return m;
}

std::vector<double> design_row(const LogLinearModel& model, PatternCode code) {
    std::vector<double> row;
    row.reserve(model.q());
    for (const auto& t : model.terms) {
        double v = 1.0;
        for (unsigned j : t) v *= pattern_bit(model.k, code, j - 1);
        row.push_back(v);
    }
    const double s = static_cast<double>(pattern_weight(code));
    if (model.equal_catch) row.push_back(s);
    if (model.squared_sum) row.push_back(s * s);
    return row;
}

namespace {

Eigen::MatrixXd design_matrix(const LogLinearModel& model) {
    const std::size_t m = n_nonzero_patterns(model.k);
    const unsigned q = model.q();
    Eigen::MatrixXd X(m, q);
    for (std::size_t idx = 0; idx < m; ++idx) {
        const std::vector<double> row = design_row(model, code_of_index(model.k, idx));
        for (unsigned j = 0; j < q; ++j) X(idx, j) = row[j];
    }
    return X;
}

double log_sum_exp(const Eigen::VectorXd& s) {
    const double mx = s.maxCoeff();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::exp(s[i] - mx);
    return mx + std::log(acc);
}

double gamma_constant(const PatternDistribution& dist, double eta) {
    double c = std::lgamma(eta + 1.0);
    for (double p : dist.probs) c -= std::lgamma(eta * p + 1.0);
    return c;
}

double fit_loglik(const PatternDistribution& dist, double eta, const Eigen::VectorXd& logpi) {
    double ll = 0.0;
    for (std::size_t y = 0; y < dist.probs.size(); ++y)
        if (dist.probs[y] > 0.0) ll += eta * dist.probs[y] * logpi[static_cast<Eigen::Index>(y)];
    return ll + gamma_constant(dist, eta);
}

}  // namespace

LocalFit pmml_fit(const LogLinearModel& model, const PatternDistribution& dist, double eta) {
    model.validate();
    dist.validate();
    if (dist.k != model.k) throw std::invalid_argument("pattern arity mismatch");
    if (!(eta >= 1.0)) throw std::invalid_argument("eta must be >= 1");

    const std::size_t m = n_nonzero_patterns(model.k);
    const unsigned q = model.q();

    LocalFit fit;
    fit.model = model;
    fit.eta = eta;
    fit.q = q;

    if (q == 0) {
        const double pi = 1.0 / static_cast<double>(m);
        fit.fitted.assign(m, pi);
        fit.pi0 = pi;
        Eigen::VectorXd logpi = Eigen::VectorXd::Constant(m, std::log(pi));
        fit.loglik = fit_loglik(dist, eta, logpi);
        return fit;
    }

    const Eigen::MatrixXd X = design_matrix(model);
    Eigen::VectorXd p(m);
    for (std::size_t y = 0; y < m; ++y) p[static_cast<Eigen::Index>(y)] = dist.probs[y];
    const Eigen::VectorXd b = X.transpose() * p;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(q);
    auto objective = [&](const Eigen::VectorXd& v) {
        return eta * (b.dot(v) - log_sum_exp(X * v));
    };

    double f = objective(u);
    Eigen::VectorXd s, pi, grad;
    bool converged = false;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        s = X * u;
        const double lse = log_sum_exp(s);
        pi = (s.array() - lse).exp();
        grad = eta * (b - X.transpose() * pi);
        if (grad.lpNorm<Eigen::Infinity>() <= kGradTol) {
            converged = true;
            break;
        }
        if (u.lpNorm<Eigen::Infinity>() > kCoefBound) break;  // separation

        // Newton direction from -H = eta (X' diag(pi) X - (X'pi)(X'pi)')
        const Eigen::VectorXd xpi = X.transpose() * pi;
        Eigen::MatrixXd A = X.transpose() * pi.asDiagonal() * X - xpi * xpi.transpose();
        A *= eta;
        Eigen::VectorXd dir;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (ldlt.info() == Eigen::Success) {
            dir = ldlt.solve(grad);
            if (!dir.allFinite() || grad.dot(dir) <= 0.0) dir = grad;  // fall back to ascent
        } else {
            dir = grad;
        }

        const double slope = grad.dot(dir);
        // Near the optimum the predicted gain slope can drop below the float
        // resolution of f, leaving the line search unable to tell ascent from
        // rounding noise. The full Newton step is then both safe (it is tiny)
        // and necessary to reach the machine-precision maximum, so take it.
        if (slope <= (std::fabs(f) + 1.0) * 1e-14 && dir.lpNorm<Eigen::Infinity>() <= 1e-6) {
            const Eigen::VectorXd trial = u + dir;
            const double ft = objective(trial);
            if (std::isfinite(ft)) {
                u = trial;
                if (ft > f) f = ft;
                continue;
            }
        }
        double t = 1.0;
        bool stepped = false;
        while (t >= 1e-12) {
            const Eigen::VectorXd trial = u + t * dir;
            const double ft = objective(trial);
            if (std::isfinite(ft) && ft >= f + 1e-4 * t * slope) {
                u = trial;
                f = ft;
                stepped = true;
                break;
            }
            t *= 0.5;
        }
        if (!stepped) {
            // The objective can no longer improve at double precision. If the
            // proposed step is itself negligible the iterate is the maximum to
            // machine accuracy, so treat it as converged rather than failed.
            if (dir.lpNorm<Eigen::Infinity>() <= 1e-8) converged = true;
            break;
        }
    }

    s = X * u;
    const double lse = log_sum_exp(s);
    Eigen::VectorXd logpi = s.array() - lse;
    pi = logpi.array().exp();
    grad = eta * (b - X.transpose() * pi);

    if (u.lpNorm<Eigen::Infinity>() > kCoefBound)
        fit.status = FitStatus::boundary;
    else if (!converged && grad.lpNorm<Eigen::Infinity>() > kGradTol)
        fit.status = FitStatus::failed;

    fit.u.assign(u.data(), u.data() + u.size());
    fit.fitted.resize(m);
    for (std::size_t y = 0; y < m; ++y) fit.fitted[y] = pi[static_cast<Eigen::Index>(y)];
    fit.pi0 = std::exp(-lse);
    fit.loglik = fit_loglik(dist, eta, logpi);
    if (!std::isfinite(fit.pi0) || !std::isfinite(fit.loglik)) fit.status = FitStatus::failed;
    return fit;
}

namespace {

void check_eval_args(const LogLinearModel& model, const PatternDistribution& dist,
                     const std::vector<double>& u) {
    model.validate();
    dist.validate();
    if (dist.k != model.k) throw std::invalid_argument("pattern arity mismatch");
    if (u.size() != model.q()) throw std::invalid_argument("coefficient arity mismatch");
}

}  // namespace

double pmml_objective(const LogLinearModel& model, const PatternDistribution& dist, double eta,
                      const std::vector<double>& u) {
    check_eval_args(model, dist, u);
    const Eigen::MatrixXd X = design_matrix(model);
    const Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(u.size()));
    const Eigen::Map<const Eigen::VectorXd> p(dist.probs.data(),
                                              static_cast<Eigen::Index>(dist.probs.size()));
    return eta * ((X.transpose() * p).dot(uv) - log_sum_exp(X * uv));
}

std::vector<double> pmml_gradient(const LogLinearModel& model, const PatternDistribution& dist,
                                  double eta, const std::vector<double>& u) {
    check_eval_args(model, dist, u);
    const Eigen::MatrixXd X = design_matrix(model);
    const Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(u.size()));
    const Eigen::Map<const Eigen::VectorXd> p(dist.probs.data(),
                                              static_cast<Eigen::Index>(dist.probs.size()));
    const Eigen::VectorXd s = X * uv;
    const double lse = log_sum_exp(s);
    const Eigen::VectorXd pi = (s.array() - lse).exp();
    const Eigen::VectorXd g = eta * (X.transpose() * (p - pi));
    return std::vector<double>(g.data(), g.data() + g.size());
}

double impute_zero(const LocalFit& fit) {
    if (fit.status == FitStatus::failed) throw std::invalid_argument("impute_zero on a failed fit");
    return fit.pi0;
}

double odd_even_impute(const PatternDistribution& dist) {
    dist.validate();
    double log_num = 0.0, log_den = 0.0;
    bool zero_odd = false;
    for (std::size_t idx = 0; idx < dist.probs.size(); ++idx) {
        const PatternCode code = code_of_index(dist.k, idx);
        const bool odd = pattern_weight(code) % 2 == 1;
        const double p = dist.probs[idx];
        if (odd) {
            if (p == 0.0) zero_odd = true;
            else log_num += std::log(p);
        } else {
            if (p == 0.0) throw std::domain_error("odd/even imputation undefined: zero even-sum cell");
            log_den += std::log(p);
        }
    }
    if (zero_odd) return 0.0;
    return std::exp(log_num - log_den);
}

GlobalFit global_fit(const CrossClassification& cc, const LogLinearModel& model) {
    if (cc.missing_cell) throw std::invalid_argument("global_fit: missing_cell must be unset");
    const double n = cc.n_c();
    if (!(n > 0.0)) throw std::invalid_argument("global_fit: empty table");

    PatternDistribution dist;
    dist.k = cc.k;
    dist.probs.resize(cc.counts.size());
    for (std::size_t i = 0; i < cc.counts.size(); ++i) dist.probs[i] = cc.counts[i] / n;

    GlobalFit out;
    out.fit = pmml_fit(model, dist, n);
    const double pi0 = out.fit.pi0;
    out.p0 = pi0 / (1.0 + pi0);
    out.n_hat = n * (1.0 + pi0);
    out.c0_hat = n * pi0;
    return out;
}

}  // namespace recap
