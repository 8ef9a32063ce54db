#pragma once

#include <string>
#include <vector>

#include "recap/types.hpp"

namespace recap {

// Log-linear model over nonzero capture patterns, parameterized as a
// multinomial logit: log pi(y; u) = design_row(y) . u - log Z(u). The
// intercept is absorbed by normalization and the k-way interaction is
// excluded so the zero cell stays identifiable.
struct LogLinearModel {
    unsigned k = 0;
    std::vector<std::vector<unsigned>> terms;  // interaction sets, 1-based list indices
    bool equal_catch = false;                  // one shared coefficient on sum_j y_j
    bool squared_sum = false;                  // (sum_j y_j)^2 regressor
    std::string name;

    unsigned q() const {
        return static_cast<unsigned>(terms.size()) + (equal_catch ? 1 : 0) + (squared_sum ? 1 : 0);
    }
    void validate() const;
};

LogLinearModel model_intercept(unsigned k);
LogLinearModel model_independence(unsigned k);
LogLinearModel model_equal_catch(unsigned k);
LogLinearModel model_quasi_symmetry(unsigned k);
LogLinearModel model_saturated(unsigned k);
// "1,2,3,12" style: digits are 1-based list indices, groups are terms
LogLinearModel model_from_terms(unsigned k, const std::string& spec);

std::vector<double> design_row(const LogLinearModel& model, PatternCode code);

enum class FitStatus { ok, boundary, failed };

struct LocalFit {
    LogLinearModel model;
    std::vector<double> u;       // coefficients, one per design column
    std::vector<double> fitted;  // pi(y; u) over nonzero patterns, canonical order
    double pi0 = 0.0;            // extrapolated pi(0) = 1/Z(u)
    double loglik = 0.0;
    double eta = 0.0;
    unsigned q = 0;
    FitStatus status = FitStatus::ok;

    bool usable() const { return status != FitStatus::failed; }
};

// Pseudo-multinomial maximum likelihood: maximize
//   eta * sum_y dist(y) log pi(y; u)
// by damped Newton with step halving; coefficients beyond +-30 flag
// separation (boundary), 200 iterations without convergence flag failure.
// loglik includes the Gamma-generalized multinomial constant.
LocalFit pmml_fit(const LogLinearModel& model, const PatternDistribution& dist, double eta);

// The variable part of the objective, eta (b.u - log Z(u)), and its gradient
// eta (b - X' pi(u)) at an arbitrary coefficient vector.
double pmml_objective(const LogLinearModel& model, const PatternDistribution& dist, double eta,
                      const std::vector<double>& u);
std::vector<double> pmml_gradient(const LogLinearModel& model, const PatternDistribution& dist,
                                  double eta, const std::vector<double>& u);

// pi(0) under the fitted model: exp(design_row(0).u - log Z) = 1/Z.
double impute_zero(const LocalFit& fit);

// prod over odd-sum patterns / prod over nonzero even-sum patterns.
double odd_even_impute(const PatternDistribution& dist);

struct GlobalFit {
    LocalFit fit;
    double p0 = 0.0;    // unconditional zero-pattern probability
    double n_hat = 0.0;
    double c0_hat = 0.0;
};

// Conditional MLE on the raw table (dist = counts/n_c, eta = n_c) with the
// closed-form population maximizer n_hat = n_c (1 + pi0).
GlobalFit global_fit(const CrossClassification& cc, const LogLinearModel& model);

}  // namespace recap
