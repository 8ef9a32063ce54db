#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "recap/bootstrap.hpp"
#include "recap/csv.hpp"
#include "recap/estimators.hpp"
#include "recap/jsonio.hpp"
#include "recap/loglinear.hpp"

namespace {

using namespace recap;

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct CommonOpts {
    std::string input;
    std::string output;
    std::string covariates;
    std::string lists;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_covariates) {
    cmd->add_option("--input,-i", o.input, "input CSV path")->required();
    cmd->add_option("--output,-o", o.output, "JSON report path");
    auto* cov = cmd->add_option("--covariates", o.covariates, "comma-separated covariate columns");
    if (need_covariates) cov->required();
    cmd->add_option("--lists", o.lists,
                    "comma-separated binary list columns (default: all other columns)");
}

Dataset load(const CommonOpts& o) {
    const std::vector<std::string> cov = split_list(o.covariates);
    std::vector<std::string> lists = split_list(o.lists);
    if (lists.empty()) {
        for (const std::string& h : read_csv_header(o.input)) {
            if (h == "id") continue;
            bool is_cov = false;
            for (const auto& c : cov)
                if (c == h) { is_cov = true; break; }
            if (!is_cov) lists.push_back(h);
        }
    }
    return read_dataset_csv(o.input, cov, lists);
}

LogLinearModel resolve_model(const std::string& name, unsigned k) {
    if (name == "independence") return model_independence(k);
    if (name == "saturated") return model_saturated(k);
    if (name == "equal-catch") return model_equal_catch(k);
    if (name == "quasi-symmetry") return model_quasi_symmetry(k);
    if (name == "intercept") return model_intercept(k);
    return model_from_terms(k, name);
}

struct EstimateOpts {
    CommonOpts common;
    std::string model = "independence";
    std::string bandwidth;
    std::string bandwidth_method;
    std::string kernel = "gaussian";
    std::string restrict_expr;
    std::string candidates;
    std::string curves_path;
    double psi_floor = 1e-3;
    int lscv_grid = 20;
    int threads = 0;
    bool global = false;
};

void add_estimate_opts(CLI::App* cmd, EstimateOpts& o, bool with_global) {
    add_common(cmd, o.common, true);
    cmd->add_option("--model", o.model,
                    "independence|saturated|equal-catch|quasi-symmetry|adjusted-saturated|"
                    "intercept|select-bic|select-aicc|term list like 1,2,12");
    cmd->add_option("--bandwidth", o.bandwidth, "fixed bandwidths, one per covariate");
    cmd->add_option("--bandwidth-method", o.bandwidth_method, "lscv|fixed");
    cmd->add_option("--kernel", o.kernel, "gaussian|boxcar");
    cmd->add_option("--lscv-grid", o.lscv_grid, "LSCV grid size")->check(CLI::PositiveNumber);
    cmd->add_option("--psi-floor", o.psi_floor, "detection probability floor");
    cmd->add_option("--restrict", o.restrict_expr, "region restriction, e.g. \"x<150\"");
    cmd->add_option("--candidates", o.candidates, "semicolon-separated model family for select-*");
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    if (with_global) {
        cmd->add_flag("--global", o.global, "fit one model to the raw table instead of the local pipeline");
        cmd->add_option("--emit-curves", o.curves_path, "write stacked conditional-frequency curves CSV");
    }
}

PipelineConfig pipeline_config(const EstimateOpts& o, const Dataset& data) {
    PipelineConfig cfg;
    cfg.model = o.model;
    cfg.psi_floor = o.psi_floor;
    cfg.threads = o.threads;
    cfg.bandwidth.kernel = o.kernel == "boxcar" ? KernelFamily::boxcar : KernelFamily::gaussian;
    if (o.kernel != "gaussian" && o.kernel != "boxcar")
        throw std::runtime_error("unknown kernel: " + o.kernel);
    cfg.bandwidth.grid_points = o.lscv_grid;
    for (const std::string& v : split_list(o.bandwidth))
        cfg.bandwidth.values.push_back(std::stod(v));
    std::string method = o.bandwidth_method;
    if (method.empty()) method = cfg.bandwidth.values.empty() ? "lscv" : "fixed";
    if (method == "fixed") cfg.bandwidth.method = BandwidthMethod::fixed;
    else if (method == "lscv") cfg.bandwidth.method = BandwidthMethod::lscv;
    else throw std::runtime_error("unknown bandwidth method: " + method);
    if (!o.restrict_expr.empty()) cfg.restrict = parse_restriction(o.restrict_expr);
    for (const std::string& spec : split_list(o.candidates, ';'))
        cfg.candidates.push_back(resolve_model(spec, data.k));
    return cfg;
}

std::string global_report_json(const GlobalFit& g, const std::string& model, std::size_t n_c) {
    JsonWriter w;
    w.begin_object();
    w.key("n_hat").value(g.n_hat);
    w.key("c0_hat").value(g.c0_hat);
    w.key("n_c").value(n_c);
    w.key("model").value(model);
    w.key("global").value(true);
    w.key("p0").value(g.p0);
    w.key("coefficients").begin_array();
    for (double v : g.fit.u) w.value(v);
    w.end_array();
    w.key("status").value(g.fit.status == FitStatus::ok
                              ? "ok"
                              : (g.fit.status == FitStatus::boundary ? "boundary" : "failed"));
    w.key("warnings").begin_array();
    w.end_array();
    w.end_object();
    return w.take();
}

int cmd_ingest(const CommonOpts& o) {
    const Dataset data = load(o);
    const CrossClassification cc = cross_classify(data);
    std::printf("n_c = %zu, k = %u\n", data.n_c(), data.k);
    for (std::size_t idx = 0; idx < cc.counts.size(); ++idx)
        std::printf("  %s: %.0f\n", pattern_string(data.k, code_of_index(data.k, idx)).c_str(),
                    cc.counts[idx]);
    if (!o.output.empty()) write_text_file(o.output, ingest_summary_json(data) + "\n");
    return 0;
}

int cmd_estimate(const EstimateOpts& o) {
    const Dataset data = load(o.common);
    if (o.global) {
        const LogLinearModel model = resolve_model(o.model, data.k);
        const GlobalFit g = global_fit(cross_classify(data), model);
        std::printf("global %s: n_hat = %.4f, c0_hat = %.4f (n_c = %zu)\n", o.model.c_str(),
                    g.n_hat, g.c0_hat, data.n_c());
        if (!o.common.output.empty())
            write_text_file(o.common.output, global_report_json(g, o.model, data.n_c()) + "\n");
        return g.fit.status == FitStatus::failed ? 1 : 0;
    }
    const PipelineConfig cfg = pipeline_config(o, data);
    const EstimateReport rep = smooth_poststrat_estimate(data, cfg);
    std::printf("%s: n_hat = %.4f, c0_hat = %.4f (n_c = %zu", o.model.c_str(), rep.n_hat,
                rep.c0_hat, rep.n_c);
    std::printf(", bandwidth =");
    for (double v : rep.bandwidth.values) std::printf(" %.4f", v);
    std::printf(")\n");
    for (const std::string& s : rep.warnings) std::fprintf(stderr, "warning: %s\n", s.c_str());
    if (!o.common.output.empty())
        write_text_file(o.common.output, estimate_report_json(rep) + "\n");
    if (!o.curves_path.empty()) emit_curves(rep, data, o.curves_path);
    return rep.partial ? 2 : 0;
}

int cmd_bootstrap(const EstimateOpts& o, int reps, double level, std::uint64_t seed) {
    const Dataset data = load(o.common);
    const PipelineConfig cfg = pipeline_config(o, data);
    EstimateReport base;
    const BootstrapResult res = bootstrap_ci(data, cfg, reps, level, seed, &base);
    std::printf("%s: c0_hat = %.4f, se = %.4f, %g%% CI = (%.4f, %.4f), B = %d, failed = %d\n",
                o.model.c_str(), res.c0_hat, res.se, level * 100.0, res.ci_lo, res.ci_hi,
                res.requested, res.failed);
    if (!o.common.output.empty())
        write_text_file(o.common.output, bootstrap_result_json(res, base) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smooth post-stratification population-size estimation"};
    app.require_subcommand(1);

    CommonOpts ingest_opts;
    CLI::App* ingest = app.add_subcommand("ingest", "validate a CSV and summarize the table");
    ingest->add_option("--input,-i", ingest_opts.input, "input CSV path")->required();
    ingest->add_option("--output,-o", ingest_opts.output, "JSON summary path");
    ingest->add_option("--covariates", ingest_opts.covariates, "comma-separated covariate columns");
    ingest->add_option("--lists", ingest_opts.lists, "comma-separated binary list columns");

    EstimateOpts est_opts;
    CLI::App* estimate = app.add_subcommand("estimate", "run the estimation pipeline");
    add_estimate_opts(estimate, est_opts, true);

    EstimateOpts boot_opts;
    int reps = 1000;
    double level = 0.9;
    std::uint64_t seed = 1;
    CLI::App* bootstrap = app.add_subcommand("bootstrap", "parametric bootstrap of the pipeline");
    add_estimate_opts(bootstrap, boot_opts, false);
    bootstrap->add_option("--reps", reps, "bootstrap replicates")->check(CLI::Range(2, 1000000));
    bootstrap->add_option("--level", level, "confidence level");
    bootstrap->add_option("--seed", seed, "root seed");

    SyntheticSpec sim_spec;
    std::string sim_p, sim_slopes, sim_out, sim_truth;
    std::uint64_t sim_seed = 1;
    CLI::App* simulate = app.add_subcommand("simulate", "draw a synthetic population");
    simulate->add_option("--n", sim_spec.n, "true population size")->required();
    simulate->add_option("--k", sim_spec.k, "number of lists")->required();
    simulate->add_option("--p", sim_p, "per-list capture probabilities (or logit intercepts)")->required();
    simulate->add_option("--slopes", sim_slopes, "per-list logit slopes on x (optional)");
    simulate->add_option("--x-range", sim_spec.x_hi, "covariate upper bound (uniform on [0, hi])");
    simulate->add_option("--seed", sim_seed, "seed");
    simulate->add_option("--output,-o", sim_out, "output CSV path")->required();
    simulate->add_option("--truth", sim_truth, "truth sidecar JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // usage errors are fatal (1); --help stays 0
    }

    try {
        if (ingest->parsed()) return cmd_ingest(ingest_opts);
        if (estimate->parsed()) return cmd_estimate(est_opts);
        if (bootstrap->parsed()) return cmd_bootstrap(boot_opts, reps, level, seed);
        if (simulate->parsed()) {
            for (const std::string& v : split_list(sim_p)) sim_spec.p.push_back(std::stod(v));
            for (const std::string& v : split_list(sim_slopes)) sim_spec.slopes.push_back(std::stod(v));
            auto [data, truth] = simulate_synthetic(sim_spec, sim_seed);
            write_dataset_csv(data, sim_out);
            const std::string truth_path = sim_truth.empty() ? sim_out + ".truth.json" : sim_truth;
            write_text_file(truth_path, synthetic_truth_json(sim_spec, truth, sim_seed) + "\n");
            std::printf("simulated n = %zu, observed n_c = %zu -> %s\n", truth.n_true,
                        truth.n_observed, sim_out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
