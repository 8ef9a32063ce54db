#include "recap/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace recap {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in JSON report");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void JsonWriter::separator() {
    if (need_comma_) out_ += ',';
    need_comma_ = false;
}

JsonWriter& JsonWriter::begin_object() {
    separator();
    out_ += '{';
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separator();
    out_ += '[';
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
    separator();
    out_ += '"';
    out_ += json_escape(name);
    out_ += "\":";
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    separator();
    out_ += format_double(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
    separator();
    out_ += std::to_string(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
    separator();
    out_ += std::to_string(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    separator();
    out_ += v ? "true" : "false";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    separator();
    out_ += '"';
    out_ += json_escape(v);
    out_ += '"';
    need_comma_ = true;
    return *this;
}

namespace {

void write_bandwidth(JsonWriter& w, const BandwidthConfig& bw) {
    w.key("bandwidth").begin_object();
    w.key("method").value(bw.method == BandwidthMethod::lscv ? "lscv" : "fixed");
    w.key("kernel").value(bw.kernel == KernelFamily::gaussian ? "gaussian" : "boxcar");
    w.key("values").begin_array();
    for (double v : bw.values) w.value(v);
    w.end_array();
    w.end_object();
}

void write_warnings(JsonWriter& w, const std::vector<std::string>& warnings) {
    w.key("warnings").begin_array();
    for (const auto& s : warnings) w.value(s);
    w.end_array();
}

const char* status_name(FitStatus s) {
    switch (s) {
        case FitStatus::ok: return "ok";
        case FitStatus::boundary: return "boundary";
        default: return "failed";
    }
}

}  // namespace

std::string estimate_report_json(const EstimateReport& report) {
    JsonWriter w;
    w.begin_object();
    w.key("n_hat").value(report.n_hat);
    w.key("c0_hat").value(report.c0_hat);
    w.key("n_c").value(report.n_c);
    w.key("model").value(report.model);
    write_bandwidth(w, report.bandwidth);
    w.key("psi_floor").value(report.psi_floor);
    w.key("partial").value(report.partial);
    w.key("per_unit").begin_array();
    for (const PerUnitResult& u : report.per_unit) {
        w.begin_object();
        w.key("id").value(u.id);
        if (u.x.size() == 1) {
            w.key("x").value(u.x[0]);
        } else {
            w.key("x").begin_array();
            for (double v : u.x) w.value(v);
            w.end_array();
        }
        w.key("pi0").value(u.pi0);
        w.key("psi").value(u.psi);
        w.key("model").value(u.model);
        w.key("status").value(status_name(u.status));
        w.end_object();
    }
    w.end_array();
    write_warnings(w, report.warnings);
    w.end_object();
    return w.take();
}

std::string bootstrap_result_json(const BootstrapResult& result, const EstimateReport& base) {
    JsonWriter w;
    w.begin_object();
    w.key("c0_hat").value(result.c0_hat);
    w.key("n_hat").value(base.n_hat);
    w.key("n_c").value(base.n_c);
    w.key("model").value(base.model);
    write_bandwidth(w, base.bandwidth);
    w.key("se").value(result.se);
    w.key("ci").begin_array().value(result.ci_lo).value(result.ci_hi).end_array();
    w.key("level").value(result.level);
    w.key("reps").value(result.requested);
    w.key("failed").value(result.failed);
    w.key("seed").value(result.seed);
    w.key("replicates").begin_array();
    for (double v : result.replicates) w.value(v);
    w.end_array();
    write_warnings(w, base.warnings);
    w.end_object();
    return w.take();
}

std::string ingest_summary_json(const Dataset& data) {
    const CrossClassification cc = cross_classify(data);
    JsonWriter w;
    w.begin_object();
    w.key("n_c").value(data.n_c());
    w.key("k").value(static_cast<std::int64_t>(data.k));
    w.key("covariates").begin_array();
    for (const auto& c : data.covariate_names) w.value(c);
    w.end_array();
    w.key("counts").begin_object();
    for (std::size_t idx = 0; idx < cc.counts.size(); ++idx)
        w.key(pattern_string(data.k, code_of_index(data.k, idx))).value(cc.counts[idx]);
    w.end_object();
    w.end_object();
    return w.take();
}

std::string synthetic_truth_json(const SyntheticSpec& spec, const SyntheticTruth& truth,
                                 std::uint64_t seed) {
    JsonWriter w;
    w.begin_object();
    w.key("n_true").value(truth.n_true);
    w.key("n_observed").value(truth.n_observed);
    w.key("k").value(static_cast<std::int64_t>(spec.k));
    w.key("seed").value(seed);
    w.key("p").begin_array();
    for (double v : spec.p) w.value(v);
    w.end_array();
    w.key("slopes").begin_array();
    for (double v : spec.slopes) w.value(v);
    w.end_array();
    w.key("psi").begin_array();
    for (double v : truth.psi) w.value(v);
    w.end_array();
    w.end_object();
    return w.take();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace recap
