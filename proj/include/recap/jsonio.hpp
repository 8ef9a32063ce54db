#pragma once

#include <cstdint>
#include <string>

#include "recap/bootstrap.hpp"
#include "recap/estimators.hpp"

namespace recap {

// Deterministic JSON emission: fixed key order, floats at 17 significant
// digits, no locale dependence. Byte-identical output is part of the
// reproducibility contract, so no third-party serializer is used here.
class JsonWriter {
public:
    std::string take() { return std::move(out_); }

    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& name);
    JsonWriter& value(double v);
    JsonWriter& value(std::int64_t v);
    JsonWriter& value(std::uint64_t v);
    JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value(const char* v) { return value(std::string(v)); }

private:
    void separator();
    std::string out_;
    bool need_comma_ = false;
};

std::string format_double(double v);
std::string json_escape(const std::string& s);

std::string estimate_report_json(const EstimateReport& report);
std::string bootstrap_result_json(const BootstrapResult& result, const EstimateReport& base);
std::string ingest_summary_json(const Dataset& data);
std::string synthetic_truth_json(const SyntheticSpec& spec, const SyntheticTruth& truth,
                                 std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace recap
