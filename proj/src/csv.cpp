#include "recap/csv.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace recap {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_real(const std::string& s, std::size_t row, const std::string& col) {
    const std::string t = trim(s);
    if (t.empty()) throw std::runtime_error("row " + std::to_string(row) + ": missing value in column " + col);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v))
        throw std::runtime_error("row " + std::to_string(row) + ": bad numeric value '" + t + "' in column " + col);
    return v;
}

unsigned parse_binary(const std::string& s, std::size_t row, const std::string& col) {
    const std::string t = trim(s);
    if (t == "0") return 0;
    if (t == "1") return 1;
    throw std::runtime_error("row " + std::to_string(row) + ": list column " + col + " must be 0 or 1, got '" + t + "'");
}

}  // namespace

std::vector<std::string> read_csv_header(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);
    return header;
}

Dataset read_dataset_csv(const std::string& path,
                         const std::vector<std::string>& covariate_columns,
                         const std::vector<std::string>& list_columns) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    if (list_columns.empty()) throw std::runtime_error("no list columns named");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const std::vector<std::string> header = split_csv_line(line);

    auto find_col = [&](const std::string& name) -> std::size_t {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (trim(header[j]) == name) return j;
        throw std::runtime_error(path + ": column '" + name + "' not found in header");
    };

    std::size_t id_col = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (trim(header[j]) == "id") id_col = j;

    std::vector<std::size_t> cov_idx, list_idx;
    for (const auto& c : covariate_columns) cov_idx.push_back(find_col(c));
    for (const auto& c : list_columns) list_idx.push_back(find_col(c));

    Dataset data;
    data.k = static_cast<unsigned>(list_columns.size());
    data.covariate_names = covariate_columns;

    std::size_t row = 1;  // header is row 1
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("row " + std::to_string(row) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        Unit u;
        u.id = id_col < header.size() ? trim(fields[id_col]) : std::to_string(row - 1);
        for (std::size_t j = 0; j < cov_idx.size(); ++j)
            u.x.push_back(parse_real(fields[cov_idx[j]], row, covariate_columns[j]));
        PatternCode code = 0;
        for (std::size_t j = 0; j < list_idx.size(); ++j)
            code = (code << 1) | parse_binary(fields[list_idx[j]], row, list_columns[j]);
        if (code == 0)
            throw std::runtime_error("row " + std::to_string(row) + ": unit appears on no list");
        u.pattern = code;
        data.units.push_back(std::move(u));
    }
    if (data.units.empty()) throw std::runtime_error(path + ": no data rows");
    data.validate();
    return data;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "id";
    for (const auto& c : data.covariate_names) out << ',' << c;
    for (unsigned j = 0; j < data.k; ++j) out << ",list" << (j + 1);
    out << '\n';
    char buf[40];
    for (const Unit& u : data.units) {
        out << u.id;
        for (double v : u.x) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        for (unsigned j = 0; j < data.k; ++j) out << ',' << pattern_bit(data.k, u.pattern, j);
        out << '\n';
    }
}

}  // namespace recap
