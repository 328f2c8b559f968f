#include "rbv/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rbv {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (std::isspace(static_cast<unsigned char>(s[b])) != 0)) ++b;
    while (e > b && (std::isspace(static_cast<unsigned char>(s[e - 1])) != 0)) --e;
    return s.substr(b, e - b);
}

bool is_missing_token(const std::string& cell) {
    const std::string t = to_lower_ascii(cell);
    return t.empty() || t == "na" || t == "nan" || t == "null";
}

double parse_number(const std::string& cell, std::size_t line_no) {
    double v = 0.0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) {
        throw std::runtime_error("csv: non-numeric cell '" + cell + "' at line " +
                                 std::to_string(line_no));
    }
    return v;
}

ClassLabel parse_label(const std::string& cell, std::size_t line_no) {
    const std::string t = to_lower_ascii(cell);
    if (t == "0" || t == "survived") return kSurvived;
    if (t == "1" || t == "non-survived" || t == "non_survived") return kNonSurvived;
    throw std::runtime_error("csv: label '" + cell + "' at line " + std::to_string(line_no) +
                             " is not 0/1 or survived/non-survived");
}

}  // namespace

FeatureTable load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_line(line);
    const auto& catalog = FeatureCatalog::instance();
    const std::string label_key = to_lower_ascii(trim(label_column));

    // header position -> catalog number, or -1 for the label column
    std::vector<int> header_feature(header.size(), 0);
    int label_pos = -1;
    std::vector<int> feature_nos;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (to_lower_ascii(name) == label_key) {
            if (label_pos >= 0) throw std::runtime_error("csv: duplicate label column");
            label_pos = static_cast<int>(i);
            header_feature[i] = -1;
            continue;
        }
        const auto no = catalog.find_no(name);
        if (!no) throw std::runtime_error("csv: unknown column '" + name + "'");
        header_feature[i] = *no;
        feature_nos.push_back(*no);
    }
    if (label_pos < 0) {
        throw std::runtime_error("csv: label column '" + label_column + "' not found");
    }
    {
        auto sorted = feature_nos;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::runtime_error("csv: duplicate feature column");
        }
    }

    std::vector<std::vector<std::string>> raw_rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        }
        raw_rows.push_back(std::move(cells));
    }

    std::vector<int> sorted_nos = feature_nos;
    std::sort(sorted_nos.begin(), sorted_nos.end());
    FeatureTable table(sorted_nos, raw_rows.size());

    for (std::size_t r = 0; r < raw_rows.size(); ++r) {
        const auto& cells = raw_rows[r];
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string cell = trim(cells[i]);
            if (static_cast<int>(i) == label_pos) {
                table.set_label(r, parse_label(cell, r + 2));
                continue;
            }
            const std::size_t c = table.col_of(header_feature[i]);
            if (is_missing_token(cell)) {
                table.at(r, c) = std::numeric_limits<double>::quiet_NaN();
                table.set_missing(r, c, true);
            } else {
                table.at(r, c) = parse_number(cell, r + 2);
            }
        }
    }
    return table;
}

void write_csv(const FeatureTable& table, const std::string& path,
               const std::string& label_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("csv: cannot write " + path);
    const auto& catalog = FeatureCatalog::instance();

    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        out << catalog.by_no(table.feature_nos()[c]).name << ',';
    }
    out << label_column << '\n';

    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        for (std::size_t c = 0; c < table.n_cols(); ++c) {
            if (table.missing(r, c) && std::isnan(table.at(r, c))) {
                // still-unimputed cell: keep it recognizably missing
            } else {
                out << format_double(table.at(r, c));
            }
            out << ',';
        }
        out << int(table.label(r)) << '\n';
    }
    if (!out) throw std::runtime_error("csv: write failed for " + path);
}

}  // namespace rbv
