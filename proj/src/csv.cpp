#include "proboost/csv.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "proboost/errors.hpp"

namespace proboost {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trimmed(cell);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

}  // namespace

Dataset load_csv_labeled(const std::string& path,
                         const std::vector<std::size_t>& feature_columns) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::size_t n_columns = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() < 2) {
            throw FormatError(path + ": row " + std::to_string(line_no) +
                              " needs at least one feature column plus a label");
        }
        if (n_columns == 0) {
            // header detection: a first row with any non-numeric feature cell
            double probe;
            bool numeric = true;
            for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
                if (!parse_double(cells[c], probe)) numeric = false;
            }
            if (!numeric && rows.empty()) {
                n_columns = cells.size();
                continue;  // header row
            }
            n_columns = cells.size();
        }
        if (cells.size() != n_columns) {
            throw FormatError(path + ": row " + std::to_string(line_no) +
                              " has " + std::to_string(cells.size()) +
                              " columns, expected " + std::to_string(n_columns));
        }
        std::vector<double> features(cells.size() - 1);
        for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
            if (!parse_double(cells[c], features[c])) {
                throw FormatError(path + ": non-numeric cell at row " +
                                  std::to_string(line_no) + ", column " +
                                  std::to_string(c));
            }
        }
        rows.push_back(std::move(features));
        raw_labels.push_back(trimmed(cells.back()));
    }
    if (rows.empty()) throw FormatError(path + ": no data rows");

    // Numeric labels pass through; string labels map lexicographically.
    std::vector<int> labels(raw_labels.size());
    bool all_numeric = true;
    for (const auto& s : raw_labels) {
        double v;
        if (!parse_double(s, v)) {
            all_numeric = false;
            break;
        }
    }
    int n_classes = 0;
    if (all_numeric) {
        for (std::size_t i = 0; i < raw_labels.size(); ++i) {
            labels[i] = static_cast<int>(std::strtod(raw_labels[i].c_str(), nullptr));
            n_classes = std::max(n_classes, labels[i] + 1);
        }
    } else {
        std::map<std::string, int> mapping;
        for (const auto& s : raw_labels) mapping.emplace(s, 0);
        int next = 0;
        for (auto& [key, id] : mapping) id = next++;
        for (std::size_t i = 0; i < raw_labels.size(); ++i) {
            labels[i] = mapping.at(raw_labels[i]);
        }
        n_classes = next;
    }

    std::vector<std::size_t> cols = feature_columns;
    if (cols.empty()) {
        cols.resize(n_columns - 1);
        for (std::size_t c = 0; c + 1 < n_columns; ++c) cols[c] = c;
    }
    for (std::size_t c : cols) {
        if (c + 1 >= n_columns) {
            throw FormatError(path + ": feature column " + std::to_string(c) +
                              " out of range");
        }
    }

    Tensor features({rows.size(), cols.size()});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            features.at(i, j) = rows[i][cols[j]];
        }
    }
    return Dataset(std::move(features), std::move(labels), n_classes);
}

}  // namespace proboost
