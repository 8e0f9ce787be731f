#include "fedlcc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fedlcc/error.hpp"
#include "fedlcc/rng.hpp"

namespace fedlcc {

std::size_t Dataset::num_classes() const {
    std::set<int> s(labels.begin(), labels.end());
    return s.size();
}

double Dataset::max_abs_value() const {
    double m = 0.0;
    for (double v : features.data()) m = std::max(m, std::abs(v));
    return m;
}

Normalize parse_normalize(const std::string& name) {
    if (name == "none") return Normalize::None;
    if (name == "minmax") return Normalize::MinMax;
    if (name == "l2") return Normalize::L2;
    throw ConfigError("unknown normalize mode '" + name + "' (none|minmax|l2)");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim spaces and CR
        std::size_t b = cell.find_first_not_of(" \t\r");
        std::size_t e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

Dataset load_csv(const std::string& path, std::optional<int> label_col,
                 Normalize normalize) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file '" + path + "'");

    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw DataError("CSV file '" + path + "' is empty");

    const std::size_t width = rows[0].size();
    if (width == 0) throw DataError("CSV file '" + path + "' has no columns");

    int lcol = -1;
    if (label_col) {
        lcol = *label_col < 0 ? static_cast<int>(width) + *label_col : *label_col;
        if (lcol < 0 || lcol >= static_cast<int>(width))
            throw ConfigError("label column " + std::to_string(*label_col) +
                              " out of range for " + std::to_string(width) +
                              " columns");
    }

    // Header detection: skip the first row when any feature cell fails numeric
    // parse (label cells excluded since they may legitimately be text).
    std::size_t first = 0;
    {
        double tmp;
        bool numeric = true;
        for (std::size_t c = 0; c < rows[0].size(); ++c) {
            if (static_cast<int>(c) == lcol) continue;
            if (!parse_double(rows[0][c], tmp)) numeric = false;
        }
        if (!numeric && rows.size() > 1) first = 1;
    }
    const std::size_t d = label_col ? width - 1 : width;
    if (d == 0) throw DataError("CSV file '" + path + "' has no feature columns");

    Dataset ds;
    ds.name = path;
    ds.features = Matrix(rows.size() - first, d);
    std::map<std::string, int> label_ids;

    for (std::size_t r = first; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() != width)
            throw DataError("ragged CSV row at line " + std::to_string(r + 1) +
                            ": expected " + std::to_string(width) + " cells, got " +
                            std::to_string(cells.size()));
        std::size_t fi = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (label_col && static_cast<int>(c) == lcol) {
                double lv;
                if (parse_double(cells[c], lv)) {
                    ds.labels.push_back(static_cast<int>(std::llround(lv)));
                } else {
                    auto [it, fresh] = label_ids.try_emplace(
                        cells[c], static_cast<int>(label_ids.size()));
                    (void)fresh;
                    ds.labels.push_back(it->second);
                }
                continue;
            }
            double v;
            if (!parse_double(cells[c], v))
                throw DataError("non-numeric cell '" + cells[c] + "' at line " +
                                std::to_string(r + 1) + ", column " +
                                std::to_string(c + 1));
            ds.features.at(r - first, fi++) = v;
        }
    }

    apply_normalize(ds, normalize);
    return ds;
}

void apply_normalize(Dataset& ds, Normalize mode) {
    const std::size_t n = ds.n(), d = ds.d();
    switch (mode) {
        case Normalize::None:
            return;
        case Normalize::MinMax: {
            // per feature to [-1, 1]
            for (std::size_t j = 0; j < d; ++j) {
                double lo = ds.features.at(0, j), hi = lo;
                for (std::size_t i = 1; i < n; ++i) {
                    lo = std::min(lo, ds.features.at(i, j));
                    hi = std::max(hi, ds.features.at(i, j));
                }
                const double span = hi - lo;
                for (std::size_t i = 0; i < n; ++i) {
                    double& v = ds.features.at(i, j);
                    v = span > 0 ? 2.0 * (v - lo) / span - 1.0 : 0.0;
                }
            }
            return;
        }
        case Normalize::L2: {
            // per sample to unit norm
            for (std::size_t i = 0; i < n; ++i) {
                auto row = ds.features.row(i);
                double norm = 0.0;
                for (double v : row) norm += v * v;
                norm = std::sqrt(norm);
                if (norm > 0)
                    for (double& v : row) v /= norm;
            }
            return;
        }
    }
}

Dataset synth_blobs(std::size_t n, std::size_t k, std::size_t dim, double noise,
                    std::uint64_t seed) {
    if (k == 0 || n < k) throw ConfigError("blobs need n >= k >= 1");
    if (dim == 0) throw ConfigError("blobs need dim >= 1");
    Rng rng(mix_keys(seed, 0xb10b5));

    // centers: equally spaced on a circle in the first two coordinates when
    // dim >= 2, otherwise spread on a line; radius 1
    Matrix centers(k, dim, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        if (dim == 1) {
            centers.at(c, 0) = k == 1 ? 0.0 : -1.0 + 2.0 * c / (k - 1);
        } else {
            double angle = 6.28318530717958647692 * c / k;
            centers.at(c, 0) = std::cos(angle);
            centers.at(c, 1) = std::sin(angle);
        }
    }

    Dataset ds;
    ds.name = "blobs";
    ds.features = Matrix(n, dim);
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = i % k;
        ds.labels[i] = static_cast<int>(c);
        for (std::size_t j = 0; j < dim; ++j)
            ds.features.at(i, j) = centers.at(c, j) + noise * rng.next_gaussian();
    }
    return ds;
}

Dataset synth_rings(std::size_t n, std::size_t k, double noise, std::uint64_t seed) {
    if (k == 0 || n < k) throw ConfigError("rings need n >= k >= 1");
    Rng rng(mix_keys(seed, 0x12125));
    Dataset ds;
    ds.name = "rings";
    ds.features = Matrix(n, 2);
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = i % k;
        double radius = 1.0 + 2.0 * c + noise * rng.next_gaussian();
        double angle = 6.28318530717958647692 * rng.next_unit();
        ds.labels[i] = static_cast<int>(c);
        ds.features.at(i, 0) = radius * std::cos(angle);
        ds.features.at(i, 1) = radius * std::sin(angle);
    }
    return ds;
}

}  // namespace fedlcc
