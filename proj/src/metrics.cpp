#include "fedlcc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "fedlcc/error.hpp"

namespace fedlcc {

ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size())
        throw ConfigError("contingency: label length mismatch " +
                          std::to_string(pred.size()) + " vs " +
                          std::to_string(truth.size()));
    std::map<int, std::size_t> pred_ids, true_ids;
    std::size_t noise = 0;
    for (int v : pred)
        if (v != -1) pred_ids.try_emplace(v, pred_ids.size());
    for (int v : truth) true_ids.try_emplace(v, true_ids.size());
    const std::size_t base = pred_ids.size();
    ContingencyTable ct;
    ct.n = pred.size();
    ct.k_true = true_ids.size();
    // noise points appended as singleton clusters after the real ones
    std::size_t noise_count = 0;
    for (int v : pred)
        if (v == -1) ++noise_count;
    ct.k_pred = base + noise_count;
    ct.counts.assign(ct.k_pred * ct.k_true, 0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        std::size_t pi;
        if (pred[i] == -1)
            pi = base + noise++;
        else
            pi = pred_ids[pred[i]];
        ++ct.counts[pi * ct.k_true + true_ids[truth[i]]];
    }
    return ct;
}

namespace {

double entropy(const std::vector<std::size_t>& counts, std::size_t n) {
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double pr = static_cast<double>(c) / static_cast<double>(n);
        h -= pr * std::log(pr);
    }
    return h;
}

}  // namespace

double nmi(std::span<const int> pred, std::span<const int> truth, NmiNorm norm) {
    ContingencyTable ct = contingency(pred, truth);
    std::vector<std::size_t> row(ct.k_pred, 0), col(ct.k_true, 0);
    for (std::size_t i = 0; i < ct.k_pred; ++i)
        for (std::size_t j = 0; j < ct.k_true; ++j) {
            row[i] += ct.at(i, j);
            col[j] += ct.at(i, j);
        }
    const double n = static_cast<double>(ct.n);
    double mi = 0.0;
    for (std::size_t i = 0; i < ct.k_pred; ++i)
        for (std::size_t j = 0; j < ct.k_true; ++j) {
            const std::size_t c = ct.at(i, j);
            if (c == 0) continue;
            mi += (c / n) * std::log(n * c / (static_cast<double>(row[i]) * col[j]));
        }
    const double hu = entropy(row, ct.n);
    const double hv = entropy(col, ct.n);
    const double denom =
        norm == NmiNorm::Geometric ? std::sqrt(hu * hv) : 0.5 * (hu + hv);
    if (denom <= 0.0) return 0.0;  // both partitions trivial
    return std::clamp(mi / denom, 0.0, 1.0);
}

double kappa(std::span<const int> pred, std::span<const int> truth) {
    ContingencyTable ct = contingency(pred, truth);
    // maximize matched count == minimize (max - count)
    std::size_t cmax = 0;
    for (std::size_t c : ct.counts) cmax = std::max(cmax, c);
    const std::size_t side = std::max(ct.k_pred, ct.k_true);
    Matrix cost(side, side, static_cast<double>(cmax));
    for (std::size_t i = 0; i < ct.k_pred; ++i)
        for (std::size_t j = 0; j < ct.k_true; ++j)
            cost.at(i, j) = static_cast<double>(cmax - ct.at(i, j));
    auto match = hungarian(cost);

    // matched class per predicted cluster; padding columns mean "null class"
    const double n = static_cast<double>(ct.n);
    double po = 0.0;
    std::vector<double> pred_mass_per_class(ct.k_true, 0.0);
    for (std::size_t i = 0; i < ct.k_pred; ++i) {
        const std::size_t j = match[i];
        if (j >= ct.k_true) continue;  // null class: pure disagreement
        po += static_cast<double>(ct.at(i, j));
        std::size_t row_total = 0;
        for (std::size_t jj = 0; jj < ct.k_true; ++jj) row_total += ct.at(i, jj);
        pred_mass_per_class[j] += static_cast<double>(row_total);
    }
    po /= n;
    std::vector<std::size_t> col(ct.k_true, 0);
    for (std::size_t i = 0; i < ct.k_pred; ++i)
        for (std::size_t j = 0; j < ct.k_true; ++j) col[j] += ct.at(i, j);
    double pe = 0.0;
    for (std::size_t j = 0; j < ct.k_true; ++j)
        pe += (pred_mass_per_class[j] / n) * (static_cast<double>(col[j]) / n);
    if (pe >= 1.0) return 1.0;  // degenerate single-class agreement
    return (po - pe) / (1.0 - pe);
}

std::vector<std::size_t> hungarian(const Matrix& cost) {
    // O(n^3) shortest augmenting path with potentials, on the square padding
    // of the input (padded cells cost 0).
    const std::size_t rows = cost.rows(), cols = cost.cols();
    const std::size_t n = std::max(rows, cols);
    auto c = [&](std::size_t i, std::size_t j) -> double {
        return (i < rows && j < cols) ? cost.at(i, j) : 0.0;
    };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, n), way(n + 1, n);
    for (std::size_t i = 0; i < n; ++i) {
        p[n] = i;
        std::size_t j0 = n;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            std::size_t i0 = p[j0], j1 = n;
            double delta = inf;
            for (std::size_t j = 0; j < n; ++j) {
                if (used[j]) continue;
                const double cur = c(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != n);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != n);
    }
    std::vector<std::size_t> assign(rows, std::numeric_limits<std::size_t>::max());
    for (std::size_t j = 0; j < n; ++j) {
        if (p[j] < rows && j < cols) assign[p[j]] = j;
        else if (p[j] < rows) assign[p[j]] = std::numeric_limits<std::size_t>::max();
    }
    return assign;
}

}  // namespace fedlcc
