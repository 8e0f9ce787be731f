#pragma once

#include <span>
#include <vector>

#include "fedlcc/matrix.hpp"

namespace fedlcc {

/// k_pred x k_true count matrix. Predicted label -1 (density noise) becomes a
/// singleton pseudo-cluster per point.
struct ContingencyTable {
    std::size_t k_pred = 0;
    std::size_t k_true = 0;
    std::size_t n = 0;
    std::vector<std::size_t> counts;  // k_pred * k_true row-major

    std::size_t at(std::size_t i, std::size_t j) const {
        return counts[i * k_true + j];
    }
};

ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth);

enum class NmiNorm { Geometric, Arithmetic };

/// Normalized mutual information in [0,1]; natural-log entropies, 0/0 -> 0.
double nmi(std::span<const int> pred, std::span<const int> truth,
           NmiNorm norm = NmiNorm::Geometric);

/// Cohen's kappa after an optimal one-to-one cluster/class matching.
/// Unmatched predicted clusters count as disagreement.
double kappa(std::span<const int> pred, std::span<const int> truth);

/// Minimum-cost assignment on a rectangular cost matrix (padded square
/// internally). Returns, for every row, the assigned column, or SIZE_MAX for
/// rows matched to a padding column.
std::vector<std::size_t> hungarian(const Matrix& cost);

}  // namespace fedlcc
