#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedlcc/matrix.hpp"

namespace fedlcc {

struct Dataset {
    Matrix features;          // n x d
    std::vector<int> labels;  // empty when unlabeled
    std::string name;

    std::size_t n() const { return features.rows(); }
    std::size_t d() const { return features.cols(); }
    bool labeled() const { return !labels.empty(); }
    /// Number of distinct labels (0 when unlabeled).
    std::size_t num_classes() const;
    double max_abs_value() const;
};

enum class Normalize { None, MinMax, L2 };

Normalize parse_normalize(const std::string& name);

/// Load a rectangular numeric CSV. label_col picks the label column
/// (negative counts from the end, nullopt = unlabeled). A non-numeric first
/// row is treated as a header; non-numeric label cells are enumerated to
/// integer ids in order of first appearance.
Dataset load_csv(const std::string& path, std::optional<int> label_col,
                 Normalize normalize = Normalize::None);

void apply_normalize(Dataset& ds, Normalize mode);

/// k isotropic Gaussian blobs around well-separated centers.
Dataset synth_blobs(std::size_t n, std::size_t k, std::size_t dim, double noise,
                    std::uint64_t seed);

/// k concentric annuli (radii 1, 3, 5, ...) with radial jitter; 2-D.
Dataset synth_rings(std::size_t n, std::size_t k, double noise, std::uint64_t seed);

}  // namespace fedlcc
