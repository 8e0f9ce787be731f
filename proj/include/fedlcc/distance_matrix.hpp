#pragma once

#include <span>
#include <string>
#include <vector>

#include "fedlcc/dataset.hpp"
#include "fedlcc/matrix.hpp"
#include "fedlcc/quantizer.hpp"

namespace fedlcc {

enum class Provenance { Reconstructed, Oracle };

/// The server's n x n real-valued squared-distance matrix. Symmetric, zero
/// diagonal; negative entries can only appear when quantization wrapped,
/// which is counted and surfaced rather than silently accepted.
class GlobalDistanceMatrix {
public:
    GlobalDistanceMatrix() = default;
    GlobalDistanceMatrix(Matrix values, Provenance prov,
                         std::size_t negative_entries = 0)
        : values_(std::move(values)), prov_(prov),
          negative_entries_(negative_entries) {}

    std::size_t n() const { return values_.rows(); }
    double at(std::size_t i, std::size_t j) const { return values_.at(i, j); }
    const Matrix& values() const { return values_; }
    Provenance provenance() const { return prov_; }
    /// Count of decoded entries that fell on the negative branch.
    std::size_t negative_entries() const { return negative_entries_; }

    friend bool operator==(const GlobalDistanceMatrix& a,
                           const GlobalDistanceMatrix& b) {
        return a.values_ == b.values_;
    }

private:
    Matrix values_;
    Provenance prov_ = Provenance::Reconstructed;
    std::size_t negative_entries_ = 0;
};

/// Build the matrix from decoded field distances for all i<i' pairs in
/// row-major order. The diagonal is asserted zero, never decoded.
GlobalDistanceMatrix assemble(std::size_t n,
                              std::span<const FieldElement> pair_distances,
                              const FieldParams& params,
                              DequantExponent exponent = DequantExponent::TwoQ);

/// Exhaustive double-precision pairwise squared distances of real features.
GlobalDistanceMatrix oracle_distance_matrix(const Matrix& features);

/// Root mean square over all n^2 entries, diagonal included.
double rmse(const GlobalDistanceMatrix& a, const GlobalDistanceMatrix& b);

/// CSV with shortest-round-trip doubles, one row per line.
void dump_matrix_csv(const GlobalDistanceMatrix& m, const std::string& path);
/// Binary: magic, version, n, then n^2 doubles row-major little-endian.
void dump_matrix_binary(const GlobalDistanceMatrix& m, const std::string& path);
GlobalDistanceMatrix load_matrix_binary(const std::string& path);

}  // namespace fedlcc
