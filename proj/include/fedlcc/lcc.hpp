#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedlcc/field.hpp"
#include "fedlcc/quantizer.hpp"

namespace fedlcc {

/// Public protocol agreement: segment/noise counts and the evaluation points
/// everyone shares. Construction validates distinctness, disjointness and the
/// m >= 2l+2t-1 recovery threshold (relaxed only in audit mode, so privacy
/// tests can build deliberately broken schemes).
class CodingScheme {
public:
    CodingScheme(std::size_t m, std::size_t l, std::size_t t,
                 std::vector<FieldElement> alpha, std::vector<FieldElement> beta,
                 const FieldParams& params, bool audit_mode = false);

    /// alpha = consecutive odd integers from 1, beta = consecutive evens from 0.
    static CodingScheme make_default(std::size_t m, std::size_t l, std::size_t t,
                                     const FieldParams& params,
                                     bool audit_mode = false);

    std::size_t m() const { return m_; }
    std::size_t l() const { return l_; }
    std::size_t t() const { return t_; }
    std::size_t threshold() const { return 2 * l_ + 2 * t_ - 1; }
    bool decodable() const { return m_ >= threshold(); }
    bool audit_mode() const { return audit_mode_; }
    const std::vector<FieldElement>& alpha() const { return alpha_; }
    const std::vector<FieldElement>& beta() const { return beta_; }
    const FieldParams& params() const { return params_; }

    std::size_t segment_len(std::size_t dim) const { return (dim + l_ - 1) / l_; }

    /// encode_basis()[j*(l+t)+o] = L_o(beta_j) over the alpha nodes.
    const std::vector<FieldElement>& encode_basis() const { return encode_basis_; }
    /// Weights over all m beta nodes turning per-client reports into the
    /// decoded distance with a single dot product.
    const std::vector<FieldElement>& full_decode_weights() const {
        return decode_weights_;
    }

private:
    std::size_t m_, l_, t_;
    std::vector<FieldElement> alpha_, beta_;
    FieldParams params_;
    bool audit_mode_;
    std::vector<FieldElement> encode_basis_;
    std::vector<FieldElement> decode_weights_;  // empty when !decodable()
};

/// A sample split into l data segments (zero-padded to equal length) plus t
/// uniform noise segments.
struct SegmentedSample {
    std::vector<std::vector<FieldElement>> segments;  // l data then t noise
    std::size_t pad_len = 0;
};

struct Share {
    std::size_t owner_client = 0;
    std::size_t sample_index = 0;
    std::vector<FieldElement> payload;
};

/// One client's view of the whole dataset: one encoded row per global sample,
/// identical ordering on every client.
struct ShareMatrix {
    std::size_t client = 0;
    std::size_t n = 0;
    std::size_t seg_len = 0;
    std::vector<FieldElement> rows;  // n * seg_len, row-major

    std::span<const FieldElement> row(std::size_t i) const {
        return {rows.data() + i * seg_len, seg_len};
    }
    std::span<FieldElement> row(std::size_t i) {
        return {rows.data() + i * seg_len, seg_len};
    }
};

/// Split and pad a quantized sample; noise derives from (noise_seed,
/// sample_index, segment ordinal) so re-encoding is reproducible and
/// independent of which client owns the sample.
SegmentedSample segment(const QuantizedSample& sample, const CodingScheme& scheme,
                        std::uint64_t noise_seed, std::size_t sample_index);

/// All m shares of one segmented sample: share j is the interpolation
/// polynomial through (alpha_o, s_o) evaluated at beta_j.
std::vector<Share> encode(const SegmentedSample& seg, const CodingScheme& scheme,
                          std::size_t owner_client, std::size_t sample_index);

/// Sum of squared coordinate differences in the field.
FieldElement encoded_distance(std::span<const FieldElement> a,
                              std::span<const FieldElement> b,
                              const FieldParams& params);

/// Decode one pairwise distance from the m per-client encoded distances
/// (ordered by beta node). Exact, noise-independent.
FieldElement decode_distance(std::span<const FieldElement> reports,
                             const CodingScheme& scheme);

/// Decode weights restricted to a subset of clients (for replay with dropped
/// reports). Requires |clients| >= 2l+2t-1.
std::vector<FieldElement> decode_weights_for_clients(
    const CodingScheme& scheme, std::span<const std::size_t> clients);

}  // namespace fedlcc
