#include "fedlcc/lcc.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "fedlcc/rng.hpp"

namespace fedlcc {

CodingScheme::CodingScheme(std::size_t m, std::size_t l, std::size_t t,
                           std::vector<FieldElement> alpha,
                           std::vector<FieldElement> beta,
                           const FieldParams& params, bool audit_mode)
    : m_(m), l_(l), t_(t), alpha_(std::move(alpha)), beta_(std::move(beta)),
      params_(params), audit_mode_(audit_mode) {
    if (m_ < 1) throw ConfigError("coding scheme needs at least one client");
    if (l_ < 1) throw ConfigError("coding scheme needs at least one data segment");
    if (alpha_.size() != l_ + t_)
        throw ConfigError("coding scheme needs l+t alpha nodes, got " +
                          std::to_string(alpha_.size()));
    if (beta_.size() != m_)
        throw ConfigError("coding scheme needs m beta nodes, got " +
                          std::to_string(beta_.size()));

    std::unordered_set<std::uint64_t> seen;
    for (const auto& a : alpha_) {
        if (a.v >= params_.p()) throw ConfigError("alpha node outside field");
        if (!seen.insert(a.v).second)
            throw ConfigError("duplicate alpha node " + std::to_string(a.v));
    }
    for (const auto& b : beta_) {
        if (b.v >= params_.p()) throw ConfigError("beta node outside field");
        if (!seen.insert(b.v).second)
            throw ConfigError("beta node " + std::to_string(b.v) +
                              " duplicates another evaluation point");
    }
    if (!decodable() && !audit_mode_)
        throw InfeasibleError(
            "infeasible scheme: m=" + std::to_string(m_) + " < 2l+2t-1=" +
            std::to_string(threshold()) + " (l=" + std::to_string(l_) +
            ", t=" + std::to_string(t_) + ")");

    InterpolationNodes alpha_nodes(alpha_, params_);
    encode_basis_.reserve(m_ * (l_ + t_));
    for (const auto& b : beta_) {
        auto basis = lagrange_basis_at(alpha_nodes, b);
        encode_basis_.insert(encode_basis_.end(), basis.begin(), basis.end());
    }

    if (decodable()) {
        InterpolationNodes beta_nodes(beta_, params_);
        decode_weights_ = decode_weights(
            beta_nodes, std::span<const FieldElement>(alpha_.data(), l_));
    }
}

CodingScheme CodingScheme::make_default(std::size_t m, std::size_t l, std::size_t t,
                                        const FieldParams& params, bool audit_mode) {
    std::vector<FieldElement> alpha, beta;
    alpha.reserve(l + t);
    beta.reserve(m);
    for (std::size_t o = 0; o < l + t; ++o) alpha.push_back({2 * o + 1});
    for (std::size_t j = 0; j < m; ++j) beta.push_back({2 * j});
    const std::uint64_t largest = std::max(2 * (l + t) - 1, m == 0 ? 0 : 2 * (m - 1));
    if (largest >= params.p())
        throw ConfigError("default evaluation points exceed the field; p too small");
    return CodingScheme(m, l, t, std::move(alpha), std::move(beta), params, audit_mode);
}

SegmentedSample segment(const QuantizedSample& sample, const CodingScheme& scheme,
                        std::uint64_t noise_seed, std::size_t sample_index) {
    const std::size_t d = sample.dim();
    const std::size_t l = scheme.l();
    const std::size_t seg_len = scheme.segment_len(d);
    SegmentedSample out;
    out.pad_len = seg_len * l - d;
    out.segments.reserve(l + scheme.t());
    for (std::size_t o = 0; o < l; ++o) {
        std::vector<FieldElement> seg(seg_len, FieldElement{0});
        const std::size_t begin = o * seg_len;
        const std::size_t end = std::min(begin + seg_len, d);
        for (std::size_t c = begin; c < end; ++c) seg[c - begin] = sample.coords[c];
        out.segments.push_back(std::move(seg));
    }
    for (std::size_t o = 0; o < scheme.t(); ++o) {
        Rng rng(mix_keys(noise_seed, sample_index, l + o));
        std::vector<FieldElement> seg(seg_len);
        for (auto& v : seg) v = {rng.next_below(scheme.params().p())};
        out.segments.push_back(std::move(seg));
    }
    return out;
}

std::vector<Share> encode(const SegmentedSample& seg, const CodingScheme& scheme,
                          std::size_t owner_client, std::size_t sample_index) {
    const std::size_t lt = scheme.l() + scheme.t();
    if (seg.segments.size() != lt)
        throw ConfigError("segmented sample has " + std::to_string(seg.segments.size()) +
                          " segments, scheme expects " + std::to_string(lt));
    const std::size_t seg_len = seg.segments.empty() ? 0 : seg.segments[0].size();
    const FieldParams& F = scheme.params();
    const auto& basis = scheme.encode_basis();

    std::vector<Share> shares(scheme.m());
    for (std::size_t j = 0; j < scheme.m(); ++j) {
        Share& s = shares[j];
        s.owner_client = owner_client;
        s.sample_index = sample_index;
        s.payload.assign(seg_len, FieldElement{0});
        const FieldElement* row = &basis[j * lt];
        for (std::size_t o = 0; o < lt; ++o) {
            const FieldElement c = row[o];
            if (c.v == 0) continue;
            const auto& src = seg.segments[o];
            for (std::size_t k = 0; k < seg_len; ++k)
                s.payload[k] = F.add(s.payload[k], F.mul(c, src[k]));
        }
    }
    return shares;
}

FieldElement encoded_distance(std::span<const FieldElement> a,
                              std::span<const FieldElement> b,
                              const FieldParams& params) {
    if (a.size() != b.size())
        throw ConfigError("encoded_distance: length mismatch " +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    FieldElement acc{0};
    for (std::size_t k = 0; k < a.size(); ++k) {
        FieldElement diff = params.sub(a[k], b[k]);
        acc = params.add(acc, params.mul(diff, diff));
    }
    return acc;
}

FieldElement decode_distance(std::span<const FieldElement> reports,
                             const CodingScheme& scheme) {
    if (!scheme.decodable())
        throw InfeasibleError("cannot decode: m=" + std::to_string(scheme.m()) +
                              " below threshold 2l+2t-1=" +
                              std::to_string(scheme.threshold()));
    if (reports.size() != scheme.m())
        throw ConfigError("decode_distance: expected " + std::to_string(scheme.m()) +
                          " reports, got " + std::to_string(reports.size()));
    const FieldParams& F = scheme.params();
    const auto& w = scheme.full_decode_weights();
    FieldElement acc{0};
    for (std::size_t j = 0; j < reports.size(); ++j)
        acc = F.add(acc, F.mul(w[j], reports[j]));
    return acc;
}

std::vector<FieldElement> decode_weights_for_clients(
    const CodingScheme& scheme, std::span<const std::size_t> clients) {
    if (clients.size() < scheme.threshold())
        throw InfeasibleError("subset decode needs at least " +
                              std::to_string(scheme.threshold()) + " reports, got " +
                              std::to_string(clients.size()));
    std::vector<FieldElement> nodes;
    nodes.reserve(clients.size());
    for (std::size_t j : clients) {
        if (j >= scheme.m()) throw ConfigError("client id out of range");
        nodes.push_back(scheme.beta()[j]);
    }
    InterpolationNodes beta_nodes(std::move(nodes), scheme.params());
    return decode_weights(beta_nodes, std::span<const FieldElement>(
                                          scheme.alpha().data(), scheme.l()));
}

}  // namespace fedlcc
