#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "fedlcc/error.hpp"

namespace fedlcc {

/// One element of F_p. Plain value type; the modulus lives in FieldParams and
/// is passed explicitly to every operation.
struct FieldElement {
    std::uint64_t v = 0;
    friend constexpr bool operator==(FieldElement, FieldElement) = default;
};

constexpr std::uint64_t kDefaultPrime = (std::uint64_t{1} << 61) - 1;  // Mersenne
constexpr unsigned kDefaultQuantBits = 16;

/// Deterministic Miller-Rabin over 20 fixed small-prime bases (exact for u64).
bool is_prime_u64(std::uint64_t n);

/// Prime modulus p plus the quantization exponent q that governs the
/// real <-> field embedding. Validated once at construction; cheap to copy.
class FieldParams {
public:
    FieldParams(std::uint64_t p, unsigned q);

    static FieldParams defaults() { return FieldParams(kDefaultPrime, kDefaultQuantBits); }

    std::uint64_t p() const { return p_; }
    unsigned q() const { return q_; }
    std::uint64_t half() const { return (p_ - 1) / 2; }

    FieldElement from_uint(std::uint64_t x) const { return {x % p_}; }
    FieldElement from_signed(std::int64_t x) const {
        if (x >= 0) return {static_cast<std::uint64_t>(x) % p_};
        std::uint64_t mag = static_cast<std::uint64_t>(-(x + 1)) + 1;
        std::uint64_t r = mag % p_;
        return {r == 0 ? 0 : p_ - r};
    }

    FieldElement add(FieldElement a, FieldElement b) const {
        assert(a.v < p_ && b.v < p_);
        std::uint64_t s = a.v + b.v;  // p < 2^62, no overflow
        if (s >= p_) s -= p_;
        return {s};
    }
    FieldElement sub(FieldElement a, FieldElement b) const {
        assert(a.v < p_ && b.v < p_);
        return {a.v >= b.v ? a.v - b.v : a.v + p_ - b.v};
    }
    FieldElement neg(FieldElement a) const {
        assert(a.v < p_);
        return {a.v == 0 ? 0 : p_ - a.v};
    }
    FieldElement mul(FieldElement a, FieldElement b) const {
        assert(a.v < p_ && b.v < p_);
        return {static_cast<std::uint64_t>(
            static_cast<unsigned __int128>(a.v) * b.v % p_)};
    }
    FieldElement pow(FieldElement base, std::uint64_t exp) const;
    FieldElement inv(FieldElement a) const {
        if (a.v == 0) throw ConfigError("field inversion of zero");
        return pow(a, p_ - 2);
    }

    friend bool operator==(const FieldParams& a, const FieldParams& b) {
        return a.p_ == b.p_ && a.q_ == b.q_;
    }

private:
    std::uint64_t p_;
    unsigned q_;
};

inline void require_same_field(const FieldParams& a, const FieldParams& b,
                               const char* where) {
    if (!(a == b))
        throw ConfigError(std::string("mismatched field parameters in ") + where);
}

/// Distinct interpolation abscissae with precomputed barycentric weights
/// w_j = prod_{j'!=j} (x_j - x_j')^{-1}.
class InterpolationNodes {
public:
    InterpolationNodes(std::vector<FieldElement> xs, const FieldParams& params);

    std::size_t size() const { return xs_.size(); }
    const std::vector<FieldElement>& xs() const { return xs_; }
    FieldElement weight(std::size_t j) const { return weights_[j]; }
    const FieldParams& params() const { return params_; }

private:
    std::vector<FieldElement> xs_;
    std::vector<FieldElement> weights_;
    FieldParams params_;
};

/// Value at `target` of the unique degree <= n-1 polynomial through
/// (x_j, ys_j). Exact at the nodes themselves.
FieldElement lagrange_eval(const InterpolationNodes& nodes,
                           std::span<const FieldElement> ys,
                           FieldElement target);

/// Basis values L_j(target) for every node j, evaluated with prefix/suffix
/// products (no per-target inversions). Building block for decode weights.
std::vector<FieldElement> lagrange_basis_at(const InterpolationNodes& nodes,
                                            FieldElement target);

/// w with w_j = sum_o L_j(alpha_o) over the node set, so that for every
/// degree <= |nodes|-1 polynomial g:  sum_j w_j g(x_j) = sum_o g(alpha_o).
/// Targets must avoid the nodes.
std::vector<FieldElement> decode_weights(const InterpolationNodes& nodes,
                                         std::span<const FieldElement> targets);

}  // namespace fedlcc
