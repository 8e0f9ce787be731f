#include "fedlcc/field.hpp"

#include <algorithm>
#include <string>

namespace fedlcc {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return r;
}

// First 20 primes; deterministic Miller-Rabin witnesses (the first 12 already
// certify every 64-bit integer).
constexpr std::uint64_t kWitnesses[20] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                          31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t sp : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
        if (n == sp) return true;
        if (n % sp == 0) return false;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : kWitnesses) {
        if (a % n == 0) continue;
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

FieldParams::FieldParams(std::uint64_t p, unsigned q) : p_(p), q_(q) {
    if (p < 3) throw ConfigError("field modulus must be at least 3");
    if (p >= (std::uint64_t{1} << 62))
        throw ConfigError("field modulus must be below 2^62 so products fit 128 bits");
    if (!is_prime_u64(p))
        throw ConfigError("field modulus " + std::to_string(p) + " is not prime");
    if (q >= 64 || (q > 0 && (static_cast<unsigned __int128>(1) << (2 * q)) >= (p - 1) / 2))
        throw ConfigError("quantization exponent q=" + std::to_string(q) +
                          " leaves no representable distances under p=" + std::to_string(p));
}

FieldElement FieldParams::pow(FieldElement base, std::uint64_t exp) const {
    assert(base.v < p_);
    return {powmod_u64(base.v, exp, p_)};
}

InterpolationNodes::InterpolationNodes(std::vector<FieldElement> xs,
                                       const FieldParams& params)
    : xs_(std::move(xs)), params_(params) {
    if (xs_.empty()) throw ConfigError("interpolation nodes must be non-empty");
    for (const auto& x : xs_)
        if (x.v >= params_.p()) throw ConfigError("interpolation node outside field");
    for (std::size_t i = 0; i < xs_.size(); ++i)
        for (std::size_t j = i + 1; j < xs_.size(); ++j)
            if (xs_[i] == xs_[j])
                throw ConfigError("duplicate interpolation node " + std::to_string(xs_[i].v));

    weights_.resize(xs_.size());
    for (std::size_t j = 0; j < xs_.size(); ++j) {
        FieldElement prod{1};
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            if (i == j) continue;
            prod = params_.mul(prod, params_.sub(xs_[j], xs_[i]));
        }
        weights_[j] = params_.inv(prod);
    }
}

FieldElement lagrange_eval(const InterpolationNodes& nodes,
                           std::span<const FieldElement> ys,
                           FieldElement target) {
    if (ys.size() != nodes.size())
        throw ConfigError("lagrange_eval: value count does not match node count");
    const FieldParams& F = nodes.params();
    const auto& xs = nodes.xs();
    for (std::size_t j = 0; j < xs.size(); ++j)
        if (xs[j] == target) return ys[j];

    // L_j(t) = prefix_j * suffix_j * w_j where prefix/suffix are the products
    // of (t - x_i) left and right of j.
    const std::size_t n = xs.size();
    std::vector<FieldElement> suffix(n + 1, FieldElement{1});
    for (std::size_t j = n; j-- > 0;)
        suffix[j] = F.mul(suffix[j + 1], F.sub(target, xs[j]));
    FieldElement prefix{1};
    FieldElement acc{0};
    for (std::size_t j = 0; j < n; ++j) {
        FieldElement numer = F.mul(prefix, suffix[j + 1]);
        acc = F.add(acc, F.mul(ys[j], F.mul(numer, nodes.weight(j))));
        prefix = F.mul(prefix, F.sub(target, xs[j]));
    }
    return acc;
}

std::vector<FieldElement> lagrange_basis_at(const InterpolationNodes& nodes,
                                            FieldElement target) {
    const FieldParams& F = nodes.params();
    const auto& xs = nodes.xs();
    const std::size_t n = xs.size();
    std::vector<FieldElement> basis(n);
    std::vector<FieldElement> suffix(n + 1, FieldElement{1});
    for (std::size_t j = n; j-- > 0;)
        suffix[j] = F.mul(suffix[j + 1], F.sub(target, xs[j]));
    FieldElement prefix{1};
    for (std::size_t j = 0; j < n; ++j) {
        basis[j] = F.mul(F.mul(prefix, suffix[j + 1]), nodes.weight(j));
        prefix = F.mul(prefix, F.sub(target, xs[j]));
    }
    return basis;
}

std::vector<FieldElement> decode_weights(const InterpolationNodes& nodes,
                                         std::span<const FieldElement> targets) {
    const FieldParams& F = nodes.params();
    for (const auto& t : targets)
        for (const auto& x : nodes.xs())
            if (t == x)
                throw ConfigError("decode target " + std::to_string(t.v) +
                                  " collides with an interpolation node");
    std::vector<FieldElement> w(nodes.size(), FieldElement{0});
    for (const auto& t : targets) {
        auto basis = lagrange_basis_at(nodes, t);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = F.add(w[j], basis[j]);
    }
    return w;
}

}  // namespace fedlcc
