#include "fedlcc/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fedlcc/rng.hpp"

namespace fedlcc {

namespace {

// p^e with an explicit cap; throws the budget error past the cap.
std::uint64_t checked_pow(std::uint64_t base, std::size_t exp, std::uint64_t cap,
                          const char* what) {
    unsigned __int128 v = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        v *= base;
        if (v > cap)
            throw ConfigError(std::string("audit ") + what +
                              " space exceeds the enumeration budget; use a smaller "
                              "p_audit or fewer noise segments");
    }
    return static_cast<std::uint64_t>(v);
}

// shares of a fully scalar segmented sample at the given clients
void scalar_shares(const CodingScheme& scheme,
                   const std::vector<FieldElement>& segments,
                   const std::vector<std::size_t>& clients,
                   std::vector<FieldElement>& out) {
    const FieldParams& F = scheme.params();
    const std::size_t lt = scheme.l() + scheme.t();
    const auto& basis = scheme.encode_basis();
    out.resize(clients.size());
    for (std::size_t c = 0; c < clients.size(); ++c) {
        const FieldElement* row = &basis[clients[c] * lt];
        FieldElement acc{0};
        for (std::size_t o = 0; o < lt; ++o)
            acc = F.add(acc, F.mul(row[o], segments[o]));
        out[c] = acc;
    }
}

std::vector<std::size_t> validated_colluders(const AuditConfig& cfg) {
    std::set<std::size_t> s(cfg.colluders.begin(), cfg.colluders.end());
    for (std::size_t j : s)
        if (j >= cfg.m)
            throw ConfigError("colluder id " + std::to_string(j) +
                              " out of range for m=" + std::to_string(cfg.m));
    return {s.begin(), s.end()};
}

}  // namespace

std::vector<std::uint64_t> share_distribution(
    const std::vector<FieldElement>& secret, const CodingScheme& scheme,
    const std::vector<std::size_t>& colluders, std::uint64_t budget) {
    if (secret.size() != scheme.l())
        throw ConfigError("audit secret needs one scalar per data segment");
    const std::uint64_t p = scheme.params().p();
    const std::uint64_t noise_space = checked_pow(p, scheme.t(), budget, "noise");
    const std::uint64_t tuple_space = checked_pow(p, colluders.size(), budget, "tuple");

    std::vector<std::uint64_t> hist(tuple_space, 0);
    std::vector<FieldElement> segments(scheme.l() + scheme.t(), FieldElement{0});
    std::copy(secret.begin(), secret.end(), segments.begin());
    std::vector<FieldElement> shares;

    for (std::uint64_t noise = 0; noise < noise_space; ++noise) {
        std::uint64_t rem = noise;
        for (std::size_t o = 0; o < scheme.t(); ++o) {
            segments[scheme.l() + o] = {rem % p};
            rem /= p;
        }
        scalar_shares(scheme, segments, colluders, shares);
        std::uint64_t tuple = 0;
        for (const auto& sh : shares) tuple = tuple * p + sh.v;
        ++hist[tuple];
    }
    return hist;
}

double mutual_information_bits(
    const std::vector<std::vector<std::uint64_t>>& joint) {
    const std::size_t S = joint.size();
    if (S == 0) return 0.0;
    const std::size_t T = joint[0].size();
    std::vector<std::uint64_t> row(S, 0), col(T, 0);
    unsigned __int128 total = 0;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t t = 0; t < T; ++t) {
            row[s] += joint[s][t];
            col[t] += joint[s][t];
            total += joint[s][t];
        }
    if (total == 0) return 0.0;

    // exact independence check on integer counts
    bool independent = true;
    for (std::size_t s = 0; s < S && independent; ++s)
        for (std::size_t t = 0; t < T; ++t) {
            const unsigned __int128 lhs =
                static_cast<unsigned __int128>(joint[s][t]) * total;
            const unsigned __int128 rhs =
                static_cast<unsigned __int128>(row[s]) * col[t];
            if (lhs != rhs) {
                independent = false;
                break;
            }
        }
    if (independent) return 0.0;

    const double n = static_cast<double>(total);
    double mi = 0.0;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t t = 0; t < T; ++t) {
            const std::uint64_t c = joint[s][t];
            if (c == 0) continue;
            mi += (c / n) *
                  std::log2(c * n / (static_cast<double>(row[s]) *
                                     static_cast<double>(col[t])));
        }
    return std::max(mi, 0.0);
}

AuditReport audit_encoding(const AuditConfig& cfg) {
    FieldParams F(cfg.p_audit, 0);
    auto scheme = CodingScheme::make_default(cfg.m, cfg.l, cfg.t, F,
                                             /*audit_mode=*/true);
    auto colluders = validated_colluders(cfg);

    const std::uint64_t p = cfg.p_audit;
    const std::uint64_t secret_space = checked_pow(p, cfg.l, cfg.budget, "secret");
    const std::uint64_t noise_space = checked_pow(p, cfg.t, cfg.budget, "noise");
    if (static_cast<unsigned __int128>(secret_space) * noise_space > cfg.budget)
        throw ConfigError(
            "audit enumeration of " + std::to_string(secret_space) + " x " +
            std::to_string(noise_space) +
            " cases exceeds the budget; use a smaller p_audit or t");

    std::vector<std::vector<std::uint64_t>> joint;
    joint.reserve(secret_space);
    std::vector<FieldElement> secret(cfg.l);
    for (std::uint64_t s = 0; s < secret_space; ++s) {
        std::uint64_t rem = s;
        for (std::size_t o = 0; o < cfg.l; ++o) {
            secret[o] = {rem % p};
            rem /= p;
        }
        joint.push_back(share_distribution(secret, scheme, colluders, cfg.budget));
    }

    AuditReport rep;
    rep.cases_enumerated = secret_space * noise_space;
    rep.colluder_count = colluders.size();
    rep.exact = true;
    rep.mi_bits = mutual_information_bits(joint);
    rep.verdict = rep.mi_bits == 0.0 ? "private" : "leaks";
    return rep;
}

AuditReport audit_encoding_sampled(const AuditConfig& cfg, std::uint64_t samples,
                                   std::uint64_t seed) {
    FieldParams F(cfg.p_audit, 0);
    auto scheme = CodingScheme::make_default(cfg.m, cfg.l, cfg.t, F,
                                             /*audit_mode=*/true);
    auto colluders = validated_colluders(cfg);
    const std::uint64_t p = cfg.p_audit;
    const std::uint64_t tuple_space =
        checked_pow(p, colluders.size(), cfg.budget, "tuple");

    Rng rng(mix_keys(seed, 0x61756474));
    // a handful of random secrets; perfect secrecy makes their tuple
    // distributions indistinguishable
    const std::size_t secret_count = 8;
    std::vector<std::vector<std::uint64_t>> joint(
        secret_count, std::vector<std::uint64_t>(tuple_space, 0));
    std::vector<FieldElement> segments(cfg.l + cfg.t);
    std::vector<FieldElement> shares;
    for (std::size_t s = 0; s < secret_count; ++s) {
        for (std::size_t o = 0; o < cfg.l; ++o) segments[o] = {rng.next_below(p)};
        for (std::uint64_t it = 0; it < samples; ++it) {
            for (std::size_t o = 0; o < cfg.t; ++o)
                segments[cfg.l + o] = {rng.next_below(p)};
            scalar_shares(scheme, segments, colluders, shares);
            std::uint64_t tuple = 0;
            for (const auto& sh : shares) tuple = tuple * p + sh.v;
            ++joint[s][tuple];
        }
    }

    // chi-square of the joint table against row/column independence
    double chi2 = 0.0;
    std::vector<double> col(tuple_space, 0.0);
    const double n = static_cast<double>(secret_count * samples);
    for (std::size_t t = 0; t < tuple_space; ++t)
        for (std::size_t s = 0; s < secret_count; ++s) col[t] += joint[s][t];
    for (std::size_t s = 0; s < secret_count; ++s)
        for (std::size_t t = 0; t < tuple_space; ++t) {
            const double expected = static_cast<double>(samples) * col[t] / n;
            if (expected <= 0) continue;
            const double diff = joint[s][t] - expected;
            chi2 += diff * diff / expected;
        }
    const double dof =
        static_cast<double>((secret_count - 1) * (tuple_space - 1));

    AuditReport rep;
    rep.cases_enumerated = secret_count * samples;
    rep.colluder_count = colluders.size();
    rep.exact = false;
    rep.mi_bits = chi2 / (2.0 * std::log(2.0) * n);  // plug-in approximation
    rep.verdict = chi2 < dof + 4.0 * std::sqrt(2.0 * dof) ? "heuristic_private"
                                                          : "heuristic_leaks";
    return rep;
}

}  // namespace fedlcc
