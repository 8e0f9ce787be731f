#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedlcc/lcc.hpp"

namespace fedlcc {

/// Exhaustive share-secrecy audit on a tiny field: enumerate every noise
/// assignment for every scalar secret and measure exactly how much the shares
/// observed by a colluding set reveal.
struct AuditConfig {
    std::uint64_t p_audit = 31;
    std::size_t l = 1;
    std::size_t t = 1;
    std::size_t m = 5;
    std::vector<std::size_t> colluders;  // subset of [0, m)
    std::uint64_t budget = 10'000'000;   // max enumerated cases
};

struct AuditReport {
    double mi_bits = 0.0;
    std::uint64_t cases_enumerated = 0;
    bool exact = true;  // exhaustive (vs sampled heuristic)
    std::string verdict;  // "private" | "leaks" | "heuristic_private" | ...
    std::size_t colluder_count = 0;
};

/// Histogram over observable colluder-share tuples for one secret vector
/// (one scalar per data segment), counting every noise assignment once.
std::vector<std::uint64_t> share_distribution(
    const std::vector<FieldElement>& secret, const CodingScheme& scheme,
    const std::vector<std::size_t>& colluders, std::uint64_t budget);

/// Plug-in mutual information (bits) of a joint count table (rows = secrets,
/// cols = tuples). Returns exactly 0.0 when the integer identity
/// n_st * N == n_s * n_t holds everywhere.
double mutual_information_bits(const std::vector<std::vector<std::uint64_t>>& joint);

/// Full audit: enumerate all p^l secrets x p^t noises, return the exact
/// mutual information between the secret and the colluders' share tuple.
AuditReport audit_encoding(const AuditConfig& cfg);

/// Sampled fallback for configurations beyond the enumeration budget:
/// chi-square uniformity check over sampled noise, flagged heuristic.
AuditReport audit_encoding_sampled(const AuditConfig& cfg, std::uint64_t samples,
                                   std::uint64_t seed);

}  // namespace fedlcc
