#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fedlcc/clustering.hpp"
#include "fedlcc/dataset.hpp"
#include "fedlcc/distance_matrix.hpp"
#include "fedlcc/lcc.hpp"
#include "fedlcc/wire.hpp"

namespace fedlcc {

enum class PartitionMode { EvenIid, LabelSkew, Dirichlet };

struct PartitionSpec {
    PartitionMode mode = PartitionMode::EvenIid;
    std::size_t num_clients = 0;
    double skew_p = 0.0;         // label_skew: fraction from the designated class
    double dirichlet_alpha = 1;  // dirichlet concentration
    std::uint64_t seed = 0;
};

PartitionMode parse_partition_mode(const std::string& name);

/// Disjoint cover of [0, n): global sample indices per client. Deterministic
/// in the seed; throws ConfigError if any client ends up empty.
std::vector<std::vector<std::size_t>> partition(const Dataset& dataset,
                                                const PartitionSpec& spec);

struct ProtocolMessage {
    enum class Kind : std::uint8_t { ShareDelivery = 0, DistanceReport = 1 };
    Kind kind = Kind::ShareDelivery;
    std::uint32_t sender = 0;
    std::uint32_t receiver = 0;  // kServerId for reports
    std::vector<std::byte> payload;
};

constexpr std::uint32_t kServerId = 0xffffffffu;

struct PhaseTimings {
    double share_s = 0.0;     // encode + deliver
    double distance_s = 0.0;  // per-client encoded distances
    double decode_s = 0.0;    // server-side reconstruction
};

struct Transcript {
    WireHeader scheme_echo;  // p,q,l,t,m,n,d (client field unused)
    std::vector<std::uint64_t> alpha;  // evaluation points, so files replay alone
    std::vector<std::uint64_t> beta;
    std::vector<ProtocolMessage> messages;
    PhaseTimings timings;
    std::uint64_t share_count = 0;  // total shares delivered (n*m)
};

/// Rebuild the coding scheme a transcript was produced under.
CodingScheme scheme_from_transcript(const Transcript& t);

struct RunOptions {
    std::uint64_t noise_seed = 0;
    unsigned threads = 1;             // 1 = bit-exact reference mode
    bool record_transcript = true;    // keep message payloads in memory
    DequantExponent dequant = DequantExponent::TwoQ;
};

struct ProtocolOutput {
    GlobalDistanceMatrix matrix;
    Transcript transcript;
    std::optional<ClusterAssignment> assignment;
};

/// One-shot protocol: validate, partition, share, compute encoded distances,
/// reconstruct. With a backend config the clustering step runs on the result.
ProtocolOutput run_protocol(const Dataset& dataset, const PartitionSpec& spec,
                            const CodingScheme& scheme,
                            const BackendConfig* backend = nullptr,
                            const RunOptions& opts = {});

/// Reconstruct D from a transcript's distance reports. Accepts any subset of
/// at least 2l+2t-1 reports; fewer is an error naming the missing clients.
GlobalDistanceMatrix replay_decode(const Transcript& transcript,
                                   const CodingScheme& scheme,
                                   DequantExponent dequant = DequantExponent::TwoQ);

void save_transcript(const Transcript& t, const std::string& path);
Transcript load_transcript(const std::string& path);
/// JSON sidecar with per-phase timings and message counts.
void save_transcript_timings(const Transcript& t, const std::string& path);

}  // namespace fedlcc
