#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedlcc/federation.hpp"
#include "fedlcc/metrics.hpp"

namespace fedlcc {

struct SchemeConfig {
    std::size_t m = 0;  // 0 = one client per true cluster
    std::size_t l = 2;
    std::size_t t = 2;
    std::uint64_t p = kDefaultPrime;
    unsigned q = kDefaultQuantBits;
    std::vector<std::uint64_t> alpha_override;  // empty = defaults
    std::vector<std::uint64_t> beta_override;
};

struct DataConfig {
    std::string source = "iris";  // iris | blobs | rings | path to CSV
    std::string data_dir = "data";
    std::optional<int> label_col = -1;  // CSV label column; negative counts from end
    std::string normalize = "none";
    // synthetic knobs
    std::size_t synth_n = 300;
    std::size_t synth_k = 3;
    std::size_t synth_dim = 2;
    double synth_noise = 0.08;
};

struct ExperimentConfig {
    DataConfig data;
    SchemeConfig scheme;
    std::string partition = "iid";  // iid | label_skew | dirichlet
    double skew_p = 0.0;
    double dirichlet_alpha = 1.0;
    std::vector<BackendConfig> backends;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir;
    std::string dump_matrix;      // empty | path.csv | path.bin
    std::string save_transcript;  // empty | path
    std::string dequant_exponent = "2q";  // 2q | q
    bool nmi_arithmetic = false;  // arithmetic-mean NMI normalization
    std::vector<double> sweep_p;  // non-empty: re-run per non-IID level
    bool sweep_feasibility = false;
};

struct BackendResult {
    std::string backend;
    ClusterAssignment assignment;
    double kappa_v = 0.0;
    double nmi_v = 0.0;
    double seconds = 0.0;
};

struct RunResult {
    GlobalDistanceMatrix matrix;
    Transcript transcript;
    std::vector<BackendResult> backends;
    double rmse_vs_oracle = 0.0;
};

struct ResultRecord {
    std::vector<std::pair<double, RunResult>> runs;  // (non-IID level p, result)
    std::string metrics_json;  // serialized record, byte-stable per config+seed
};

Dataset load_experiment_dataset(const DataConfig& cfg, std::uint64_t seed);
CodingScheme build_scheme(const SchemeConfig& cfg, std::size_t k_star);
PartitionSpec build_partition_spec(const ExperimentConfig& cfg, std::size_t m,
                                   double level);
DequantExponent parse_dequant(const std::string& name);

/// One protocol run plus every configured backend, with metrics when the
/// dataset is labeled.
RunResult run_single(const Dataset& dataset, const CodingScheme& scheme,
                     const PartitionSpec& part, const ExperimentConfig& cfg);

/// The `run`/`reconstruct` subcommand body: executes the configured runs
/// (including sweeps), writes every artifact into out_dir, prints tables.
ResultRecord run_experiment(const ExperimentConfig& cfg, bool with_backends);

struct BenchRow {
    std::size_t n = 0, l = 0, t = 0, m = 0;
    double share_s = 0.0, distance_s = 0.0, decode_s = 0.0;
    double total() const { return share_s + distance_s + decode_s; }
};

/// Timing sweep over (n, l) on synthetic data; reports, asserts nothing.
std::vector<BenchRow> run_bench(const std::vector<std::size_t>& n_values,
                                const std::vector<std::size_t>& l_values,
                                std::size_t t, std::size_t m_override,
                                std::size_t dim, std::uint64_t seed,
                                unsigned threads, const std::string& out_csv);

struct FeasibilityCell {
    std::size_t m = 0, l = 0, t = 0;
    bool feasible = false;
    double rmse_vs_oracle = 0.0;
};

std::vector<FeasibilityCell> sweep_feasibility(const Dataset& dataset,
                                               const ExperimentConfig& cfg,
                                               std::size_t m_lo, std::size_t m_hi,
                                               std::size_t lt_hi);

}  // namespace fedlcc
