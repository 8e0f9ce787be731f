// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "fedlcc/experiment.hpp"
#include "fedlcc/metrics.hpp"
#include "fedlcc/privacy.hpp"
#include "fedlcc/rng.hpp"

using namespace fedlcc;

namespace {

int failures = 0;

void criterion(int id, const std::string& name, double budget_s,
               const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
        body();
    } catch (const std::exception& e) {
        error = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (error.empty() && elapsed > budget_s)
        error = "exceeded runtime budget of " + std::to_string(budget_s) + "s";
    if (error.empty()) {
        std::printf("PASS criterion %2d (%.1fs): %s\n", id, elapsed, name.c_str());
    } else {
        ++failures;
        std::printf("FAIL criterion %2d (%.1fs): %s\n        %s\n", id, elapsed,
                    name.c_str(), error.c_str());
    }
    std::fflush(stdout);
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

std::string data_dir() {
    return std::filesystem::exists("data/iris.csv") ? "data" : "../data";
}

Dataset iris_l2() {
    DataConfig dc;
    dc.source = "iris";
    dc.data_dir = data_dir();
    dc.normalize = "l2";
    return load_experiment_dataset(dc, 0);
}

BackendConfig backend_cfg(const std::string& name, std::size_t k,
                          std::uint64_t seed) {
    BackendConfig bc;
    bc.backend = name;
    bc.k = k;
    bc.seed = name == "nmf" ? 1 : seed;  // nmf seed pinned (see README)
    return bc;
}

PartitionSpec part_spec(PartitionMode mode, std::size_t m, double p, double alpha,
                        std::uint64_t seed) {
    PartitionSpec s;
    s.mode = mode;
    s.num_clients = m;
    s.skew_p = p;
    s.dirichlet_alpha = alpha;
    s.seed = seed;
    return s;
}

// ---- criterion 1 -----------------------------------------------------------

void exact_field_reconstruction() {
    struct Cfg {
        std::size_t d, l, t, m;
        std::uint64_t p;
    };
    std::vector<Cfg> grid;
    for (std::size_t d : {3, 8, 17})
        for (std::size_t l : {1, 2, 4})
            for (std::size_t t : {1, 2})
                for (bool extra : {false, true})
                    for (std::uint64_t p : {kDefaultPrime, std::uint64_t{10007}})
                        grid.push_back({d, l, t,
                                        2 * l + 2 * t - 1 + (extra ? 4u : 0u), p});
    // 50 random configurations out of the 72
    Rng rng(20240817);
    for (std::size_t i = grid.size(); i > 1; --i)
        std::swap(grid[i - 1], grid[rng.next_below(i)]);
    grid.resize(50);

    const std::size_t n = 50;
    for (const Cfg& c : grid) {
        FieldParams F(c.p, 0);
        auto scheme = CodingScheme::make_default(c.m, c.l, c.t, F);
        // uniform field-domain samples: exactness must hold everywhere
        std::vector<SegmentedSample> segs(n);
        std::vector<std::vector<Share>> shares(n);
        for (std::size_t i = 0; i < n; ++i) {
            QuantizedSample x;
            for (std::size_t j = 0; j < c.d; ++j)
                x.coords.push_back({rng.next_below(c.p)});
            segs[i] = segment(x, scheme, 555, i);
            shares[i] = encode(segs[i], scheme, 0, i);
        }
        std::vector<FieldElement> reports(c.m);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                for (std::size_t j = 0; j < c.m; ++j)
                    reports[j] = encoded_distance(shares[a][j].payload,
                                                  shares[b][j].payload, F);
                FieldElement decoded = decode_distance(reports, scheme);
                FieldElement oracle{0};
                for (std::size_t o = 0; o < c.l; ++o)
                    oracle = F.add(oracle, encoded_distance(segs[a].segments[o],
                                                            segs[b].segments[o], F));
                require(decoded == oracle,
                        "decode mismatch at d=" + std::to_string(c.d) +
                            " l=" + std::to_string(c.l) + " t=" + std::to_string(c.t) +
                            " m=" + std::to_string(c.m) + " p=" + std::to_string(c.p));
            }
        }
    }
}

// ---- criterion 2 -----------------------------------------------------------

double reconstruct_rmse(const Dataset& ds, std::size_t m, std::size_t l,
                        std::size_t t, std::uint64_t seed) {
    auto scheme = CodingScheme::make_default(m, l, t, FieldParams::defaults());
    RunOptions opts;
    opts.noise_seed = seed;
    opts.record_transcript = false;
    auto out = run_protocol(ds, part_spec(PartitionMode::EvenIid, m, 0, 1, seed),
                            scheme, nullptr, opts);
    return rmse(out.matrix, oracle_distance_matrix(ds.features));
}

void real_domain_fidelity() {
    Dataset iris = iris_l2();
    const double r_iris = reconstruct_rmse(iris, 3, 1, 1, 1);
    require(r_iris <= 1e-3, "iris RMSE " + std::to_string(r_iris) + " above 1e-3");

    Dataset small = synth_blobs(150, 3, 8, 0.2, 5);
    Dataset large = synth_blobs(1000, 3, 8, 0.2, 5);
    const double r_small = reconstruct_rmse(small, 7, 2, 1, 2);
    const double r_large = reconstruct_rmse(large, 7, 2, 1, 2);
    require(r_small <= 1e-3 && r_large <= 1e-3, "synthetic RMSE above 1e-3");
    require(r_large <= 2.0 * r_small && r_small <= 2.0 * r_large,
            "RMSE not flat across n: " + std::to_string(r_small) + " vs " +
                std::to_string(r_large));
}

// ---- criterion 3 -----------------------------------------------------------

void distribution_invariance() {
    Dataset iris = iris_l2();
    auto scheme = CodingScheme::make_default(3, 1, 1, FieldParams::defaults());
    RunOptions opts;
    opts.noise_seed = 777;
    opts.record_transcript = false;

    std::vector<GlobalDistanceMatrix> mats;
    for (double p : {0.0, 0.5, 1.0})
        mats.push_back(run_protocol(iris,
                                    part_spec(PartitionMode::LabelSkew, 3, p, 1, 3),
                                    scheme, nullptr, opts)
                           .matrix);
    for (double alpha : {0.001, 1000.0}) {
        // find the first seed giving a valid (no empty client) partition
        for (std::uint64_t seed = 0;; ++seed) {
            require(seed < 64, "no valid dirichlet partition seed found");
            try {
                mats.push_back(
                    run_protocol(iris,
                                 part_spec(PartitionMode::Dirichlet, 3, 0, alpha, seed),
                                 scheme, nullptr, opts)
                        .matrix);
                break;
            } catch (const ConfigError&) {
                continue;  // empty client under extreme skew; try the next seed
            }
        }
    }
    for (std::size_t i = 1; i < mats.size(); ++i)
        require(mats[i] == mats[0], "matrix differs between partitions");
}

// ---- criteria 4 and 5 ------------------------------------------------------

void iris_parity() {
    Dataset iris = iris_l2();
    auto scheme = CodingScheme::make_default(3, 1, 1, FieldParams::defaults());
    GlobalDistanceMatrix oracle = oracle_distance_matrix(iris.features);
    RunOptions opts;
    opts.noise_seed = mix_keys(1, 0x6e6f69);
    opts.record_transcript = false;

    const std::vector<std::string> names = {"sc", "km", "fcm", "nmf"};
    std::vector<std::vector<double>> kappas(names.size());
    std::vector<std::vector<double>> nmis(names.size());
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        auto out = run_protocol(iris, part_spec(PartitionMode::LabelSkew, 3, p, 1, 1),
                                scheme, nullptr, opts);
        for (std::size_t b = 0; b < names.size(); ++b) {
            auto a = run_backend(out.matrix, backend_cfg(names[b], 3, 1));
            kappas[b].push_back(kappa(a.labels, iris.labels));
            nmis[b].push_back(nmi(a.labels, iris.labels));
        }
    }
    for (std::size_t b = 0; b < names.size(); ++b)
        for (double v : kappas[b])
            require(v == kappas[b][0],
                    names[b] + " kappa varies across non-IID levels");

    auto sc_oracle = run_backend(oracle, backend_cfg("sc", 3, 1));
    const double k_sc_oracle = kappa(sc_oracle.labels, iris.labels);
    require(kappas[0][0] == k_sc_oracle,
            "reconstructed-D SC kappa differs from oracle-D SC kappa");
    require(kappas[0][0] >= 0.90 && kappas[0][0] <= 1.0,
            "SC kappa " + std::to_string(kappas[0][0]) + " outside [0.90, 1.0]");
    for (std::size_t b = 1; b < names.size(); ++b)
        require(kappas[b][0] >= 0.90, names[b] + " kappa " +
                                          std::to_string(kappas[b][0]) +
                                          " below 0.90");
    for (std::size_t b = 0; b < names.size(); ++b)
        require(nmis[b][0] >= 0.85,
                names[b] + " NMI " + std::to_string(nmis[b][0]) + " below 0.85");
}

void iris_generality() {
    Dataset iris = iris_l2();
    auto scheme = CodingScheme::make_default(3, 1, 1, FieldParams::defaults());
    RunOptions opts;
    opts.noise_seed = mix_keys(1, 0x6e6f69);
    opts.record_transcript = false;
    auto out = run_protocol(iris, part_spec(PartitionMode::EvenIid, 3, 0, 1, 1),
                            scheme, nullptr, opts);

    const double k_hc =
        kappa(run_backend(out.matrix, backend_cfg("hc", 3, 1)).labels, iris.labels);
    require(k_hc >= 0.90, "HC kappa " + std::to_string(k_hc) + " below 0.90");

    const double k_kmed =
        kappa(run_backend(out.matrix, backend_cfg("kmed", 3, 1)).labels, iris.labels);
    require(k_kmed >= 0.89, "KMed kappa " + std::to_string(k_kmed) + " below 0.89");

    BackendConfig db = backend_cfg("dbscan", 3, 1);
    db.eps = 0.02;  // squared-distance units, tuned
    db.min_pts = 5;
    const double k_db =
        kappa(run_backend(out.matrix, db).labels, iris.labels);
    require(k_db >= 0.40 && k_db <= 0.60,
            "DBSCAN kappa " + std::to_string(k_db) + " outside [0.40, 0.60]");
}

// ---- criterion 6 -----------------------------------------------------------

void feasibility_gate() {
    Dataset ds = synth_blobs(40, 4, 8, 0.15, 11);
    // quantization floor from the quantizer's error bound
    double max_diff = 0.0;
    for (std::size_t i = 0; i < ds.n(); ++i)
        for (std::size_t j = i + 1; j < ds.n(); ++j)
            for (std::size_t c = 0; c < ds.d(); ++c)
                max_diff = std::max(max_diff, std::abs(ds.features.at(i, c) -
                                                       ds.features.at(j, c)));
    const double floor = 2.0 * ds.d() * std::ldexp(max_diff, -16) +
                         ds.d() * std::ldexp(0.25, -32);

    ExperimentConfig cfg;
    cfg.seed = 4;
    auto cells = sweep_feasibility(ds, cfg, 3, 15, 4);
    std::size_t feasible = 0, infeasible = 0;
    for (const auto& cell : cells) {
        if (cell.m >= 2 * cell.l + 2 * cell.t - 1) {
            ++feasible;
            require(cell.feasible, "compliant cell marked infeasible");
            require(cell.rmse_vs_oracle <= floor,
                    "cell m=" + std::to_string(cell.m) + " l=" +
                        std::to_string(cell.l) + " t=" + std::to_string(cell.t) +
                        " RMSE " + std::to_string(cell.rmse_vs_oracle) +
                        " above the quantization floor " + std::to_string(floor));
        } else {
            ++infeasible;
            require(!cell.feasible, "violating cell not refused");
        }
    }
    require(feasible > 0 && infeasible > 0, "sweep covered only one region");
}

// ---- criterion 7 -----------------------------------------------------------

void privacy_audit() {
    AuditConfig cfg;
    cfg.p_audit = 31;
    cfg.l = 1;
    cfg.t = 1;
    cfg.m = 5;
    for (std::size_t j = 0; j < 5; ++j) {
        cfg.colluders = {j};
        auto rep = audit_encoding(cfg);
        require(rep.exact && rep.mi_bits == 0.0,
                "client " + std::to_string(j) + " share leaks " +
                    std::to_string(rep.mi_bits) + " bits");
    }
    cfg.colluders = {0};
    cfg.t = 0;
    auto bare = audit_encoding(cfg);
    require(std::abs(bare.mi_bits - std::log2(31.0)) < 1e-12,
            "t=0 control expected log2(31) bits, got " +
                std::to_string(bare.mi_bits));
    cfg.t = 1;
    cfg.colluders = {1, 4};
    auto pair = audit_encoding(cfg);
    require(pair.mi_bits > 0.0, "t+1 colluders unexpectedly see nothing");
}

// ---- criterion 8 -----------------------------------------------------------

void segmentation_speedup() {
    auto rows = run_bench({2000}, {2, 4, 8}, 1, 0, 16, 9, 1, "");
    require(rows.size() == 3, "bench row count");
    require(rows[0].distance_s > rows[1].distance_s &&
                rows[1].distance_s > rows[2].distance_s,
            "distance phase not strictly decreasing in l: " +
                std::to_string(rows[0].distance_s) + " / " +
                std::to_string(rows[1].distance_s) + " / " +
                std::to_string(rows[2].distance_s));
}

// ---- criterion 9 -----------------------------------------------------------

double brute_force_assignment_cost(const Matrix& cost) {
    const std::size_t n = std::max(cost.rows(), cost.cols());
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i < cost.rows() && perm[i] < cost.cols()) acc += cost.at(i, perm[i]);
        best = std::min(best, acc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

void metric_correctness() {
    Rng rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = 1 + rng.next_below(7), c = 1 + rng.next_below(7);
        Matrix cost(r, c);
        for (double& v : cost.data()) v = rng.next_unit() * 9.0;
        auto assign = hungarian(cost);
        double got = 0.0;
        for (std::size_t i = 0; i < r; ++i)
            if (assign[i] != SIZE_MAX) got += cost.at(i, assign[i]);
        const double want = brute_force_assignment_cost(cost);
        require(std::abs(got - want) < 1e-9, "hungarian suboptimal");
    }

    std::vector<int> truth = {0, 0, 1, 1, 2, 2, 2, 0};
    require(kappa(truth, truth) == 1.0, "kappa(perfect) != 1");
    require(nmi(truth, truth) == 1.0, "nmi(perfect) != 1");
    std::vector<int> permuted(truth.size());
    const int perm[3] = {1, 2, 0};
    for (std::size_t i = 0; i < truth.size(); ++i) permuted[i] = perm[truth[i]];
    require(kappa(permuted, truth) == 1.0, "kappa not permutation invariant");
    require(nmi(permuted, truth) == 1.0, "nmi not permutation invariant");

    const std::size_t n = 1000;
    const int k = 4;
    std::vector<int> balanced(n);
    for (std::size_t i = 0; i < n; ++i) balanced[i] = static_cast<int>(i % k);
    double sum = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::vector<int> pred(n);
        for (auto& v : pred) v = static_cast<int>(rng.next_below(k));
        sum += kappa(pred, balanced);
    }
    require(std::abs(sum / 100.0) < 0.05,
            "random-label kappa mean " + std::to_string(sum / 100.0));
}

// ---- criterion 10 ----------------------------------------------------------

double exhaustive_medoid_cost(const Matrix& D, std::size_t k) {
    const std::size_t n = D.rows();
    std::vector<std::size_t> combo(k);
    std::iota(combo.begin(), combo.end(), 0);
    double best = 1e300;
    for (;;) {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double m = 1e300;
            for (std::size_t c : combo) m = std::min(m, D.at(i, c));
            cost += m;
        }
        best = std::min(best, cost);
        std::size_t pos = k;
        while (pos > 0) {
            --pos;
            if (combo[pos] != pos + n - k) break;
        }
        if (combo[pos] == pos + n - k) break;
        ++combo[pos];
        for (std::size_t j = pos + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
    return best;
}

void clustering_oracles() {
    Rng rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.next_below(9);
        const std::size_t k = 1 + rng.next_below(3);
        Matrix pts(n, 2);
        for (double& v : pts.data()) v = rng.next_unit();
        auto D = oracle_distance_matrix(pts);
        BackendConfig cfg = backend_cfg("kmed", k, trial);
        cfg.restarts = 20;
        auto a = kmedoids(D, cfg);
        const double oracle = exhaustive_medoid_cost(D.values(), k);
        require(std::abs(a.objective - oracle) < 1e-9,
                "k-medoids missed the exhaustive optimum");
    }

    Dataset blobs = synth_blobs(120, 3, 4, 0.3, 5);
    auto D = oracle_distance_matrix(blobs.features);
    std::vector<double> hist;
    (void)kmeans_features(D.values(), 3, 0, 1, 300, &hist);
    for (std::size_t i = 1; i < hist.size(); ++i)
        require(hist[i] <= hist[i - 1] * (1 + 1e-12) + 1e-12, "km objective rose");
    hist.clear();
    BackendConfig fcm_cfg = backend_cfg("fcm", 3, 0);
    fcm_cfg.restarts = 1;
    (void)fuzzy_cmeans_on_rows(D, fcm_cfg, nullptr, &hist);
    for (std::size_t i = 1; i < hist.size(); ++i)
        require(hist[i] <= hist[i - 1] * (1 + 1e-9) + 1e-12, "fcm objective rose");
    hist.clear();
    (void)nmf_on_rows(D, backend_cfg("nmf", 3, 0), &hist);
    for (std::size_t i = 1; i < hist.size(); ++i)
        require(hist[i] <= hist[i - 1] * (1 + 1e-12) + 1e-12, "nmf objective rose");

    Dataset rings = synth_rings(400, 2, 0.05, 7);
    auto Dr = oracle_distance_matrix(rings.features);
    BackendConfig sc_cfg = backend_cfg("sc", 2, 0);
    sc_cfg.sc_sigma_sq = 0.02;
    const double k_sc = kappa(spectral(Dr, sc_cfg).labels, rings.labels);
    const double k_km =
        kappa(kmeans_on_rows(Dr, backend_cfg("km", 2, 0)).labels, rings.labels);
    require(k_sc > 0.95, "SC failed to separate rings: " + std::to_string(k_sc));
    require(k_km < 0.5, "KM-on-rows unexpectedly separated rings: " +
                            std::to_string(k_km));
}

}  // namespace

int main() {
    criterion(1, "exact field-level reconstruction over 50 random schemes", 30,
              exact_field_reconstruction);
    criterion(2, "real-domain fidelity (iris RMSE <= 1e-3, flat across n)", 30,
              real_domain_fidelity);
    criterion(3, "distribution invariance across partitions", 60,
              distribution_invariance);
    criterion(4, "iris parity: SC == oracle SC, kappa/NMI floors, constant in p",
              60, iris_parity);
    criterion(5, "iris generality: HC, KMed, DBSCAN", 60, iris_generality);
    criterion(6, "feasibility gate over m in [3,15], l,t in [1,4]", 120,
              feasibility_gate);
    criterion(7, "privacy audit: 0 bits at t=1, controls leak", 30, privacy_audit);
    criterion(8, "client distance phase strictly faster with larger l", 180,
              segmentation_speedup);
    criterion(9, "metric correctness (hungarian, kappa, nmi)", 60,
              metric_correctness);
    criterion(10, "clustering oracles (kmedoids exact, monotone objectives, rings)",
              60, clustering_oracles);

    if (failures) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
