#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedlcc/experiment.hpp"
#include "fedlcc/privacy.hpp"

using namespace fedlcc;

namespace {

// km/fcm/sc/kmed derive their seed from the run seed; nmf keeps its own knob
// because its argmax labeling is init-sensitive (see README).
constexpr std::uint64_t kDefaultNmfSeed = 1;

struct CliOptions {
    ExperimentConfig cfg;
    std::string backends = "sc,km,fcm,nmf";
    std::size_t k = 0;  // 0 = number of true classes
    std::size_t restarts = 10;
    std::size_t max_iter = 300;
    double sc_sigma_sq = 0.0;
    double sc_sigma_fraction = 1.0;
    double dbscan_eps = 0.02;
    std::size_t dbscan_min_pts = 5;
    bool eps_is_euclidean = false;
    std::string hc_linkage = "ward";
    double fcm_fuzzifier = 2.0;
    std::uint64_t nmf_seed = kDefaultNmfSeed;
    std::size_t nmf_max_iter = 500;
};

// Flattens "[sc] sigma-sq=..." into the dotted option keys of the experiment
// subcommands, so config files carry one section per backend.
class SectionedConfig : public CLI::ConfigINI {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigINI::from_config(input);
        std::vector<CLI::ConfigItem> out;
        for (const auto& item : items) {
            if (item.name == "++" || item.name == "--") continue;  // section marks
            auto parents = item.parents;
            std::vector<std::string> targets = {"run", "reconstruct"};
            if (!parents.empty() &&
                (parents.front() == "run" || parents.front() == "reconstruct")) {
                targets = {parents.front()};  // echoed configs name the subcommand
                parents.erase(parents.begin());
            }
            std::string name;
            for (const auto& p : parents) name += p + ".";
            name += item.name;
            for (const auto& sub : targets) {
                CLI::ConfigItem ci;
                ci.parents = {sub};
                ci.name = name;
                ci.inputs = item.inputs;
                out.push_back(std::move(ci));
            }
        }
        return out;
    }
};

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

BackendConfig make_backend(const CliOptions& o, const std::string& name) {
    BackendConfig bc;
    bc.backend = name;
    bc.k = o.k;
    bc.max_iter = o.max_iter;
    bc.restarts = o.restarts;
    bc.seed = name == "nmf" ? o.nmf_seed : o.cfg.seed;
    bc.sc_sigma_sq = o.sc_sigma_sq;
    bc.sc_sigma_fraction = o.sc_sigma_fraction;
    bc.eps = o.dbscan_eps;
    bc.min_pts = o.dbscan_min_pts;
    bc.eps_is_euclidean = o.eps_is_euclidean;
    bc.linkage = o.hc_linkage;
    bc.fuzzifier = o.fcm_fuzzifier;
    bc.nmf_max_iter = o.nmf_max_iter;
    return bc;
}

void add_common_options(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--dataset", o.cfg.data.source,
                    "iris | blobs | rings | path to a CSV file");
    cmd->add_option("--data-dir", o.cfg.data.data_dir, "bundled dataset directory");
    cmd->add_option("--label-col", o.cfg.data.label_col,
                    "CSV label column (negative = from end)");
    cmd->add_option("--normalize", o.cfg.data.normalize, "none | minmax | l2");
    cmd->add_option("--synth-n", o.cfg.data.synth_n, "synthetic sample count");
    cmd->add_option("--synth-k", o.cfg.data.synth_k, "synthetic cluster count");
    cmd->add_option("--synth-dim", o.cfg.data.synth_dim, "synthetic dimension");
    cmd->add_option("--synth-noise", o.cfg.data.synth_noise, "synthetic noise sigma");

    cmd->add_option("--clients,-m", o.cfg.scheme.m,
                    "client count (default: number of true clusters)");
    cmd->add_option("-l", o.cfg.scheme.l, "segments per sample");
    cmd->add_option("-t", o.cfg.scheme.t, "noise segments");
    cmd->add_option("--prime,-p", o.cfg.scheme.p, "field modulus");
    cmd->add_option("-q", o.cfg.scheme.q, "quantization exponent");
    cmd->add_option("--alpha", o.cfg.scheme.alpha_override,
                    "construction points override")
        ->delimiter(',');
    cmd->add_option("--beta", o.cfg.scheme.beta_override, "share points override")
        ->delimiter(',');
    cmd->add_option("--dequant-exponent", o.cfg.dequant_exponent,
                    "2q (self-consistent) | q (literal)");

    cmd->add_option("--partition", o.cfg.partition, "iid | label_skew | dirichlet");
    cmd->add_option("--skew-p", o.cfg.skew_p, "label-skew non-IID level in [0,1]");
    cmd->add_option("--dirichlet-alpha", o.cfg.dirichlet_alpha,
                    "dirichlet concentration");

    cmd->add_option("--seed", o.cfg.seed, "run seed (env OMNI_SEED as fallback)");
    cmd->add_option("--threads", o.cfg.threads, "worker cap; 1 = reference mode");
    cmd->add_option("--out", o.cfg.out_dir, "output directory for this run");
    cmd->add_option("--dump-matrix", o.cfg.dump_matrix,
                    "matrix dump file name (.csv or .bin) inside --out");
    cmd->add_option("--save-transcript", o.cfg.save_transcript,
                    "transcript file name inside --out");
}

void add_backend_options(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--backends", o.backends,
                    "comma list of sc,km,fcm,nmf,kmed,dbscan,hc");
    cmd->add_option("--k", o.k, "cluster count (default: true classes)");
    cmd->add_option("--restarts", o.restarts, "km/fcm/kmed restart count");
    cmd->add_option("--max-iter", o.max_iter, "iteration cap");
    // dotted aliases let INI config files use one section per backend
    cmd->add_option("--sc-sigma-sq,--sc.sigma-sq", o.sc_sigma_sq,
                    "fixed kernel sigma^2 (0 = median heuristic)");
    cmd->add_option("--sc-sigma-fraction,--sc.sigma-fraction", o.sc_sigma_fraction,
                    "sigma^2 as a fraction of the median");
    cmd->add_option("--dbscan-eps,--dbscan.eps", o.dbscan_eps,
                    "dbscan eps (squared distance)");
    cmd->add_flag("--eps-is-euclidean,--dbscan.eps-is-euclidean",
                  o.eps_is_euclidean,
                  "interpret --dbscan-eps as a euclidean distance");
    cmd->add_option("--dbscan-min-pts,--dbscan.min-pts", o.dbscan_min_pts,
                    "dbscan core threshold");
    cmd->add_option("--hc-linkage,--hc.linkage", o.hc_linkage,
                    "ward | average | complete | single | weighted");
    cmd->add_option("--fcm-fuzzifier,--fcm.fuzzifier", o.fcm_fuzzifier,
                    "fcm fuzzifier > 1");
    cmd->add_option("--nmf-seed,--nmf.seed", o.nmf_seed, "nmf init seed");
    cmd->add_option("--nmf-max-iter,--nmf.max-iter", o.nmf_max_iter,
                    "nmf iteration cap");
    cmd->add_flag("--nmi-arithmetic", o.cfg.nmi_arithmetic,
                  "report NMI with arithmetic-mean normalization");
}

// Only values that were actually set: the file feeds straight back into
// --config to reproduce the run.
void echo_config(const CLI::App& app, const std::string& out_dir) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    std::ofstream f(std::filesystem::path(out_dir) / "config.echo.ini");
    f << app.config_to_str(false, true);
}

int dispatch(CLI::App& app, int argc, char** argv) {
    CliOptions run_o, rec_o;

    auto* run = app.add_subcommand("run", "end-to-end reconstruction + clustering");
    add_common_options(run, run_o);
    add_backend_options(run, run_o);
    std::vector<double> sweep_p;
    bool sweep_feas = false;
    run->add_option("--sweep-p", sweep_p,
                    "re-run at these label-skew levels (comma separated)")
        ->delimiter(',');
    run->add_flag("--sweep-feasibility", sweep_feas,
                  "sweep m in [3,15], l,t in [1,4] and record per-cell RMSE");

    auto* rec = app.add_subcommand("reconstruct",
                                   "distance matrix only, no clustering");
    add_common_options(rec, rec_o);

    auto* bench = app.add_subcommand("bench", "phase timings over (n, l) sweeps");
    std::vector<std::size_t> bench_n = {2000};
    std::vector<std::size_t> bench_l = {2, 4, 8};
    std::size_t bench_t = 1, bench_m = 0, bench_dim = 16;
    std::uint64_t bench_seed = 0;
    unsigned bench_threads = 1;
    std::string bench_csv;
    bench->add_option("--n", bench_n, "sample counts")->delimiter(',');
    bench->add_option("--l", bench_l, "segment counts")->delimiter(',');
    bench->add_option("-t", bench_t, "noise segments");
    bench->add_option("--clients,-m", bench_m, "client count (0 = smallest valid)");
    bench->add_option("--dim", bench_dim, "synthetic dimension");
    bench->add_option("--seed", bench_seed, "seed");
    bench->add_option("--threads", bench_threads, "worker cap");
    bench->add_option("--out-csv", bench_csv, "timing table CSV path");

    auto* audit = app.add_subcommand("privacy-audit",
                                     "exhaustive share-secrecy audit");
    AuditConfig audit_cfg;
    std::size_t colluder_count = 1;
    std::vector<std::size_t> colluder_ids;
    audit->add_option("--p", audit_cfg.p_audit, "audit field prime");
    audit->add_option("--l", audit_cfg.l, "data segments");
    audit->add_option("--t", audit_cfg.t, "noise segments");
    audit->add_option("--m", audit_cfg.m, "clients");
    audit->add_option("--colluders", colluder_count, "colluding client count");
    audit->add_option("--colluder-ids", colluder_ids,
                      "explicit colluding client ids")
        ->delimiter(',');
    audit->add_option("--budget", audit_cfg.budget, "max enumerated cases");
    std::uint64_t audit_samples = 0, audit_seed = 0;
    audit->add_option("--sampled", audit_samples,
                      "sample count for the chi-square fallback (0 = exhaustive)");
    audit->add_option("--seed", audit_seed, "sampling seed");

    auto* replay = app.add_subcommand("replay",
                                      "rebuild D from a saved transcript");
    std::string replay_path, replay_matrix;
    std::string replay_dequant = "2q";
    replay->add_option("--replay", replay_path, "transcript file")->required();
    replay->add_option("--dump-matrix", replay_matrix,
                       "write the replayed matrix (.csv or .bin)");
    replay->add_option("--dequant-exponent", replay_dequant, "2q | q");

    app.require_subcommand(1);
    app.set_config("--config", "",
                   "INI config file (sections per backend; CLI flags win)");
    app.config_formatter(std::make_shared<SectionedConfig>());
    app.allow_config_extras(CLI::config_extras_mode::ignore);
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    // OMNI_SEED fallback when --seed was not given
    if (const char* env = std::getenv("OMNI_SEED")) {
        const std::uint64_t env_seed = std::strtoull(env, nullptr, 10);
        if (run->parsed() && run->count("--seed") == 0) run_o.cfg.seed = env_seed;
        if (rec->parsed() && rec->count("--seed") == 0) rec_o.cfg.seed = env_seed;
        if (bench->parsed() && bench->count("--seed") == 0) bench_seed = env_seed;
    }

    if (run->parsed()) {
        run_o.cfg.sweep_p = sweep_p;
        run_o.cfg.sweep_feasibility = sweep_feas;
        for (const auto& name : split_list(run_o.backends))
            run_o.cfg.backends.push_back(make_backend(run_o, name));
        echo_config(app, run_o.cfg.out_dir);
        run_experiment(run_o.cfg, /*with_backends=*/true);
        return 0;
    }
    if (rec->parsed()) {
        echo_config(app, rec_o.cfg.out_dir);
        run_experiment(rec_o.cfg, /*with_backends=*/false);
        return 0;
    }
    if (bench->parsed()) {
        run_bench(bench_n, bench_l, bench_t, bench_m, bench_dim, bench_seed,
                  bench_threads, bench_csv);
        return 0;
    }
    if (audit->parsed()) {
        if (colluder_ids.empty())
            for (std::size_t j = 0; j < colluder_count; ++j)
                colluder_ids.push_back(j);
        audit_cfg.colluders = colluder_ids;
        AuditReport rep = audit_samples
                              ? audit_encoding_sampled(audit_cfg, audit_samples,
                                                       audit_seed)
                              : audit_encoding(audit_cfg);
        nlohmann::ordered_json j;
        j["mi_bits"] = rep.mi_bits;
        j["cases_enumerated"] = rep.cases_enumerated;
        j["colluders"] = rep.colluder_count;
        j["exact"] = rep.exact;
        j["verdict"] = rep.verdict;
        std::printf("%s\n", j.dump(2).c_str());
        return rep.verdict == "private" || rep.verdict == "heuristic_private" ? 0 : 1;
    }
    if (replay->parsed()) {
        Transcript t = load_transcript(replay_path);
        CodingScheme scheme = scheme_from_transcript(t);
        GlobalDistanceMatrix D = replay_decode(t, scheme, parse_dequant(replay_dequant));
        std::printf("replayed %zux%zu matrix from %zu messages\n", D.n(), D.n(),
                    t.messages.size());
        if (!replay_matrix.empty()) {
            if (std::filesystem::path(replay_matrix).extension() == ".csv")
                dump_matrix_csv(D, replay_matrix);
            else
                dump_matrix_binary(D, replay_matrix);
        }
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lagrange-coded federated clustering toolkit"};
    try {
        return dispatch(app, argc, argv);
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible configuration: %s\n", e.what());
        return 3;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 4;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
