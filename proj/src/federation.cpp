#include "fedlcc/federation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "fedlcc/rng.hpp"

namespace fedlcc {

PartitionMode parse_partition_mode(const std::string& name) {
    if (name == "even" || name == "iid") return PartitionMode::EvenIid;
    if (name == "label_skew" || name == "skew") return PartitionMode::LabelSkew;
    if (name == "dirichlet") return PartitionMode::Dirichlet;
    throw ConfigError("unknown partition mode '" + name + "' (iid|label_skew|dirichlet)");
}

namespace {

void shuffle_indices(std::vector<std::size_t>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.next_below(i)]);
}

std::vector<std::size_t> client_quotas(std::size_t n, std::size_t m) {
    std::vector<std::size_t> q(m, n / m);
    for (std::size_t j = 0; j < n % m; ++j) ++q[j];
    return q;
}

// log of a Gamma(alpha, 1) draw; stable for very small alpha.
double log_gamma_draw(Rng& rng, double alpha) {
    // Marsaglia-Tsang for alpha >= 1; boost via log(U)/alpha below 1.
    double boost = 0.0;
    double a = alpha;
    if (a < 1.0) {
        boost = std::log(rng.next_unit_open_low()) / a;
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.next_gaussian();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_unit_open_low();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
            return std::log(d * v) + boost;
    }
}

}  // namespace

std::vector<std::vector<std::size_t>> partition(const Dataset& dataset,
                                                const PartitionSpec& spec) {
    const std::size_t n = dataset.n();
    const std::size_t m = spec.num_clients;
    if (m == 0) throw ConfigError("partition: need at least one client");
    if (m > n)
        throw ConfigError("partition: more clients (" + std::to_string(m) +
                          ") than samples (" + std::to_string(n) + ")");
    if ((spec.mode == PartitionMode::LabelSkew ||
         spec.mode == PartitionMode::Dirichlet) &&
        !dataset.labeled())
        throw ConfigError("partition: label-aware modes need a labeled dataset");

    Rng rng(mix_keys(spec.seed, 0x70617274));
    std::vector<std::vector<std::size_t>> clients(m);

    switch (spec.mode) {
        case PartitionMode::EvenIid: {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            shuffle_indices(order, rng);
            for (std::size_t i = 0; i < n; ++i) clients[i % m].push_back(order[i]);
            break;
        }
        case PartitionMode::LabelSkew: {
            if (spec.skew_p < 0.0 || spec.skew_p > 1.0)
                throw ConfigError("partition: skew fraction must lie in [0,1]");
            // class pools, shuffled
            std::map<int, std::vector<std::size_t>> pools;
            for (std::size_t i = 0; i < n; ++i) pools[dataset.labels[i]].push_back(i);
            std::vector<int> classes;
            for (auto& [c, pool] : pools) {
                classes.push_back(c);
                shuffle_indices(pool, rng);
            }
            const auto quota = client_quotas(n, m);
            // skewed portion: client j draws round(p * quota) from class (j mod k*)
            for (std::size_t j = 0; j < m; ++j) {
                auto& pool = pools[classes[j % classes.size()]];
                std::size_t want = static_cast<std::size_t>(
                    std::llround(spec.skew_p * static_cast<double>(quota[j])));
                want = std::min(want, pool.size());
                for (std::size_t i = 0; i < want; ++i) {
                    clients[j].push_back(pool.back());
                    pool.pop_back();
                }
            }
            // remainder: uniform over everything left
            std::vector<std::size_t> rest;
            for (auto& [c, pool] : pools) rest.insert(rest.end(), pool.begin(), pool.end());
            std::sort(rest.begin(), rest.end());
            shuffle_indices(rest, rng);
            std::size_t cursor = 0;
            for (std::size_t j = 0; j < m; ++j)
                while (clients[j].size() < quota[j] && cursor < rest.size())
                    clients[j].push_back(rest[cursor++]);
            // ragged leftovers (rounding) round-robin
            for (std::size_t j = 0; cursor < rest.size(); ++cursor, ++j)
                clients[j % m].push_back(rest[cursor]);
            break;
        }
        case PartitionMode::Dirichlet: {
            if (spec.dirichlet_alpha <= 0.0)
                throw ConfigError("partition: dirichlet alpha must be positive");
            std::map<int, std::vector<std::size_t>> pools;
            for (std::size_t i = 0; i < n; ++i) pools[dataset.labels[i]].push_back(i);
            for (auto& [c, pool] : pools) {
                shuffle_indices(pool, rng);
                // proportions over clients, computed in log space
                std::vector<double> logs(m);
                for (std::size_t j = 0; j < m; ++j)
                    logs[j] = log_gamma_draw(rng, spec.dirichlet_alpha);
                const double mx = *std::max_element(logs.begin(), logs.end());
                std::vector<double> props(m);
                double sum = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    props[j] = std::exp(logs[j] - mx);
                    sum += props[j];
                }
                // largest-remainder apportionment of the class size
                std::vector<std::size_t> counts(m, 0);
                std::vector<std::pair<double, std::size_t>> rema(m);
                std::size_t assigned = 0;
                for (std::size_t j = 0; j < m; ++j) {
                    const double exact = pool.size() * props[j] / sum;
                    counts[j] = static_cast<std::size_t>(exact);
                    rema[j] = {exact - counts[j], j};
                    assigned += counts[j];
                }
                std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
                    if (a.first != b.first) return a.first > b.first;
                    return a.second < b.second;
                });
                for (std::size_t r = 0; assigned < pool.size(); ++r, ++assigned)
                    ++counts[rema[r % m].second];
                std::size_t cursor = 0;
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t i = 0; i < counts[j]; ++i)
                        clients[j].push_back(pool[cursor++]);
            }
            break;
        }
    }

    for (std::size_t j = 0; j < m; ++j) {
        if (clients[j].empty())
            throw ConfigError("partition: client " + std::to_string(j) +
                              " received zero samples; lower the client count");
        std::sort(clients[j].begin(), clients[j].end());
    }
    return clients;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Static-chunk parallel map; results land in disjoint slots so the outcome is
// independent of the worker count.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned workers =
        std::min<unsigned>(threads, static_cast<unsigned>(count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace

ProtocolOutput run_protocol(const Dataset& dataset, const PartitionSpec& spec,
                            const CodingScheme& scheme,
                            const BackendConfig* backend, const RunOptions& opts) {
    const std::size_t n = dataset.n();
    const std::size_t d = dataset.d();
    const std::size_t m = scheme.m();
    const FieldParams& F = scheme.params();

    if (spec.num_clients != m)
        throw ConfigError("partition spec has " + std::to_string(spec.num_clients) +
                          " clients but the scheme encodes for " + std::to_string(m));
    if (!scheme.decodable())
        throw InfeasibleError("scheme cannot decode: m=" + std::to_string(m) +
                              " < " + std::to_string(scheme.threshold()));
    check_feasibility(dataset.max_abs_value(), d, F);

    auto owners_of = partition(dataset, spec);
    std::vector<std::size_t> owner(n);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i : owners_of[j]) owner[i] = j;

    ProtocolOutput out;
    Transcript& tr = out.transcript;
    tr.scheme_echo = make_header(scheme, n, d, 0);
    for (const auto& a : scheme.alpha()) tr.alpha.push_back(a.v);
    for (const auto& b : scheme.beta()) tr.beta.push_back(b.v);

    const std::size_t seg_len = scheme.segment_len(d);

    // Phase 1: encode + share. Each owner encodes its samples and delivers one
    // batch per receiver; receivers assemble their ShareMatrix.
    auto t0 = Clock::now();
    std::vector<ShareMatrix> Z(m);
    for (std::size_t j = 0; j < m; ++j) {
        Z[j].client = j;
        Z[j].n = n;
        Z[j].seg_len = seg_len;
        Z[j].rows.assign(n * seg_len, FieldElement{0});
    }
    std::vector<std::vector<QuantizedSample>> quantized(m);
    parallel_for(m, opts.threads, [&](std::size_t j) {
        quantized[j].reserve(owners_of[j].size());
        for (std::size_t i : owners_of[j])
            quantized[j].push_back(real_to_field(dataset.features.row(i), F));
    });

    // batches[owner][receiver]
    std::vector<std::vector<ShareBatch>> batches(m);
    parallel_for(m, opts.threads, [&](std::size_t j) {
        batches[j].resize(m);
        for (std::size_t r = 0; r < m; ++r) {
            batches[j][r].owner = static_cast<std::uint32_t>(j);
            batches[j][r].receiver = static_cast<std::uint32_t>(r);
            batches[j][r].shares.reserve(owners_of[j].size());
        }
        for (std::size_t local = 0; local < owners_of[j].size(); ++local) {
            const std::size_t i = owners_of[j][local];
            auto seg = segment(quantized[j][local], scheme, opts.noise_seed, i);
            auto shares = encode(seg, scheme, j, i);
            for (std::size_t r = 0; r < m; ++r)
                batches[j][r].shares.push_back(std::move(shares[r]));
        }
    });

    // deliver through the wire format, canonical order (owner, receiver)
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t r = 0; r < m; ++r) {
            const WireHeader header = make_header(scheme, n, d,
                                                  static_cast<std::uint32_t>(r));
            auto bytes = serialize_share_batch(batches[j][r], header);
            WireHeader echo;
            ShareBatch received = deserialize_share_batch(bytes, &echo);
            check_header(echo, scheme, n, d);
            for (const auto& s : received.shares) {
                if (s.sample_index >= n) throw DataError("share for unknown sample");
                auto row = Z[r].row(s.sample_index);
                std::copy(s.payload.begin(), s.payload.end(), row.begin());
            }
            tr.share_count += received.shares.size();
            if (opts.record_transcript)
                tr.messages.push_back({ProtocolMessage::Kind::ShareDelivery,
                                       static_cast<std::uint32_t>(j),
                                       static_cast<std::uint32_t>(r),
                                       std::move(bytes)});
        }
        batches[j].clear();
        batches[j].shrink_to_fit();
    }
    tr.timings.share_s = seconds_since(t0);

    // Phase 2: per-client encoded distances, reported to the server.
    // Phase 3: the server streams each report into the weighted accumulator.
    const auto& weights = scheme.full_decode_weights();
    const std::size_t pair_count = n * (n - 1) / 2;
    std::vector<FieldElement> acc(pair_count, FieldElement{0});
    double distance_s = 0.0, decode_s = 0.0;

    for (std::size_t j = 0; j < m; ++j) {
        auto td = Clock::now();
        DistanceReport report;
        report.client = static_cast<std::uint32_t>(j);
        report.n = n;
        report.values.assign(n * n, FieldElement{0});
        parallel_for(n, opts.threads, [&](std::size_t i) {
            for (std::size_t i2 = i + 1; i2 < n; ++i2) {
                const FieldElement v = encoded_distance(Z[j].row(i), Z[j].row(i2), F);
                report.values[i * n + i2] = v;
                report.values[i2 * n + i] = v;
            }
        });
        distance_s += seconds_since(td);

        auto ts = Clock::now();
        const WireHeader header = make_header(scheme, n, d,
                                              static_cast<std::uint32_t>(j));
        auto bytes = serialize_distance_report(report, header);
        WireHeader echo;
        DistanceReport received = deserialize_distance_report(bytes, &echo);
        check_header(echo, scheme, n, d);
        const FieldElement w = weights[j];
        parallel_for(n, opts.threads, [&](std::size_t i) {
            std::size_t idx = i * n - i * (i + 1) / 2 - i - 1;
            for (std::size_t i2 = i + 1; i2 < n; ++i2)
                acc[idx + i2] = F.add(acc[idx + i2],
                                      F.mul(w, received.values[i * n + i2]));
        });
        decode_s += seconds_since(ts);
        if (opts.record_transcript)
            tr.messages.push_back({ProtocolMessage::Kind::DistanceReport,
                                   static_cast<std::uint32_t>(j), kServerId,
                                   std::move(bytes)});
    }
    tr.timings.distance_s = distance_s;

    auto tf = Clock::now();
    out.matrix = assemble(n, acc, F, opts.dequant);
    tr.timings.decode_s = decode_s + seconds_since(tf);

    if (backend) out.assignment = run_backend(out.matrix, *backend);
    return out;
}

GlobalDistanceMatrix replay_decode(const Transcript& transcript,
                                   const CodingScheme& scheme,
                                   DequantExponent dequant) {
    const std::uint64_t n = transcript.scheme_echo.n;
    const std::uint64_t d = transcript.scheme_echo.d;
    std::map<std::uint32_t, DistanceReport> reports;
    for (const auto& msg : transcript.messages) {
        if (msg.kind != ProtocolMessage::Kind::DistanceReport) continue;
        WireHeader echo;
        DistanceReport rep = deserialize_distance_report(msg.payload, &echo);
        check_header(echo, scheme, n, d);
        if (rep.n != n) throw DataError("distance report with wrong sample count");
        const std::uint32_t client = rep.client;
        if (client >= scheme.m())
            throw DataError("distance report from unknown client " +
                            std::to_string(client));
        if (!reports.emplace(client, std::move(rep)).second)
            throw DataError("duplicate distance report from client " +
                            std::to_string(client));
    }
    if (reports.size() < scheme.threshold()) {
        std::string missing;
        for (std::uint32_t j = 0; j < scheme.m(); ++j)
            if (!reports.count(j)) missing += (missing.empty() ? "" : ", ") +
                                              std::to_string(j);
        throw DataError("incomplete transcript: " + std::to_string(reports.size()) +
                        " of " + std::to_string(scheme.m()) +
                        " reports, need at least " +
                        std::to_string(scheme.threshold()) +
                        "; missing clients: " + missing);
    }

    std::vector<std::size_t> present;
    for (const auto& [j, rep] : reports) present.push_back(j);
    std::vector<FieldElement> weights;
    if (present.size() == scheme.m()) {
        weights = scheme.full_decode_weights();
    } else {
        weights = decode_weights_for_clients(scheme, present);
    }

    const FieldParams& F = scheme.params();
    const std::size_t pair_count = n * (n - 1) / 2;
    std::vector<FieldElement> acc(pair_count, FieldElement{0});
    std::size_t wi = 0;
    for (std::size_t j : present) {
        const auto& rep = reports.at(static_cast<std::uint32_t>(j));
        const FieldElement w = weights[wi++];
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t i2 = i + 1; i2 < n; ++i2, ++idx)
                acc[idx] = F.add(acc[idx], F.mul(w, rep.values[i * n + i2]));
    }
    return assemble(n, acc, F, dequant);
}

namespace {
constexpr char kTranscriptMagic[8] = {'F', 'L', 'C', 'T', 'R', 'N', '0', '1'};
}

CodingScheme scheme_from_transcript(const Transcript& t) {
    FieldParams params(t.scheme_echo.p, t.scheme_echo.q);
    std::vector<FieldElement> alpha, beta;
    for (auto v : t.alpha) alpha.push_back({v});
    for (auto v : t.beta) beta.push_back({v});
    return CodingScheme(t.scheme_echo.m, t.scheme_echo.l, t.scheme_echo.t,
                        std::move(alpha), std::move(beta), params);
}

void save_transcript(const Transcript& t, const std::string& path) {
    WireWriter w;
    w.put_magic(kTranscriptMagic);
    w.put_header(t.scheme_echo);
    w.put_u64(t.alpha.size());
    for (auto v : t.alpha) w.put_u64(v);
    w.put_u64(t.beta.size());
    for (auto v : t.beta) w.put_u64(v);
    w.put_u64(t.share_count);
    w.put_u64(t.messages.size());
    for (const auto& msg : t.messages) {
        w.put_u8(static_cast<std::uint8_t>(msg.kind));
        w.put_u32(msg.sender);
        w.put_u32(msg.receiver);
        w.put_u64(msg.payload.size());
        w.put_bytes(msg.payload);
    }
    write_file(path, w.bytes());
}

Transcript load_transcript(const std::string& path) {
    auto bytes = read_file(path);
    WireReader r(bytes);
    r.expect_magic(kTranscriptMagic);
    Transcript t;
    t.scheme_echo = r.get_header();
    t.alpha.resize(r.get_u64());
    for (auto& v : t.alpha) v = r.get_u64();
    t.beta.resize(r.get_u64());
    for (auto& v : t.beta) v = r.get_u64();
    t.share_count = r.get_u64();
    const std::uint64_t count = r.get_u64();
    t.messages.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        ProtocolMessage msg;
        msg.kind = static_cast<ProtocolMessage::Kind>(r.get_u8());
        msg.sender = r.get_u32();
        msg.receiver = r.get_u32();
        const std::uint64_t len = r.get_u64();
        msg.payload = r.get_bytes(len);
        t.messages.push_back(std::move(msg));
    }
    if (!r.done()) throw DataError("trailing bytes in transcript '" + path + "'");
    return t;
}

void save_transcript_timings(const Transcript& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    std::size_t deliveries = 0, reports = 0;
    for (const auto& m : t.messages) {
        if (m.kind == ProtocolMessage::Kind::ShareDelivery) ++deliveries;
        else ++reports;
    }
    out << "{\n"
        << "  \"share_phase_s\": " << t.timings.share_s << ",\n"
        << "  \"distance_phase_s\": " << t.timings.distance_s << ",\n"
        << "  \"decode_phase_s\": " << t.timings.decode_s << ",\n"
        << "  \"share_count\": " << t.share_count << ",\n"
        << "  \"delivery_messages\": " << deliveries << ",\n"
        << "  \"report_messages\": " << reports << "\n"
        << "}\n";
}

}  // namespace fedlcc
