#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

#include "fedlcc/experiment.hpp"
#include "fedlcc/federation.hpp"

using namespace fedlcc;

namespace {

Dataset tiny_iris_like(std::size_t per_class = 10) {
    // three separable classes, labeled; enough for partition semantics
    return synth_blobs(3 * per_class, 3, 4, 0.05, 99);
}

PartitionSpec spec_of(PartitionMode mode, std::size_t m, double p = 0.0,
                      double alpha = 1.0, std::uint64_t seed = 1) {
    PartitionSpec s;
    s.mode = mode;
    s.num_clients = m;
    s.skew_p = p;
    s.dirichlet_alpha = alpha;
    s.seed = seed;
    return s;
}

Dataset load_iris_repo() {
    DataConfig dc;
    dc.source = "iris";
    dc.data_dir = std::filesystem::exists("data/iris.csv") ? "data" : "../data";
    dc.normalize = "l2";
    return load_experiment_dataset(dc, 0);
}

}  // namespace

TEST_CASE("partition is always a disjoint cover") {
    Dataset ds = tiny_iris_like();
    for (auto mode : {PartitionMode::EvenIid, PartitionMode::LabelSkew,
                      PartitionMode::Dirichlet}) {
        auto clients = partition(ds, spec_of(mode, 5, 0.6, 2.0));
        std::set<std::size_t> seen;
        for (const auto& c : clients) {
            CHECK(!c.empty());
            for (std::size_t i : c) CHECK(seen.insert(i).second);
        }
        CHECK(seen.size() == ds.n());
    }
}

TEST_CASE("fully skewed partition isolates one class per client") {
    Dataset iris = load_iris_repo();
    auto clients = partition(iris, spec_of(PartitionMode::LabelSkew, 3, 1.0));
    for (const auto& c : clients) {
        std::set<int> classes;
        for (std::size_t i : c) classes.insert(iris.labels[i]);
        CHECK(classes.size() == 1);
    }
}

TEST_CASE("iid recovery at p=0: class histograms roughly uniform") {
    Dataset ds = synth_blobs(3000, 3, 2, 0.1, 5);
    auto clients = partition(ds, spec_of(PartitionMode::LabelSkew, 3, 0.0));
    for (const auto& c : clients) {
        std::map<int, std::size_t> hist;
        for (std::size_t i : c) ++hist[ds.labels[i]];
        for (const auto& [cls, count] : hist) {
            const double frac = static_cast<double>(count) / c.size();
            CHECK(frac > 1.0 / 3 - 0.06);
            CHECK(frac < 1.0 / 3 + 0.06);
        }
    }
}

TEST_CASE("dirichlet concentration drives skew") {
    Dataset ds = synth_blobs(3000, 3, 2, 0.1, 5);
    // near-uniform at alpha=1000
    auto clients = partition(ds, spec_of(PartitionMode::Dirichlet, 3, 0, 1000.0));
    for (const auto& c : clients) {
        std::map<int, std::size_t> hist;
        for (std::size_t i : c) ++hist[ds.labels[i]];
        for (const auto& [cls, count] : hist) {
            const double frac = static_cast<double>(count) / c.size();
            CHECK(std::abs(frac - 1.0 / 3) < 0.05);
        }
    }
    // strongly concentrated at alpha=0.001: most of each class on one client
    auto skewed = partition(ds, spec_of(PartitionMode::Dirichlet, 3, 0, 0.001, 3));
    std::size_t dominated = 0;
    for (int cls = 0; cls < 3; ++cls) {
        std::size_t best = 0, total = 0;
        for (const auto& c : skewed) {
            std::size_t cnt = 0;
            for (std::size_t i : c)
                if (ds.labels[i] == cls) ++cnt;
            best = std::max(best, cnt);
            total += cnt;
        }
        if (best > total * 9 / 10) ++dominated;
    }
    CHECK(dominated == 3);
}

TEST_CASE("partition error paths") {
    Dataset ds = tiny_iris_like();
    CHECK_THROWS_AS((void)partition(ds, spec_of(PartitionMode::EvenIid, 0)),
                    ConfigError);
    CHECK_THROWS_AS((void)partition(ds, spec_of(PartitionMode::EvenIid, 31)),
                    ConfigError);
    Dataset unlabeled = ds;
    unlabeled.labels.clear();
    CHECK_THROWS_AS(
        (void)partition(unlabeled, spec_of(PartitionMode::LabelSkew, 3, 0.5)),
        ConfigError);
    CHECK_THROWS_AS(
        (void)partition(ds, spec_of(PartitionMode::LabelSkew, 3, 1.5)),
        ConfigError);
}

TEST_CASE("protocol refuses schemes below threshold before any message") {
    FieldParams F = FieldParams::defaults();
    CHECK_THROWS_AS(CodingScheme::make_default(2, 1, 1, F), InfeasibleError);
}

TEST_CASE("distribution invariance: D is bit-identical under any partition") {
    Dataset ds = tiny_iris_like();
    auto scheme = CodingScheme::make_default(3, 1, 1, FieldParams::defaults());
    RunOptions opts;
    opts.noise_seed = 12345;

    std::vector<GlobalDistanceMatrix> mats;
    for (double p : {0.0, 0.5, 1.0})
        mats.push_back(run_protocol(ds, spec_of(PartitionMode::LabelSkew, 3, p),
                                    scheme, nullptr, opts)
                           .matrix);
    mats.push_back(run_protocol(ds, spec_of(PartitionMode::Dirichlet, 3, 0, 1000.0),
                                scheme, nullptr, opts)
                       .matrix);
    for (std::size_t i = 1; i < mats.size(); ++i) CHECK(mats[i] == mats[0]);
}

TEST_CASE("message accounting: n*m shares, m reports, no second round") {
    Dataset ds = tiny_iris_like();
    const std::size_t m = 3;
    auto scheme = CodingScheme::make_default(m, 1, 1, FieldParams::defaults());
    auto out = run_protocol(ds, spec_of(PartitionMode::EvenIid, m), scheme);
    CHECK(out.transcript.share_count == ds.n() * m);
    std::size_t deliveries = 0, reports = 0;
    for (const auto& msg : out.transcript.messages) {
        if (msg.kind == ProtocolMessage::Kind::ShareDelivery) ++deliveries;
        else ++reports;
    }
    CHECK(reports == m);
    CHECK(deliveries == m * m);  // one batch per (owner, receiver) pair
}

TEST_CASE("thread count does not change the result") {
    Dataset ds = tiny_iris_like();
    auto scheme = CodingScheme::make_default(5, 2, 1, FieldParams::defaults());
    RunOptions serial, parallel;
    serial.noise_seed = parallel.noise_seed = 7;
    serial.threads = 1;
    parallel.threads = 4;
    auto a = run_protocol(ds, spec_of(PartitionMode::EvenIid, 5), scheme, nullptr,
                          serial);
    auto b = run_protocol(ds, spec_of(PartitionMode::EvenIid, 5), scheme, nullptr,
                          parallel);
    CHECK(a.matrix == b.matrix);
}

TEST_CASE("replay reproduces the live matrix bit-exactly") {
    Dataset ds = tiny_iris_like();
    auto scheme = CodingScheme::make_default(5, 1, 1, FieldParams::defaults());
    auto out = run_protocol(ds, spec_of(PartitionMode::EvenIid, 5), scheme);
    auto replayed = replay_decode(out.transcript, scheme);
    CHECK(replayed == out.matrix);
}

TEST_CASE("replay with a dropped report still decodes above threshold") {
    Dataset ds = tiny_iris_like();
    // m=5 > threshold 3, so one report is expendable
    auto scheme = CodingScheme::make_default(5, 1, 1, FieldParams::defaults());
    auto out = run_protocol(ds, spec_of(PartitionMode::EvenIid, 5), scheme);

    Transcript dropped = out.transcript;
    dropped.messages.erase(
        std::remove_if(dropped.messages.begin(), dropped.messages.end(),
                       [](const ProtocolMessage& m) {
                           return m.kind == ProtocolMessage::Kind::DistanceReport &&
                                  m.sender == 2;
                       }),
        dropped.messages.end());
    auto replayed = replay_decode(dropped, scheme);
    CHECK(replayed == out.matrix);
}

TEST_CASE("replay at the exact threshold fails when one report is missing") {
    Dataset ds = tiny_iris_like();
    auto scheme = CodingScheme::make_default(3, 1, 1, FieldParams::defaults());
    auto out = run_protocol(ds, spec_of(PartitionMode::EvenIid, 3), scheme);
    Transcript dropped = out.transcript;
    dropped.messages.erase(
        std::remove_if(dropped.messages.begin(), dropped.messages.end(),
                       [](const ProtocolMessage& m) {
                           return m.kind == ProtocolMessage::Kind::DistanceReport &&
                                  m.sender == 1;
                       }),
        dropped.messages.end());
    try {
        (void)replay_decode(dropped, scheme);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("missing clients: 1") != std::string::npos);
    }
}

TEST_CASE("transcript files round-trip") {
    Dataset ds = tiny_iris_like();
    auto scheme = CodingScheme::make_default(3, 1, 1, FieldParams::defaults());
    auto out = run_protocol(ds, spec_of(PartitionMode::EvenIid, 3), scheme);

    const std::string path = "test_transcript.bin";
    save_transcript(out.transcript, path);
    Transcript loaded = load_transcript(path);
    CHECK(loaded.scheme_echo == out.transcript.scheme_echo);
    CHECK(loaded.messages.size() == out.transcript.messages.size());
    CHECK(loaded.share_count == out.transcript.share_count);

    auto scheme2 = scheme_from_transcript(loaded);
    auto replayed = replay_decode(loaded, scheme2);
    CHECK(replayed == out.matrix);
    std::filesystem::remove(path);
}

TEST_CASE("reconstruction equals the direct field oracle, so backends agree") {
    Dataset ds = tiny_iris_like();
    const FieldParams F = FieldParams::defaults();
    auto scheme = CodingScheme::make_default(3, 1, 1, F);
    auto out = run_protocol(ds, spec_of(PartitionMode::EvenIid, 3), scheme);

    // direct route: quantize, field distances, dequantize; no coding involved
    std::vector<QuantizedSample> qs;
    for (std::size_t i = 0; i < ds.n(); ++i)
        qs.push_back(real_to_field(ds.features.row(i), F));
    std::vector<FieldElement> pairs;
    for (std::size_t i = 0; i < ds.n(); ++i)
        for (std::size_t j = i + 1; j < ds.n(); ++j)
            pairs.push_back(encoded_distance(qs[i].coords, qs[j].coords, F));
    auto direct = assemble(ds.n(), pairs, F);
    CHECK(direct == out.matrix);

    // and therefore every backend sees identical input
    BackendConfig bc;
    bc.backend = "km";
    bc.k = 3;
    bc.seed = 9;
    CHECK(run_backend(out.matrix, bc).labels == run_backend(direct, bc).labels);
}

TEST_CASE("protocol output feeds clustering when a backend is configured") {
    Dataset ds = tiny_iris_like();
    auto scheme = CodingScheme::make_default(3, 1, 1, FieldParams::defaults());
    BackendConfig bc;
    bc.backend = "km";
    bc.k = 3;
    auto out = run_protocol(ds, spec_of(PartitionMode::EvenIid, 3), scheme, &bc);
    REQUIRE(out.assignment.has_value());
    CHECK(out.assignment->labels.size() == ds.n());
}
