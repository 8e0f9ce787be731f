#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "fedlcc/error.hpp"
#include "fedlcc/metrics.hpp"
#include "fedlcc/rng.hpp"

using namespace fedlcc;

namespace {

// Exhaustive assignment oracle for small matrices.
double brute_force_cost(const Matrix& cost) {
    const std::size_t n = std::max(cost.rows(), cost.cols());
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = perm[i];
            if (i < cost.rows() && j < cost.cols()) acc += cost.at(i, j);
        }
        best = std::min(best, acc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double assignment_cost(const Matrix& cost, const std::vector<std::size_t>& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != std::numeric_limits<std::size_t>::max()) acc += cost.at(i, a[i]);
    return acc;
}

}  // namespace

TEST_CASE("hungarian frozen examples") {
    // anti-diagonal beats diagonal on [[1,0],[0,1]]
    Matrix m(2, 2);
    m.at(0, 0) = 1;
    m.at(0, 1) = 0;
    m.at(1, 0) = 0;
    m.at(1, 1) = 1;
    auto a = hungarian(m);
    CHECK(a[0] == 1);
    CHECK(a[1] == 0);

    // identity-favoring matrix picks the diagonal
    Matrix id(3, 3, 5.0);
    for (std::size_t i = 0; i < 3; ++i) id.at(i, i) = 0.0;
    auto b = hungarian(id);
    for (std::size_t i = 0; i < 3; ++i) CHECK(b[i] == i);
}

TEST_CASE("hungarian matches exhaustive search up to 7x7") {
    Rng rng(404);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t r = 1 + rng.next_below(7);
        const std::size_t c = 1 + rng.next_below(7);
        Matrix cost(r, c);
        for (double& v : cost.data()) v = rng.next_unit() * 10.0;
        auto assign = hungarian(cost);
        CHECK(assignment_cost(cost, assign) ==
              doctest::Approx(brute_force_cost(cost)).epsilon(1e-9));
        // one-to-one over real columns
        std::vector<char> used(c, 0);
        for (std::size_t i = 0; i < r; ++i) {
            if (assign[i] == std::numeric_limits<std::size_t>::max()) continue;
            CHECK(!used[assign[i]]);
            used[assign[i]] = 1;
        }
    }
}

TEST_CASE("perfect predictions score 1.0") {
    std::vector<int> truth = {0, 0, 1, 1, 2, 2, 2};
    CHECK(kappa(truth, truth) == doctest::Approx(1.0));
    CHECK(nmi(truth, truth) == doctest::Approx(1.0));
}

TEST_CASE("label permutation invariance") {
    std::vector<int> truth = {0, 0, 1, 1, 2, 2, 0, 1, 2, 2};
    std::vector<int> pred(truth.size());
    const int perm[3] = {2, 0, 1};
    for (std::size_t i = 0; i < truth.size(); ++i) pred[i] = perm[truth[i]];
    CHECK(kappa(pred, truth) == doctest::Approx(1.0));
    CHECK(nmi(pred, truth) == doctest::Approx(1.0));
}

TEST_CASE("length mismatch is rejected") {
    std::vector<int> a = {0, 1}, b = {0, 1, 2};
    CHECK_THROWS_AS((void)nmi(a, b), ConfigError);
    CHECK_THROWS_AS((void)kappa(a, b), ConfigError);
}

TEST_CASE("random labels have near-zero kappa") {
    const std::size_t n = 1000;
    const int k = 4;
    std::vector<int> truth(n);
    for (std::size_t i = 0; i < n; ++i) truth[i] = static_cast<int>(i % k);
    Rng rng(777);
    double sum = 0.0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        std::vector<int> pred(n);
        for (auto& v : pred) v = static_cast<int>(rng.next_below(k));
        sum += kappa(pred, truth);
    }
    CHECK(std::abs(sum / trials) < 0.05);
}

TEST_CASE("unmatched clusters count as disagreement") {
    // two predicted clusters, three classes: the unmatched class drags kappa
    std::vector<int> truth = {0, 0, 1, 1, 2, 2};
    std::vector<int> pred = {0, 0, 1, 1, 1, 1};
    const double k1 = kappa(pred, truth);
    CHECK(k1 > 0.0);
    CHECK(k1 < 1.0);
    // extra predicted cluster maps to the null class
    std::vector<int> pred2 = {0, 0, 1, 1, 2, 3};
    CHECK(kappa(pred2, truth) < 1.0);
}

TEST_CASE("dbscan noise becomes singleton pseudo-clusters") {
    std::vector<int> truth = {0, 0, 1, 1};
    std::vector<int> pred = {0, 0, 1, -1};
    auto ct = contingency(pred, truth);
    CHECK(ct.k_pred == 3);  // clusters 0, 1 plus one singleton
    CHECK(ct.n == 4);
    // nmi well-defined and below the perfect score
    CHECK(nmi(pred, truth) < 1.0);
    CHECK(nmi(pred, truth) > 0.0);
}

TEST_CASE("nmi handles trivial partitions") {
    std::vector<int> ones = {0, 0, 0, 0};
    CHECK(nmi(ones, ones) == 0.0);  // 0/0 convention
    std::vector<int> truth = {0, 1, 0, 1};
    CHECK(nmi(ones, truth) == 0.0);
}

TEST_CASE("nmi arithmetic-mean variant stays in range") {
    std::vector<int> truth = {0, 0, 1, 1, 2, 2};
    std::vector<int> pred = {0, 0, 1, 2, 2, 2};
    const double g = nmi(pred, truth, NmiNorm::Geometric);
    const double a = nmi(pred, truth, NmiNorm::Arithmetic);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    CHECK(a <= g + 1e-12);  // arithmetic mean >= geometric mean
}
