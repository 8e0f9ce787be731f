#include "fedlcc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "fedlcc/error.hpp"
#include "fedlcc/rng.hpp"

namespace fedlcc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_k(std::size_t k, std::size_t n, const char* backend) {
    if (k < 1 || k > n)
        throw ConfigError(std::string(backend) + ": k=" + std::to_string(k) +
                          " out of range for n=" + std::to_string(n));
}

double median_offdiag(const Matrix& D) {
    const std::size_t n = D.rows();
    std::vector<double> vals;
    vals.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) vals.push_back(D.at(i, j));
    if (vals.empty()) return 1.0;
    const std::size_t mid = vals.size() / 2;
    std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
    return vals[mid];
}

struct KmRun {
    std::vector<int> labels;
    double objective = kInf;
    std::size_t iterations = 0;
};

KmRun lloyd_once(const Matrix& X, std::size_t k, Rng& rng, std::size_t max_iter,
                 std::vector<double>* history) {
    const std::size_t n = X.rows(), d = X.cols();
    // k-means++ seeding
    std::vector<std::size_t> centers_idx;
    centers_idx.push_back(rng.next_below(n));
    std::vector<double> dist2(n, kInf);
    while (centers_idx.size() < k) {
        const auto c = X.row(centers_idx.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist2[i] = std::min(dist2[i], squared_distance(X.row(i), c));
            total += dist2[i];
        }
        if (total <= 0.0) {
            // all remaining points coincide with a center; pick round-robin
            centers_idx.push_back(centers_idx.size() % n);
            continue;
        }
        double target = rng.next_unit() * total;
        std::size_t pick = n - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += dist2[i];
            if (acc >= target) {
                pick = i;
                break;
            }
        }
        centers_idx.push_back(pick);
    }

    Matrix centers(k, d);
    for (std::size_t c = 0; c < k; ++c)
        std::copy_n(X.row(centers_idx[c]).data(), d, centers.row(c).data());

    std::vector<int> labels(n, -1);
    std::vector<std::size_t> sizes(k, 0);
    KmRun run;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // assignment
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double bd = kInf;
            for (std::size_t c = 0; c < k; ++c) {
                const double dd = squared_distance(X.row(i), centers.row(c));
                if (dd < bd) {
                    bd = dd;
                    best = static_cast<int>(c);
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        // update
        Matrix sums(k, d, 0.0);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto r = X.row(i);
            auto s = sums.row(static_cast<std::size_t>(labels[i]));
            for (std::size_t j = 0; j < d; ++j) s[j] += r[j];
            ++sizes[static_cast<std::size_t>(labels[i])];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                // reseed at the point farthest from its assigned centroid
                std::size_t far = 0;
                double fd = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double dd = squared_distance(
                        X.row(i), centers.row(static_cast<std::size_t>(labels[i])));
                    if (dd > fd) {
                        fd = dd;
                        far = i;
                    }
                }
                std::copy_n(X.row(far).data(), d, centers.row(c).data());
                labels[far] = static_cast<int>(c);
                changed = true;
                continue;
            }
            auto s = sums.row(c);
            auto cr = centers.row(c);
            for (std::size_t j = 0; j < d; ++j)
                cr[j] = s[j] / static_cast<double>(sizes[c]);
        }
        run.iterations = iter + 1;
        if (history) {
            double obj = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                obj += squared_distance(
                    X.row(i), centers.row(static_cast<std::size_t>(labels[i])));
            history->push_back(obj);
        }
        if (!changed) break;
    }
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        obj += squared_distance(X.row(i),
                                centers.row(static_cast<std::size_t>(labels[i])));
    run.objective = obj;
    run.labels = std::move(labels);
    return run;
}

}  // namespace

ClusterAssignment kmeans_features(const Matrix& X, std::size_t k,
                                  std::uint64_t seed, std::size_t restarts,
                                  std::size_t max_iter,
                                  std::vector<double>* objective_history) {
    check_k(k, X.rows(), "kmeans");
    KmRun best;
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        Rng rng(mix_keys(seed, 0x6b6d, r));
        std::vector<double> hist;
        KmRun run = lloyd_once(X, k, rng, max_iter, objective_history ? &hist : nullptr);
        if (run.objective < best.objective) {
            best = std::move(run);
            if (objective_history) *objective_history = std::move(hist);
        }
    }
    ClusterAssignment out;
    out.labels = std::move(best.labels);
    out.k = k;
    out.backend = "km";
    out.iterations = best.iterations;
    out.objective = best.objective;
    return out;
}

ClusterAssignment kmeans_on_rows(const GlobalDistanceMatrix& D,
                                 const BackendConfig& cfg) {
    auto out = kmeans_features(D.values(), cfg.k, cfg.seed, cfg.restarts,
                               cfg.max_iter);
    out.backend = "km";
    return out;
}

namespace {

double pam_cost(const Matrix& D, const std::vector<std::size_t>& medoids) {
    double cost = 0.0;
    for (std::size_t i = 0; i < D.rows(); ++i) {
        double m = kInf;
        for (std::size_t c : medoids) m = std::min(m, D.at(i, c));
        cost += m;
    }
    return cost;
}

// First-improvement swap phase; deterministic scan order.
std::size_t pam_swap(const Matrix& D, std::vector<std::size_t>& medoids) {
    const std::size_t n = D.rows();
    std::size_t rounds = 0;
    bool improved = true;
    while (improved) {
        improved = false;
        ++rounds;
        double cost = pam_cost(D, medoids);
        for (std::size_t slot = 0; slot < medoids.size(); ++slot) {
            for (std::size_t j = 0; j < n; ++j) {
                if (std::find(medoids.begin(), medoids.end(), j) != medoids.end())
                    continue;
                const std::size_t old = medoids[slot];
                medoids[slot] = j;
                const double trial = pam_cost(D, medoids);
                if (trial < cost - 1e-12) {
                    cost = trial;
                    improved = true;
                } else {
                    medoids[slot] = old;
                }
            }
        }
    }
    return rounds;
}

}  // namespace

ClusterAssignment kmedoids(const GlobalDistanceMatrix& D, const BackendConfig& cfg) {
    const Matrix& W = D.values();
    const std::size_t n = W.rows(), k = cfg.k;
    check_k(k, n, "kmedoids");

    std::vector<std::size_t> best;
    double best_cost = kInf;
    std::size_t rounds = 0;

    if (k == n) {
        best.resize(n);
        std::iota(best.begin(), best.end(), 0);
        best_cost = 0.0;
    } else {
        // greedy build
        std::vector<std::size_t> medoids;
        {
            std::size_t first = 0;
            double bd = kInf;
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += W.at(i, j);
                if (s < bd) {
                    bd = s;
                    first = j;
                }
            }
            medoids.push_back(first);
        }
        std::vector<double> dmin(n);
        while (medoids.size() < k) {
            for (std::size_t i = 0; i < n; ++i) {
                dmin[i] = kInf;
                for (std::size_t c : medoids) dmin[i] = std::min(dmin[i], W.at(i, c));
            }
            std::size_t pick = 0;
            double best_gain = -1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (std::find(medoids.begin(), medoids.end(), j) != medoids.end())
                    continue;
                double gain = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    gain += std::max(dmin[i] - W.at(i, j), 0.0);
                if (gain > best_gain) {
                    best_gain = gain;
                    pick = j;
                }
            }
            medoids.push_back(pick);
        }
        rounds += pam_swap(W, medoids);
        best = medoids;
        best_cost = pam_cost(W, best);

        // random restarts
        for (std::size_t r = 1; r < std::max<std::size_t>(cfg.restarts, 1); ++r) {
            Rng rng(mix_keys(cfg.seed, 0x6d65640a, r));
            std::vector<std::size_t> cand;
            std::vector<std::size_t> pool(n);
            std::iota(pool.begin(), pool.end(), 0);
            for (std::size_t c = 0; c < k; ++c) {
                std::size_t pick = c + rng.next_below(n - c);
                std::swap(pool[c], pool[pick]);
                cand.push_back(pool[c]);
            }
            rounds += pam_swap(W, cand);
            const double cost = pam_cost(W, cand);
            if (cost < best_cost - 1e-12) {
                best_cost = cost;
                best = cand;
            }
        }
    }

    ClusterAssignment out;
    out.k = k;
    out.backend = "kmed";
    out.iterations = rounds;
    out.objective = best_cost;
    out.labels.resize(n);
    std::sort(best.begin(), best.end());
    for (std::size_t i = 0; i < n; ++i) {
        int lab = 0;
        double bd = kInf;
        for (std::size_t c = 0; c < k; ++c)
            if (W.at(i, best[c]) < bd) {
                bd = W.at(i, best[c]);
                lab = static_cast<int>(c);
            }
        out.labels[i] = lab;
    }
    return out;
}

ClusterAssignment fuzzy_cmeans_on_rows(const GlobalDistanceMatrix& D,
                                       const BackendConfig& cfg,
                                       Matrix* memberships,
                                       std::vector<double>* objective_history) {
    const Matrix& X = D.values();
    const std::size_t n = X.rows(), d = X.cols(), k = cfg.k;
    check_k(k, n, "fcm");
    const double mf = cfg.fuzzifier;
    if (mf <= 1.0) throw ConfigError("fcm: fuzzifier must exceed 1");

    Matrix bestU;
    double best_obj = kInf;
    std::size_t best_iters = 0;

    std::vector<double> best_hist;
    for (std::size_t r = 0; r < std::max<std::size_t>(cfg.restarts, 1); ++r) {
        std::vector<double> hist;
        Rng rng(mix_keys(cfg.seed, 0x66636d, r));
        Matrix U(n, k);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                U.at(i, c) = rng.next_unit() + 1e-9;
                sum += U.at(i, c);
            }
            for (std::size_t c = 0; c < k; ++c) U.at(i, c) /= sum;
        }

        Matrix centers(k, d);
        Matrix dist2(n, k);
        std::size_t iters = 0;
        for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
            ++iters;
            // centers from fuzzified memberships
            for (std::size_t c = 0; c < k; ++c) {
                double denom = 0.0;
                auto cr = centers.row(c);
                std::fill(cr.begin(), cr.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    const double w = std::pow(U.at(i, c), mf);
                    denom += w;
                    auto xr = X.row(i);
                    for (std::size_t j = 0; j < d; ++j) cr[j] += w * xr[j];
                }
                if (denom > 0)
                    for (std::size_t j = 0; j < d; ++j) cr[j] /= denom;
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < k; ++c)
                    dist2.at(i, c) =
                        std::max(squared_distance(X.row(i), centers.row(c)), 1e-12);
            // membership update
            double max_delta = 0.0;
            const double expo = -1.0 / (mf - 1.0);
            for (std::size_t i = 0; i < n; ++i) {
                double sum = 0.0;
                std::vector<double> inv(k);
                for (std::size_t c = 0; c < k; ++c) {
                    inv[c] = std::pow(dist2.at(i, c), expo);
                    sum += inv[c];
                }
                for (std::size_t c = 0; c < k; ++c) {
                    const double u = inv[c] / sum;
                    max_delta = std::max(max_delta, std::abs(u - U.at(i, c)));
                    U.at(i, c) = u;
                }
            }
            if (objective_history) {
                double j_iter = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t c = 0; c < k; ++c)
                        j_iter += std::pow(U.at(i, c), mf) * dist2.at(i, c);
                hist.push_back(j_iter);
            }
            if (max_delta < cfg.tolerance) break;
        }
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < k; ++c)
                obj += std::pow(U.at(i, c), mf) * dist2.at(i, c);
        if (obj < best_obj) {
            best_obj = obj;
            bestU = U;
            best_iters = iters;
            best_hist = std::move(hist);
        }
    }
    if (objective_history) *objective_history = std::move(best_hist);

    ClusterAssignment out;
    out.k = k;
    out.backend = "fcm";
    out.iterations = best_iters;
    out.objective = best_obj;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        int lab = 0;
        double bu = -1.0;
        for (std::size_t c = 0; c < k; ++c)
            if (bestU.at(i, c) > bu) {
                bu = bestU.at(i, c);
                lab = static_cast<int>(c);
            }
        out.labels[i] = lab;
    }
    if (memberships) *memberships = std::move(bestU);
    return out;
}

EigenResult jacobi_eigen(const Matrix& sym, std::size_t max_sweeps, double tol) {
    const std::size_t n = sym.rows();
    Matrix A = sym;
    Matrix V(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) V.at(i, i) = 1.0;

    double norm0 = 0.0;
    for (double v : A.data()) norm0 += v * v;
    norm0 = std::sqrt(norm0);
    const double target = std::max(tol * norm0, 1e-300);

    std::size_t sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * A.at(i, j) * A.at(i, j);
        if (std::sqrt(off) <= target) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A.at(p, q);
                if (apq == 0.0) continue;
                const double app = A.at(p, p), aqq = A.at(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = A.at(i, p), aiq = A.at(i, q);
                    A.at(i, p) = c * aip - s * aiq;
                    A.at(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = A.at(p, i), aqi = A.at(q, i);
                    A.at(p, i) = c * api - s * aqi;
                    A.at(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = V.at(i, p), viq = V.at(i, q);
                    V.at(i, p) = c * vip - s * viq;
                    V.at(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    if (sweep == max_sweeps) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * A.at(i, j) * A.at(i, j);
        if (std::sqrt(off) > target)
            throw Error("jacobi eigensolver did not converge in " +
                        std::to_string(max_sweeps) + " sweeps");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return A.at(a, a) < A.at(b, b);
    });

    EigenResult res;
    res.sweeps = sweep;
    res.values.resize(n);
    res.vectors = Matrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        res.values[c] = A.at(order[c], order[c]);
        // canonical sign: largest-magnitude component positive
        double big = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(V.at(i, order[c])) > std::abs(big)) big = V.at(i, order[c]);
        const double flip = big < 0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i)
            res.vectors.at(i, c) = flip * V.at(i, order[c]);
    }
    return res;
}

ClusterAssignment spectral(const GlobalDistanceMatrix& D, const BackendConfig& cfg) {
    const Matrix& W = D.values();
    const std::size_t n = W.rows(), k = cfg.k;
    check_k(k, n, "spectral");

    double sigma_sq = cfg.sc_sigma_sq;
    if (sigma_sq <= 0) sigma_sq = std::max(median_offdiag(W) * cfg.sc_sigma_fraction,
                                           1e-300);

    Matrix A(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) A.at(i, j) = std::exp(-W.at(i, j) / (2.0 * sigma_sq));

    std::vector<double> dinv(n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += A.at(i, j);
        dinv[i] = deg > 0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    Matrix L(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        L.at(i, i) = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) L.at(i, j) = -dinv[i] * A.at(i, j) * dinv[j];
    }

    EigenResult eig = jacobi_eigen(L, cfg.sc_max_sweeps, cfg.sc_jacobi_tol);

    Matrix embed(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            embed.at(i, c) = eig.vectors.at(i, c);
            norm += embed.at(i, c) * embed.at(i, c);
        }
        norm = std::sqrt(norm);
        if (norm > 0)
            for (std::size_t c = 0; c < k; ++c) embed.at(i, c) /= norm;
    }

    auto km = kmeans_features(embed, k, mix_keys(cfg.seed, 0x7363), cfg.restarts,
                              cfg.max_iter);
    ClusterAssignment out;
    out.labels = std::move(km.labels);
    out.k = k;
    out.backend = "sc";
    out.iterations = eig.sweeps;
    out.objective = km.objective;
    return out;
}

namespace {

// C = A(n x m) * B(m x p)
Matrix matmul(const Matrix& A, const Matrix& B) {
    Matrix C(A.rows(), B.cols(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t l = 0; l < A.cols(); ++l) {
            const double a = A.at(i, l);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < B.cols(); ++j) C.at(i, j) += a * B.at(l, j);
        }
    return C;
}

Matrix transpose(const Matrix& A) {
    Matrix T(A.cols(), A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) T.at(j, i) = A.at(i, j);
    return T;
}

}  // namespace

ClusterAssignment nmf_on_rows(const GlobalDistanceMatrix& D,
                              const BackendConfig& cfg,
                              std::vector<double>* objective_history) {
    const Matrix& X = D.values();
    const std::size_t n = X.rows(), d = X.cols(), k = cfg.k;
    check_k(k, n, "nmf");
    const double eps = cfg.nmf_epsilon;

    Rng rng(mix_keys(cfg.seed, 0x6e6d66));
    Matrix W(n, k), H(k, d);
    for (double& v : W.data()) v = rng.next_unit_open_low();
    for (double& v : H.data()) v = rng.next_unit_open_low();

    auto objective = [&]() {
        Matrix R = matmul(W, H);
        double acc = 0.0;
        for (std::size_t i = 0; i < R.data().size(); ++i) {
            const double diff = X.data()[i] - R.data()[i];
            acc += diff * diff;
        }
        return acc;
    };

    double prev = objective();
    std::size_t iters = 0;
    for (std::size_t iter = 0; iter < cfg.nmf_max_iter; ++iter) {
        ++iters;
        // H <- H .* (W^T X) ./ (W^T W H + eps)
        Matrix Wt = transpose(W);
        Matrix num_h = matmul(Wt, X);
        Matrix den_h = matmul(matmul(Wt, W), H);
        for (std::size_t i = 0; i < H.data().size(); ++i)
            H.data()[i] *= num_h.data()[i] / (den_h.data()[i] + eps);
        // W <- W .* (X H^T) ./ (W H H^T + eps)
        Matrix Ht = transpose(H);
        Matrix num_w = matmul(X, Ht);
        Matrix den_w = matmul(W, matmul(H, Ht));
        for (std::size_t i = 0; i < W.data().size(); ++i)
            W.data()[i] *= num_w.data()[i] / (den_w.data()[i] + eps);

        const double cur = objective();
        if (objective_history) objective_history->push_back(cur);
        if (prev - cur < 1e-9 * std::max(prev, 1e-30)) {
            prev = cur;
            break;
        }
        prev = cur;
    }

    ClusterAssignment out;
    out.k = k;
    out.backend = "nmf";
    out.iterations = iters;
    out.objective = prev;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        int lab = 0;
        double best = -1.0;
        for (std::size_t c = 0; c < k; ++c)
            if (W.at(i, c) > best) {
                best = W.at(i, c);
                lab = static_cast<int>(c);
            }
        out.labels[i] = lab;
    }
    return out;
}

ClusterAssignment dbscan(const GlobalDistanceMatrix& D, const BackendConfig& cfg) {
    const Matrix& W = D.values();
    const std::size_t n = W.rows();
    const double eps = cfg.eps_is_euclidean ? cfg.eps * cfg.eps : cfg.eps;

    std::vector<int> labels(n, -2);  // -2 unvisited, -1 noise
    auto neighbors = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j)
            if (W.at(i, j) <= eps) out.push_back(j);  // includes i itself
        return out;
    };

    int cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != -2) continue;
        auto nb = neighbors(i);
        if (nb.size() < cfg.min_pts) {
            labels[i] = -1;
            continue;
        }
        labels[i] = cluster;
        std::deque<std::size_t> queue(nb.begin(), nb.end());
        while (!queue.empty()) {
            const std::size_t j = queue.front();
            queue.pop_front();
            if (labels[j] == -1) labels[j] = cluster;  // border point
            if (labels[j] != -2) continue;
            labels[j] = cluster;
            auto nb2 = neighbors(j);
            if (nb2.size() >= cfg.min_pts)
                queue.insert(queue.end(), nb2.begin(), nb2.end());
        }
        ++cluster;
    }

    ClusterAssignment out;
    out.labels = std::move(labels);
    out.k = static_cast<std::size_t>(cluster);
    out.backend = "dbscan";
    out.iterations = 1;
    out.objective = 0.0;
    return out;
}

ClusterAssignment hierarchical(const GlobalDistanceMatrix& D,
                               const BackendConfig& cfg) {
    const Matrix& DM = D.values();
    const std::size_t n = DM.rows(), k = cfg.k;
    check_k(k, n, "hierarchical");

    enum class Linkage { Ward, Average, Complete, Single, Weighted };
    Linkage link;
    if (cfg.linkage == "ward") link = Linkage::Ward;
    else if (cfg.linkage == "average") link = Linkage::Average;
    else if (cfg.linkage == "complete") link = Linkage::Complete;
    else if (cfg.linkage == "single") link = Linkage::Single;
    else if (cfg.linkage == "weighted") link = Linkage::Weighted;
    else throw ConfigError("hierarchical: unknown linkage '" + cfg.linkage + "'");

    Matrix W = DM;  // working dissimilarities
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    std::vector<int> member(n);  // cluster id per point
    std::iota(member.begin(), member.end(), 0);

    for (std::size_t merges = 0; merges + k < n; ++merges) {
        // global minimum over active pairs; ties to the smallest (a, b)
        std::size_t ba = 0, bb = 0;
        double bd = kInf;
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b]) continue;
                if (W.at(a, b) < bd) {
                    bd = W.at(a, b);
                    ba = a;
                    bb = b;
                }
            }
        }
        // merge bb into ba
        const double dab = W.at(ba, bb);
        const double sa = static_cast<double>(size[ba]);
        const double sb = static_cast<double>(size[bb]);
        for (std::size_t c2 = 0; c2 < n; ++c2) {
            if (!active[c2] || c2 == ba || c2 == bb) continue;
            const double dac = W.at(ba, c2), dbc = W.at(bb, c2);
            const double sc = static_cast<double>(size[c2]);
            double nd = 0.0;
            switch (link) {
                case Linkage::Single: nd = std::min(dac, dbc); break;
                case Linkage::Complete: nd = std::max(dac, dbc); break;
                case Linkage::Average: nd = (sa * dac + sb * dbc) / (sa + sb); break;
                case Linkage::Weighted: nd = 0.5 * (dac + dbc); break;
                case Linkage::Ward:
                    nd = ((sa + sc) * dac + (sb + sc) * dbc - sc * dab) /
                         (sa + sb + sc);
                    break;
            }
            W.at(ba, c2) = nd;
            W.at(c2, ba) = nd;
        }
        size[ba] += size[bb];
        active[bb] = false;
        for (std::size_t i = 0; i < n; ++i)
            if (member[i] == static_cast<int>(bb)) member[i] = static_cast<int>(ba);
    }

    // relabel active clusters 0..k-1 in order of smallest member index
    std::vector<int> remap(n, -1);
    int next = 0;
    ClusterAssignment out;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (remap[member[i]] == -1) remap[member[i]] = next++;
        out.labels[i] = remap[member[i]];
    }
    out.k = k;
    out.backend = "hc";
    out.iterations = n - k;
    out.objective = 0.0;
    return out;
}

ClusterAssignment run_backend(const GlobalDistanceMatrix& D,
                              const BackendConfig& cfg) {
    if (cfg.backend == "km") return kmeans_on_rows(D, cfg);
    if (cfg.backend == "kmed") return kmedoids(D, cfg);
    if (cfg.backend == "fcm") return fuzzy_cmeans_on_rows(D, cfg);
    if (cfg.backend == "sc") return spectral(D, cfg);
    if (cfg.backend == "nmf") return nmf_on_rows(D, cfg);
    if (cfg.backend == "dbscan") return dbscan(D, cfg);
    if (cfg.backend == "hc") return hierarchical(D, cfg);
    throw ConfigError("unknown clustering backend '" + cfg.backend + "'");
}

}  // namespace fedlcc
