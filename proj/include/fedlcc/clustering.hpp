#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedlcc/distance_matrix.hpp"
#include "fedlcc/matrix.hpp"

namespace fedlcc {

struct BackendConfig {
    std::string backend = "km";  // km|kmed|fcm|sc|nmf|dbscan|hc
    std::size_t k = 3;
    std::size_t max_iter = 300;
    double tolerance = 1e-6;
    std::uint64_t seed = 0;
    std::size_t restarts = 10;  // km / kmed / fcm inits; best objective wins

    // spectral
    double sc_sigma_sq = 0.0;        // fixed sigma^2; 0 = use median heuristic
    double sc_sigma_fraction = 1.0;  // sigma^2 = fraction * median(offdiag D)
    std::size_t sc_max_sweeps = 100;
    double sc_jacobi_tol = 1e-10;

    // dbscan
    double eps = 0.02;
    std::size_t min_pts = 5;
    bool eps_is_euclidean = false;  // square user-supplied eps first

    // hierarchical
    std::string linkage = "ward";  // ward|average|complete|single|weighted

    // fcm
    double fuzzifier = 2.0;

    // nmf
    std::size_t nmf_max_iter = 500;
    double nmf_epsilon = 1e-9;
};

struct ClusterAssignment {
    std::vector<int> labels;  // -1 = noise (dbscan only)
    std::size_t k = 0;
    std::string backend;
    std::size_t iterations = 0;
    double objective = 0.0;
};

ClusterAssignment kmeans_on_rows(const GlobalDistanceMatrix& D,
                                 const BackendConfig& cfg);
ClusterAssignment kmedoids(const GlobalDistanceMatrix& D, const BackendConfig& cfg);
ClusterAssignment fuzzy_cmeans_on_rows(const GlobalDistanceMatrix& D,
                                       const BackendConfig& cfg,
                                       Matrix* memberships = nullptr,
                                       std::vector<double>* objective_history = nullptr);
ClusterAssignment spectral(const GlobalDistanceMatrix& D, const BackendConfig& cfg);
ClusterAssignment nmf_on_rows(const GlobalDistanceMatrix& D,
                              const BackendConfig& cfg,
                              std::vector<double>* objective_history = nullptr);
ClusterAssignment dbscan(const GlobalDistanceMatrix& D, const BackendConfig& cfg);
ClusterAssignment hierarchical(const GlobalDistanceMatrix& D,
                               const BackendConfig& cfg);

ClusterAssignment run_backend(const GlobalDistanceMatrix& D,
                              const BackendConfig& cfg);

/// Lloyd's algorithm with k-means++ seeding on arbitrary row features;
/// shared by kmeans_on_rows and the spectral embedding step. Objective
/// history (one entry per iteration) is appended when a sink is given.
ClusterAssignment kmeans_features(const Matrix& X, std::size_t k,
                                  std::uint64_t seed, std::size_t restarts,
                                  std::size_t max_iter,
                                  std::vector<double>* objective_history = nullptr);

/// Symmetric eigendecomposition by cyclic Jacobi sweeps. Returns eigenvalues
/// ascending with matching eigenvector columns.
struct EigenResult {
    std::vector<double> values;
    Matrix vectors;  // column c is the eigenvector of values[c]
    std::size_t sweeps = 0;
};
EigenResult jacobi_eigen(const Matrix& sym, std::size_t max_sweeps, double tol);

}  // namespace fedlcc
