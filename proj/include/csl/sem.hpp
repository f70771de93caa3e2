#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "csl/common.hpp"
#include "csl/graph.hpp"

namespace csl {

// ---------------------------------------------------------------------------
// Linear-Gaussian structural equation model X = B^T X + N with diagonal
// noise covariance Omega = diag(noise_vars). weights(j, i) != 0 iff j -> i.

struct WeightedDag {
    Dag dag;
    Eigen::MatrixXd weights;
    Eigen::VectorXd noise_vars;

    int num_vars() const { return dag.num_vars(); }
};

struct Dataset {
    Eigen::MatrixXd values;  // n x d, column i = variable X_i

    int num_samples() const { return static_cast<int>(values.rows()); }
    int num_vars() const { return static_cast<int>(values.cols()); }
};

struct PrecisionMatrix {
    Eigen::MatrixXd theta;

    int num_vars() const { return static_cast<int>(theta.rows()); }
};

// ---------------------------------------------------------------------------

/// Erdos-Renyi DAG: each unordered pair becomes an edge with probability
/// expected_degree/(d-1), oriented along a uniformly random permutation.
inline Dag random_er_dag(int d, double expected_degree, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("d must be positive");
    if (expected_degree < 0.0 || (d > 1 && expected_degree >= static_cast<double>(d)))
        throw std::invalid_argument("expected_degree must lie in [0, d)");
    Rng rng(seed);
    std::vector<int> position(static_cast<std::size_t>(d));
    std::iota(position.begin(), position.end(), 0);
    rng.shuffle(position);  // position[k] = variable placed at topological slot k

    const double p = d > 1 ? expected_degree / static_cast<double>(d - 1) : 0.0;
    Dag g(d);
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            if (rng.uniform() < p) g.add_edge(position[static_cast<std::size_t>(a)],
                                              position[static_cast<std::size_t>(b)]);
    return g;
}

/// Edge weights uniform on [-0.8,-0.2] U [0.2,0.8], noise variances on [1,2].
inline WeightedDag random_weights(const Dag& dag, std::uint64_t seed) {
    Rng rng(seed);
    const int d = dag.num_vars();
    WeightedDag m;
    m.dag = dag;
    m.weights = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int p : dag.parents(i)) {
            double mag = rng.uniform(0.2, 0.8);
            double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            m.weights(p, i) = sign * mag;
        }
    }
    m.noise_vars = Eigen::VectorXd(d);
    for (int i = 0; i < d; ++i) m.noise_vars(i) = rng.uniform(1.0, 2.0);
    return m;
}

/// i.i.d. draws from the SEM, each row evaluated in topological order.
inline Dataset sample(const WeightedDag& model, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    Rng rng(seed);
    const int d = model.num_vars();
    const std::vector<int> order = model.dag.topological_order();
    Dataset data;
    data.values.resize(n, d);
    std::vector<double> sd(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) sd[static_cast<std::size_t>(i)] = std::sqrt(model.noise_vars(i));
    for (int r = 0; r < n; ++r) {
        for (int v : order) {
            double x = sd[static_cast<std::size_t>(v)] * rng.normal();
            for (int p : model.dag.parents(v)) x += model.weights(p, v) * data.values(r, p);
            data.values(r, v) = x;
        }
    }
    return data;
}

/// Theta = (I-B) Omega^{-1} (I-B)^T, assembled entrywise:
///   Theta_jk = -B_kj/s_j - B_jk/s_k + sum_l B_jl B_kl / s_l   (j != k)
///   Theta_jj = 1/s_j + sum_l B_jl^2 / s_l
/// The accumulation walks the sparse edge structure, so large sparse models
/// stay cheap.
inline PrecisionMatrix analytic_precision(const WeightedDag& model) {
    const int d = model.num_vars();
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) theta(j, j) = 1.0 / model.noise_vars(j);
    for (int child = 0; child < d; ++child) {
        const double inv = 1.0 / model.noise_vars(child);
        const auto& pa = model.dag.parents(child);
        for (std::size_t a = 0; a < pa.size(); ++a) {
            const double wa = model.weights(pa[a], child);
            theta(pa[a], pa[a]) += wa * wa * inv;
            theta(pa[a], child) -= wa * inv;
            theta(child, pa[a]) -= wa * inv;
            for (std::size_t b = a + 1; b < pa.size(); ++b) {
                const double wb = model.weights(pa[b], child);
                theta(pa[a], pa[b]) += wa * wb * inv;
                theta(pa[b], pa[a]) += wa * wb * inv;
            }
        }
    }
    return {std::move(theta)};
}

/// Population covariance Sigma = (I-B)^{-T} Omega (I-B)^{-1}.
inline Eigen::MatrixXd analytic_covariance(const WeightedDag& model) {
    const int d = model.num_vars();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d) - model.weights;
    // X = A^{-T} N with A = I - B, so Sigma = A^{-T} Omega A^{-1}
    Eigen::MatrixXd ainv_t = a.transpose().partialPivLu().solve(Eigen::MatrixXd::Identity(d, d));
    return ainv_t * model.noise_vars.asDiagonal() * ainv_t.transpose();
}

/// Off-diagonal support of a precision matrix: edge {i,j} iff |Theta_ij| > tol.
inline UndirectedGraph support_graph(const PrecisionMatrix& p, double tol) {
    if (tol < 0.0) throw std::invalid_argument("tol must be nonnegative");
    const int d = p.num_vars();
    UndirectedGraph g(d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::abs(p.theta(i, j)) > tol) g.add_edge(i, j);
    return g;
}

// ---------------------------------------------------------------------------
// Population-level collider faithfulness checks. A collider pair (j,k) are
// two parents of a common child; the pair is shielded when j,k are adjacent.

struct CfReport {
    bool sscf_holds = true;
    bool sucf_holds = true;
    // (j, k, theta_jk) for every collider pair whose precision entry vanishes
    std::vector<std::tuple<int, int, double>> violating_pairs;
};

inline CfReport check_sscf_sucf(const WeightedDag& model, double tol) {
    const PrecisionMatrix prec = analytic_precision(model);
    const int d = model.num_vars();
    // collect spouse pairs once; shielded = also adjacent in the DAG
    std::set<std::pair<int, int>> shielded, unshielded;
    for (int child = 0; child < d; ++child) {
        const auto& pa = model.dag.parents(child);
        for (std::size_t a = 0; a < pa.size(); ++a)
            for (std::size_t b = a + 1; b < pa.size(); ++b) {
                auto key = std::minmax(pa[a], pa[b]);
                if (model.dag.adjacent(pa[a], pa[b]))
                    shielded.insert({key.first, key.second});
                else
                    unshielded.insert({key.first, key.second});
            }
    }
    CfReport report;
    for (const auto& [j, k] : shielded)
        if (std::abs(prec.theta(j, k)) <= tol) {
            report.sscf_holds = false;
            report.violating_pairs.emplace_back(j, k, prec.theta(j, k));
        }
    for (const auto& [j, k] : unshielded)
        if (std::abs(prec.theta(j, k)) <= tol) {
            report.sucf_holds = false;
            report.violating_pairs.emplace_back(j, k, prec.theta(j, k));
        }
    return report;
}

// ---------------------------------------------------------------------------
// Minimum-|Theta| simulation over random models: how small the precision
// entries of neighbors and of non-adjacent spouses get as graphs grow.

struct MinThetaResult {
    std::optional<double> mean_min_neighbor_abs_theta;
    std::optional<double> mean_min_spouse_abs_theta;
    int reps_with_neighbors = 0;
    int reps_with_spouses = 0;
};

inline MinThetaResult min_theta_experiment(int d, double expected_degree, int reps,
                                           std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("reps must be positive");
    double neighbor_sum = 0.0, spouse_sum = 0.0;
    int neighbor_count = 0, spouse_count = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const Dag dag = random_er_dag(d, expected_degree, mix_seed(seed, 2 * rep));
        const WeightedDag model = random_weights(dag, mix_seed(seed, 2 * rep + 1));
        const PrecisionMatrix prec = analytic_precision(model);

        double min_neighbor = kPosInf;
        for (auto [i, j] : dag.edges())
            min_neighbor = std::min(min_neighbor, std::abs(prec.theta(i, j)));

        double min_spouse = kPosInf;
        for (int child = 0; child < d; ++child) {
            const auto& pa = dag.parents(child);
            for (std::size_t a = 0; a < pa.size(); ++a)
                for (std::size_t b = a + 1; b < pa.size(); ++b)
                    if (!dag.adjacent(pa[a], pa[b]))
                        min_spouse = std::min(min_spouse, std::abs(prec.theta(pa[a], pa[b])));
        }

        if (std::isfinite(min_neighbor)) {
            neighbor_sum += min_neighbor;
            ++neighbor_count;
        }
        if (std::isfinite(min_spouse)) {
            spouse_sum += min_spouse;
            ++spouse_count;
        }
    }
    MinThetaResult out;
    out.reps_with_neighbors = neighbor_count;
    out.reps_with_spouses = spouse_count;
    if (neighbor_count > 0) out.mean_min_neighbor_abs_theta = neighbor_sum / neighbor_count;
    if (spouse_count > 0) out.mean_min_spouse_abs_theta = spouse_sum / spouse_count;
    return out;
}

}  // namespace csl
