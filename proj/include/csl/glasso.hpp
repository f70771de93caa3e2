#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "csl/common.hpp"
#include "csl/graph.hpp"
#include "csl/sem.hpp"

namespace csl {

struct GlassoConfig {
    double lambda = 0.05;
    int max_iters = 200;
    double convergence_tol = 1e-5;  // mean absolute change of W per sweep
    std::optional<double> cov_threshold;  // zero |S_ij| below this before solving

    /// Operating point used throughout: lambda 0.05 up to 20 variables and
    /// 0.2 beyond, covariance thresholding at 0.03 for more than 40 variables.
    static GlassoConfig defaults_for(int d) {
        GlassoConfig cfg;
        cfg.lambda = d <= 20 ? 0.05 : 0.2;
        if (d > 40) cfg.cov_threshold = 0.03;
        return cfg;
    }
};

struct GlassoResult {
    PrecisionMatrix theta_hat;
    Eigen::MatrixXd sigma_hat;  // the working covariance W, dual-feasible
    int iterations = 0;
    bool converged = false;
    double dual_gap = 0.0;  // tr(S Theta) + lambda*||Theta||_1,off - d
    std::vector<double> dual_objective_trace;  // log det W after each sweep
};

/// Maximum-likelihood covariance of column-centered data, 1/n normalization.
inline Eigen::MatrixXd empirical_covariance(const Dataset& data) {
    const int n = data.num_samples();
    if (n < 2) throw std::invalid_argument("need at least 2 samples");
    Eigen::MatrixXd centered = data.values.rowwise() - data.values.colwise().mean();
    return (centered.transpose() * centered) / static_cast<double>(n);
}

namespace detail {

inline double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

}  // namespace detail

/// Block coordinate descent for
///   max_Theta  log det Theta - tr(S Theta) - lambda * ||Theta||_1,off
/// Each column subproblem is an L1-penalized quadratic solved by cyclic
/// coordinate descent with soft-thresholding (inner tolerance = outer / 10).
/// Off-diagonal entries of theta_hat are exact zeros wherever the lasso
/// zeroes them. Returns the best iterate with converged=false if the sweep
/// budget runs out.
inline GlassoResult graphical_lasso(Eigen::MatrixXd S, const GlassoConfig& cfg) {
    const int d = static_cast<int>(S.rows());
    if (S.cols() != d) throw std::invalid_argument("covariance must be square");
    if (((S - S.transpose()).cwiseAbs().maxCoeff()) > 1e-8 * (1.0 + S.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("covariance must be symmetric");
    if (cfg.lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    if (cfg.convergence_tol <= 0.0) throw std::invalid_argument("convergence_tol must be positive");
    for (int i = 0; i < d; ++i)
        if (S(i, i) <= 0.0) throw SingularInput("covariance has a nonpositive diagonal entry");
    S = ((S + S.transpose()) / 2.0).eval();

    // rank-deficient input (n < d): nudge the diagonal so W11 stays invertible
    {
        Eigen::LLT<Eigen::MatrixXd> llt(S);
        if (llt.info() != Eigen::Success) S.diagonal().array() += 1e-8;
    }

    GlassoResult res;
    if (d == 1) {
        res.theta_hat.theta = Eigen::MatrixXd::Constant(1, 1, 1.0 / S(0, 0));
        res.sigma_hat = S;
        res.converged = true;
        res.iterations = 0;
        return res;
    }

    Eigen::MatrixXd W = S;
    Eigen::MatrixXd Beta = Eigen::MatrixXd::Zero(d, d);  // column j: coefficients for block j
    const double inner_tol = cfg.convergence_tol / 10.0;
    const int max_inner = 100;
    const int off_entries = d * (d - 1);

    bool converged = false;
    int sweep = 0;
    for (; sweep < cfg.max_iters; ++sweep) {
        double total_change = 0.0;
        for (int j = 0; j < d; ++j) {
            // q_k = sum_{l != j} W(k,l) * beta_l, maintained incrementally
            Eigen::VectorXd beta = Beta.col(j);
            Eigen::VectorXd q = W * beta - W.col(j) * beta(j);
            for (int it = 0; it < max_inner; ++it) {
                double max_delta = 0.0;
                for (int k = 0; k < d; ++k) {
                    if (k == j) continue;
                    const double r = S(k, j) - (q(k) - W(k, k) * beta(k));
                    const double nb = detail::soft_threshold(r, cfg.lambda) / W(k, k);
                    const double delta = nb - beta(k);
                    if (delta != 0.0) {
                        q += delta * W.col(k);
                        beta(k) = nb;
                        max_delta = std::max(max_delta, std::abs(delta));
                    }
                }
                if (max_delta < inner_tol) break;
            }
            Beta.col(j) = beta;
            for (int k = 0; k < d; ++k) {
                if (k == j) continue;
                const double w_new = q(k);
                total_change += std::abs(w_new - W(k, j));
                W(k, j) = w_new;
                W(j, k) = w_new;
            }
        }
        {
            Eigen::LLT<Eigen::MatrixXd> llt(W);
            if (llt.info() == Eigen::Success)
                res.dual_objective_trace.push_back(
                    2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum());
        }
        if (total_change / off_entries < cfg.convergence_tol) {
            converged = true;
            ++sweep;
            break;
        }
    }

    // recover Theta column by column; zero off-diagonals stay exact zeros
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        double dot = 0.0;
        for (int k = 0; k < d; ++k)
            if (k != j) dot += W(k, j) * Beta(k, j);
        const double tjj = 1.0 / (W(j, j) - dot);
        theta(j, j) = tjj;
        for (int k = 0; k < d; ++k)
            if (k != j && Beta(k, j) != 0.0) theta(k, j) = -Beta(k, j) * tjj;
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            if (theta(i, j) == 0.0 && theta(j, i) == 0.0) continue;
            const double avg = (theta(i, j) + theta(j, i)) / 2.0;
            theta(i, j) = avg;
            theta(j, i) = avg;
        }

    res.theta_hat.theta = std::move(theta);
    res.sigma_hat = W;
    res.iterations = sweep;
    res.converged = converged;

    double l1_off = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) l1_off += std::abs(res.theta_hat.theta(i, j));
    res.dual_gap = (S * res.theta_hat.theta).trace() + cfg.lambda * l1_off - d;
    return res;
}

/// Max-norm violation of the stationarity condition
///   Theta^{-1} - S - lambda * subgrad(||Theta||_1,off) = 0.
inline double glasso_kkt_residual(const Eigen::MatrixXd& S, const PrecisionMatrix& theta,
                                  double lambda) {
    const Eigen::MatrixXd R = theta.theta.inverse() - S;
    const int d = static_cast<int>(S.rows());
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double v;
            if (i == j)
                v = std::abs(R(i, i));
            else if (theta.theta(i, j) != 0.0)
                v = std::abs(R(i, j) - lambda * (theta.theta(i, j) > 0 ? 1.0 : -1.0));
            else
                v = std::max(0.0, std::abs(R(i, j)) - lambda);
            worst = std::max(worst, v);
        }
    return worst;
}

/// Penalized log-likelihood log det Theta - tr(S Theta) - lambda*||Theta||_1,off.
inline double glasso_objective(const Eigen::MatrixXd& S, const PrecisionMatrix& theta,
                               double lambda) {
    Eigen::LLT<Eigen::MatrixXd> llt(theta.theta);
    if (llt.info() != Eigen::Success) return kNegInf;
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double l1_off = 0.0;
    const int d = static_cast<int>(S.rows());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) l1_off += std::abs(theta.theta(i, j));
    return logdet - (S * theta.theta).trace() - lambda * l1_off;
}

/// Estimated covariance -> optional entry thresholding -> graphical lasso ->
/// support of the estimated precision matrix.
inline UndirectedGraph estimate_superstructure(const Dataset& data, const GlassoConfig& cfg,
                                               GlassoResult* diagnostics = nullptr) {
    Eigen::MatrixXd S = empirical_covariance(data);
    if (cfg.cov_threshold) {
        const double t = *cfg.cov_threshold;
        const int d = static_cast<int>(S.rows());
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j && std::abs(S(i, j)) < t) S(i, j) = 0.0;
    }
    GlassoResult res = graphical_lasso(S, cfg);
    UndirectedGraph g = support_graph(res.theta_hat, 0.0);
    if (diagnostics) *diagnostics = std::move(res);
    return g;
}

}  // namespace csl
