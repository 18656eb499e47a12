#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace econloop::econometrics {

/// Maps labels to dense codes 0..G-1 in order of first appearance.
std::vector<std::size_t> dense_codes(const std::vector<std::string>& labels, std::size_t* n_groups = nullptr);

/// sigma^2 (X'X)^-1 with sigma^2 = ssr / df.
Eigen::MatrixXd vcov_classical(const Eigen::MatrixXd& xtx_inv, double ssr, double df);

/// n/df * (X'X)^-1 (sum_i x_i x_i' u_i^2) (X'X)^-1.
Eigen::MatrixXd vcov_hc1(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid, const Eigen::MatrixXd& xtx_inv,
                         double df);

/// CR1: G/(G-1) * (n-1)/(n-k) * (X'X)^-1 (sum_g X_g' u_g u_g' X_g) (X'X)^-1.
/// Throws InferenceError for fewer than two clusters.
Eigen::MatrixXd vcov_cr1(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid, const Eigen::MatrixXd& xtx_inv,
                         const std::vector<std::size_t>& clusters, std::size_t k);

/// Standalone CR1 standard errors for an OLS fit of X (k = X.cols()).
Eigen::VectorXd cluster_robust_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                                  const std::vector<std::size_t>& clusters);

/// Two-sided p-value of t under Student's t with df degrees of freedom.
double t_pvalue(double t, double df);
/// Two-sided critical value, e.g. 0.95 -> t_{0.975, df}.
double t_critical(double df, double level = 0.95);

}  // namespace econloop::econometrics
