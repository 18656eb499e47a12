#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace econloop::econometrics {

inline constexpr double kRankTolerance = 1e-10;

/// Columns responsible for rank deficiency of X, empty when X has full column
/// rank. Columns are scaled to unit norm first; X is deficient when the
/// singular-value ratio falls below `tol`. Offenders are the columns a
/// pivoted QR leaves outside the numerical rank (all-zero columns first).
std::vector<std::size_t> deficient_columns(const Eigen::MatrixXd& X, double tol = kRankTolerance);

struct LeastSquares {
    Eigen::VectorXd beta;
    Eigen::VectorXd resid;
    Eigen::MatrixXd xtx_inv;  // (X'X)^-1 = R^-1 R^-T
    double ssr = 0.0;
};

/// Householder QR solve. Throws EstimationError(RankDeficient) naming the
/// offending columns via `names`.
LeastSquares solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const std::vector<std::string>& names, double tol = kRankTolerance);

}  // namespace econloop::econometrics
