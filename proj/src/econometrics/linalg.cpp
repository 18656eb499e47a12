#include "econloop/econometrics/linalg.hpp"

#include <algorithm>

#include "econloop/econometrics/errors.hpp"

namespace econloop::econometrics {

std::vector<std::size_t> deficient_columns(const Eigen::MatrixXd& X, double tol) {
    const auto k = X.cols();
    std::vector<std::size_t> zero;
    Eigen::MatrixXd Z = X;
    for (Eigen::Index j = 0; j < k; ++j) {
        const double norm = X.col(j).norm();
        if (!(norm > 0.0)) zero.push_back(static_cast<std::size_t>(j));
        else Z.col(j) /= norm;
    }
    if (!zero.empty()) return zero;
    if (k == 0) return {};

    // Singular values of R equal those of Z, at k x k cost.
    // A wide matrix is always deficient; skip straight to the pivoted QR.
    if (Z.rows() >= k) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
        const Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) >= tol * s(0)) return {};
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> piv(Z);
    piv.setThreshold(tol);
    const auto rank = piv.rank();
    std::vector<std::size_t> out;
    const auto& perm = piv.colsPermutation().indices();
    for (Eigen::Index i = std::max<Eigen::Index>(rank, 0); i < k; ++i) out.push_back(static_cast<std::size_t>(perm(i)));
    if (out.empty()) out.push_back(static_cast<std::size_t>(perm(k - 1)));
    std::sort(out.begin(), out.end());
    return out;
}

LeastSquares solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const std::vector<std::string>& names, double tol) {
    const auto bad = deficient_columns(X, tol);
    if (!bad.empty()) {
        std::vector<std::string> cols;
        for (auto j : bad) cols.push_back(j < names.size() ? names[j] : "column " + std::to_string(j));
        throw EstimationError(EstimationErrorKind::RankDeficient, cols, "design matrix is not of full column rank");
    }
    const auto k = X.cols();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Eigen::VectorXd qty = (qr.householderQ().transpose() * y).head(k);

    LeastSquares out;
    out.beta = R.triangularView<Eigen::Upper>().solve(qty);
    const Eigen::MatrixXd rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    out.xtx_inv = rinv * rinv.transpose();
    out.resid = y - X * out.beta;
    out.ssr = out.resid.squaredNorm();
    return out;
}

}  // namespace econloop::econometrics
