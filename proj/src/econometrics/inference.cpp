#include "econloop/econometrics/inference.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "econloop/econometrics/errors.hpp"

namespace econloop::econometrics {

std::vector<std::size_t> dense_codes(const std::vector<std::string>& labels, std::size_t* n_groups) {
    std::unordered_map<std::string, std::size_t> ids;
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(ids.emplace(l, ids.size()).first->second);
    if (n_groups) *n_groups = ids.size();
    return out;
}

Eigen::MatrixXd vcov_classical(const Eigen::MatrixXd& xtx_inv, double ssr, double df) {
    return (ssr / df) * xtx_inv;
}

Eigen::MatrixXd vcov_hc1(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid, const Eigen::MatrixXd& xtx_inv,
                         double df) {
    const Eigen::MatrixXd weighted = X.array().colwise() * resid.array();
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(X.cols(), X.cols());
    meat.selfadjointView<Eigen::Lower>().rankUpdate(weighted.transpose());
    meat = meat.selfadjointView<Eigen::Lower>();
    const double n = static_cast<double>(X.rows());
    return (n / df) * xtx_inv * meat * xtx_inv;
}

Eigen::MatrixXd vcov_cr1(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid, const Eigen::MatrixXd& xtx_inv,
                         const std::vector<std::size_t>& clusters, std::size_t k) {
    std::size_t G = 0;
    for (auto c : clusters) G = std::max(G, c + 1);
    if (G < 2) throw InferenceError("cluster-robust standard errors need at least 2 clusters; got " + std::to_string(G));
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(G), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        scores.row(static_cast<Eigen::Index>(clusters[static_cast<std::size_t>(i)])) += resid(i) * X.row(i);
    const Eigen::MatrixXd meat = scores.transpose() * scores;
    const double n = static_cast<double>(X.rows());
    const double g = static_cast<double>(G);
    const double scale = g / (g - 1.0) * (n - 1.0) / (n - static_cast<double>(k));
    return scale * xtx_inv * meat * xtx_inv;
}

Eigen::VectorXd cluster_robust_se(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                                  const std::vector<std::size_t>& clusters) {
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    return vcov_cr1(X, resid, xtx_inv, clusters, static_cast<std::size_t>(X.cols())).diagonal().cwiseSqrt();
}

double t_pvalue(double t, double df) {
    if (std::isnan(t) || !(df > 0)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

double t_critical(double df, double level) {
    boost::math::students_t dist(df);
    return boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
}

}  // namespace econloop::econometrics
