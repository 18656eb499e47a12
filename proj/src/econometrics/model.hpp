#pragma once

// Shared plumbing for the linear estimators: sample extraction and the
// fit + inference step.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "econloop/core/analysis.hpp"
#include "econloop/data/table.hpp"

namespace econloop::econometrics::detail {

struct Frame {
    std::vector<std::size_t> rows;  // table rows used
    std::size_t dropped = 0;
    std::vector<std::string> names;
    std::vector<Eigen::VectorXd> columns;  // NaN only in nullable columns
    std::vector<std::size_t> entity, time, cluster;
    std::size_t n_entities = 0, n_times = 0, n_clusters = 0;

    std::size_t n() const { return rows.size(); }
    const Eigen::VectorXd& col(const std::string& name) const;
};

/// Keeps rows where every `required` variable and every panel/cluster
/// identifier of `spec` is present. `nullable` variables may be missing.
Frame collect(const data::Table& table, const Specification& spec, const std::vector<std::string>& required,
              const std::vector<std::string>& nullable = {});

struct DesignMatrix {
    Eigen::MatrixXd X;  // regressors without intercept
    std::vector<std::string> names;
    std::vector<std::optional<int>> event_times;
};

/// Fits y on the design, absorbing the fixed effects requested by `spec`
/// (intercept otherwise), and attaches inference per spec.se_type.
AnalysisResult fit_linear(const Specification& spec, const Frame& frame, const Eigen::VectorXd& y,
                          const DesignMatrix& design, std::vector<std::string> notes);

}  // namespace econloop::econometrics::detail
