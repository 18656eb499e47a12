#include "econloop/profiler/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "econloop/profiler/moments.hpp"

namespace econloop::profiler {

namespace {

struct NumericColumn {
    std::size_t col = 0;
    std::string name;
    std::vector<double> values;  // NaN = missing
    Moments moments;
    bool complete = false;
};

std::string percent(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", rate * 100.0);
    return buf;
}

std::string fixed(double v, int digits = 3) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

VariableProfile profile_measure(const NumericColumn& column, ValueKind kind, std::size_t n_rows) {
    VariableProfile p;
    p.name = column.name;
    p.kind = kind;
    // Moments over sorted values so the profile does not depend on row order.
    std::vector<double> sorted;
    sorted.reserve(column.values.size());
    for (double v : column.values)
        if (!std::isnan(v)) sorted.push_back(v);
    std::sort(sorted.begin(), sorted.end());
    p.missing_rate = 1.0 - static_cast<double>(sorted.size()) / static_cast<double>(n_rows);
    for (std::size_t i = 0; i < sorted.size(); ++i) p.n_distinct += (i == 0 || sorted[i] != sorted[i - 1]);
    if (sorted.empty()) return p;
    const Moments m = two_pass_moments(sorted);
    p.mean = m.mean;
    p.sd = m.sd();
    p.min = m.min;
    p.max = m.max;
    const std::size_t n = sorted.size();
    p.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    p.skewness = m.skewness;
    return p;
}

VariableProfile profile_labels(const data::Table& table, std::size_t col, const VariableInfo& info,
                               const ProfileOptions& options) {
    VariableProfile p;
    p.name = info.name;
    p.kind = info.dtype;
    std::map<std::string, std::size_t> counts;
    std::size_t present = 0;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const auto& cell = table.at(r, col);
        if (cell.missing()) continue;
        ++present;
        ++counts[table.display(cell)];
    }
    p.missing_rate = 1.0 - static_cast<double>(present) / static_cast<double>(table.n_rows());
    p.n_distinct = counts.size();
    if (info.dtype == ValueKind::Categorical || info.dtype == ValueKind::Text) {
        std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(), counts.end());
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        if (ordered.size() > options.top_categories) ordered.resize(options.top_categories);
        p.top_categories = std::move(ordered);
    }
    return p;
}

}  // namespace

DataProfile profile(const data::Table& table, const DatasetAudit& audit, const ProfileOptions& options) {
    if (table.empty() || table.n_cols() == 0) throw ProfilingError("cannot profile an empty table");
    if (audit.variables.size() != table.n_cols())
        throw ProfilingError("audit does not describe this table (column count differs)");

    const std::size_t n_rows = table.n_rows();
    DataProfile out;
    out.dataset_id = audit.dataset_id;
    out.n_rows = n_rows;

    std::vector<NumericColumn> measures;
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        const auto& info = audit.variables[c];
        if (info.name != table.columns()[c].name)
            throw ProfilingError("audit variable order does not match table columns at '" + info.name + "'");
        if (is_measure(info.dtype)) {
            NumericColumn column{c, info.name, table.numeric_column(c), {}, false};
            column.moments = two_pass_moments(column.values);
            column.complete = column.moments.n == n_rows;
            out.variable_profiles.push_back(profile_measure(column, info.dtype, n_rows));
            measures.push_back(std::move(column));
        } else {
            out.variable_profiles.push_back(profile_labels(table, c, info, options));
        }
    }

    for (const auto& p : out.variable_profiles) {
        if (p.missing_rate >= options.high_missing_threshold)
            out.high_missingness.push_back(
                {p.name, p.missing_rate, "high missingness: " + percent(p.missing_rate) + " of observations missing"});
    }

    // Correlation candidates: nonconstant measures with enough observations.
    std::vector<const NumericColumn*> candidates;
    for (const auto& m : measures)
        if (m.moments.n >= options.min_pairs && m.moments.variance > 0.0) candidates.push_back(&m);

    // Complete columns share one standardized block product.
    std::vector<std::size_t> complete_idx;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (candidates[i]->complete) complete_idx.push_back(i);
    Eigen::MatrixXd block_r;
    std::vector<std::ptrdiff_t> block_pos(candidates.size(), -1);
    if (complete_idx.size() >= 2) {
        Eigen::MatrixXd z(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(complete_idx.size()));
        for (std::size_t k = 0; k < complete_idx.size(); ++k) {
            const auto* col = candidates[complete_idx[k]];
            const double mean = col->moments.mean;
            const double scale = 1.0 / std::sqrt(col->moments.variance * static_cast<double>(n_rows - 1));
            for (std::size_t r = 0; r < n_rows; ++r)
                z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = (col->values[r] - mean) * scale;
            block_pos[complete_idx[k]] = static_cast<std::ptrdiff_t>(k);
        }
        block_r = Eigen::MatrixXd::Zero(z.cols(), z.cols());
        block_r.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
    }

    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            Correlation c{candidates[i]->name, candidates[j]->name, 0.0, 0};
            if (block_pos[i] >= 0 && block_pos[j] >= 0) {
                const auto a = std::max(block_pos[i], block_pos[j]);
                const auto b = std::min(block_pos[i], block_pos[j]);
                c.pearson_r = std::clamp(block_r(a, b), -1.0, 1.0);
                c.n_pairs = n_rows;
            } else {
                auto pc = pearson(candidates[i]->values, candidates[j]->values);
                if (!pc) continue;
                c.pearson_r = pc->r;
                c.n_pairs = pc->n_pairs;
            }
            if (c.n_pairs < options.min_pairs) continue;
            if (std::abs(c.pearson_r) > options.endogeneity_threshold)
                out.endogeneity_flags.push_back(
                    {c.var_a, c.var_b,
                     "strong correlation among candidate regressors (r = " + fixed(c.pearson_r) +
                         "); jointly determined or reverse-causal relationship possible"});
            out.correlations.push_back(std::move(c));
        }
    }

    for (std::size_t k = 0; k < measures.size(); ++k) {
        const auto& column = measures[k];
        const auto* p = out.find(column.name);
        if (!p->mean) continue;
        const ValueKind kind = audit.variables[column.col].dtype;
        if (kind != ValueKind::Binary && p->skewness && *p->skewness > options.log_skew_threshold && *p->min > 0.0) {
            out.transform_suggestions.push_back({column.name, TransformKind::LogTransform,
                                                 "right-skewed (skewness " + fixed(*p->skewness, 2) +
                                                     ") and strictly positive"});
        } else if (kind == ValueKind::Integer && p->n_distinct == 2) {
            out.transform_suggestions.push_back(
                {column.name, TransformKind::BinaryRecode, "two distinct values; recode to a 0/1 indicator"});
        } else if (kind != ValueKind::Binary &&
                   (*p->sd > options.standardize_scale || std::abs(*p->mean) > options.standardize_scale)) {
            out.transform_suggestions.push_back(
                {column.name, TransformKind::Standardize, "large scale (sd " + fixed(*p->sd, 1) + ")"});
        }
    }
    return out;
}

std::string render_profile(const DataProfile& profile) {
    std::ostringstream os;
    os << "dataset " << profile.dataset_id << ": " << profile.n_rows << " rows, " << profile.variable_profiles.size()
       << " variables\n\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %-12s %8s %12s %12s %12s %12s %9s\n", "variable", "kind", "missing", "mean",
                  "sd", "min", "max", "distinct");
    os << line;
    for (const auto& p : profile.variable_profiles) {
        auto num = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string("-"); };
        std::snprintf(line, sizeof line, "%-24s %-12s %8s %12s %12s %12s %12s %9zu\n", p.name.c_str(),
                      std::string(to_string(p.kind)).c_str(), percent(p.missing_rate).c_str(), num(p.mean).c_str(),
                      num(p.sd).c_str(), num(p.min).c_str(), num(p.max).c_str(), p.n_distinct);
        os << line;
    }
    if (!profile.high_missingness.empty()) {
        os << "\nhigh missingness:\n";
        for (const auto& m : profile.high_missingness) os << "  " << m.var << ": " << m.note << "\n";
    }
    if (!profile.endogeneity_flags.empty()) {
        os << "\nendogeneity flags:\n";
        for (const auto& f : profile.endogeneity_flags) os << "  " << f.var_a << " ~ " << f.var_b << ": " << f.reason << "\n";
    }
    if (!profile.transform_suggestions.empty()) {
        os << "\ntransform suggestions:\n";
        for (const auto& t : profile.transform_suggestions)
            os << "  " << t.var << ": " << to_string(t.suggestion) << " (" << t.reason << ")\n";
    }
    return os.str();
}

}  // namespace econloop::profiler
