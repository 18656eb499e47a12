#include "model.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "econloop/econometrics/errors.hpp"
#include "econloop/econometrics/inference.hpp"
#include "econloop/econometrics/linalg.hpp"

namespace econloop::econometrics::detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Subtracts group means in place from every column of M.
void demean(Eigen::MatrixXd& M, const std::vector<std::size_t>& groups, std::size_t n_groups) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_groups), M.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_groups));
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        const auto g = static_cast<Eigen::Index>(groups[static_cast<std::size_t>(i)]);
        sums.row(g) += M.row(i);
        counts(g) += 1.0;
    }
    for (Eigen::Index g = 0; g < sums.rows(); ++g) sums.row(g) /= counts(g);
    for (Eigen::Index i = 0; i < M.rows(); ++i) M.row(i) -= sums.row(static_cast<Eigen::Index>(groups[static_cast<std::size_t>(i)]));
}

bool balanced(const Frame& f) {
    if (f.n() != f.n_entities * f.n_times) return false;
    std::vector<bool> seen(f.n_entities * f.n_times, false);
    for (std::size_t i = 0; i < f.n(); ++i) {
        const auto cell = f.entity[i] * f.n_times + f.time[i];
        if (seen[cell]) return false;
        seen[cell] = true;
    }
    return true;
}

struct Within {
    Eigen::MatrixXd Xy;  // transformed regressors, outcome in the last column
    std::size_t absorbed = 0;
    std::string note;
};

Within within_transform(const Specification& spec, const Frame& f, Eigen::MatrixXd Xy) {
    Within w;
    if (spec.entity_fe && !spec.time_fe) {
        demean(Xy, f.entity, f.n_entities);
        w.absorbed = f.n_entities;
        w.note = "absorbed " + std::to_string(f.n_entities) + " entity effects";
    } else if (!spec.entity_fe && spec.time_fe) {
        demean(Xy, f.time, f.n_times);
        w.absorbed = f.n_times;
        w.note = "absorbed " + std::to_string(f.n_times) + " time effects";
    } else if (balanced(f)) {
        // x - mean_entity - mean_time + grand mean
        const Eigen::RowVectorXd grand = Xy.colwise().mean();
        Eigen::MatrixXd by_entity = Xy, by_time = Xy;
        demean(by_entity, f.entity, f.n_entities);
        demean(by_time, f.time, f.n_times);
        Eigen::MatrixXd out = by_entity + by_time - Xy;
        out.rowwise() += grand;
        Xy = std::move(out);
        w.absorbed = f.n_entities + f.n_times - 1;
        w.note = "two-way within transformation on a balanced panel (" + std::to_string(f.n_entities) +
                 " entities, " + std::to_string(f.n_times) + " periods)";
    } else {
        // Unbalanced: entity-demean, then partial out entity-demeaned time
        // dummies (Frisch-Waugh-Lovell).
        demean(Xy, f.entity, f.n_entities);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(Xy.rows(), static_cast<Eigen::Index>(f.n_times ? f.n_times - 1 : 0));
        for (std::size_t i = 0; i < f.n(); ++i)
            if (f.time[i] > 0) D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f.time[i] - 1)) = 1.0;
        demean(D, f.entity, f.n_entities);
        std::size_t rank = 0;
        if (D.cols() > 0) {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
            qr.setThreshold(kRankTolerance);
            rank = static_cast<std::size_t>(qr.rank());
            if (rank > 0) {
                const Eigen::MatrixXd coef = qr.solve(Xy);
                Xy -= D * coef;
            }
        }
        w.absorbed = f.n_entities + rank;
        w.note = "two-way fixed effects on an unbalanced panel (" + std::to_string(f.n_entities) + " entities, " +
                 std::to_string(rank) + " time dummies partialled out)";
    }
    w.Xy = std::move(Xy);
    return w;
}

}  // namespace

const Eigen::VectorXd& Frame::col(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    throw std::out_of_range("frame has no column " + name);
}

Frame collect(const data::Table& table, const Specification& spec, const std::vector<std::string>& required,
              const std::vector<std::string>& nullable) {
    auto invalid = [](const std::string& var, const std::string& what) {
        return EstimationError(EstimationErrorKind::InvalidSpecification, {var}, what);
    };
    std::vector<std::size_t> req_cols, null_cols;
    for (const auto& v : required) {
        auto c = table.column_index(v);
        if (!c) throw invalid(v, "variable '" + v + "' is not in the analytic table");
        req_cols.push_back(*c);
    }
    for (const auto& v : nullable) {
        auto c = table.column_index(v);
        if (!c) throw invalid(v, "variable '" + v + "' is not in the analytic table");
        null_cols.push_back(*c);
    }
    std::optional<std::size_t> ent, tim, clu;
    auto id_col = [&](const std::optional<std::string>& name) -> std::optional<std::size_t> {
        if (!name) return std::nullopt;
        auto c = table.column_index(*name);
        if (!c) throw invalid(*name, "identifier '" + *name + "' is not in the analytic table");
        return c;
    };
    if (spec.entity_fe || (spec.entity_var && table.column_index(*spec.entity_var))) ent = id_col(spec.entity_var);
    if (spec.time_fe) tim = id_col(spec.time_var);
    if (spec.se_type == SeType::ClusterRobust) clu = id_col(spec.cluster_var);

    Frame f;
    f.names = required;
    f.names.insert(f.names.end(), nullable.begin(), nullable.end());
    std::vector<std::vector<double>> values(f.names.size());
    std::vector<std::string> ent_labels, time_labels, clu_labels;

    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        bool keep = true;
        for (std::size_t j = 0; j < req_cols.size() && keep; ++j) {
            const auto& cell = table.at(r, req_cols[j]);
            if (cell.is_text()) throw invalid(required[j], "variable '" + required[j] + "' is not numeric");
            keep = cell.is_number();
        }
        for (auto c : {ent, tim, clu})
            if (keep && c) keep = !table.at(r, *c).missing();
        if (!keep) {
            ++f.dropped;
            continue;
        }
        f.rows.push_back(r);
        for (std::size_t j = 0; j < req_cols.size(); ++j) values[j].push_back(table.at(r, req_cols[j]).number());
        for (std::size_t j = 0; j < null_cols.size(); ++j) {
            const auto& cell = table.at(r, null_cols[j]);
            if (cell.is_text()) throw invalid(nullable[j], "variable '" + nullable[j] + "' is not numeric");
            values[req_cols.size() + j].push_back(cell.is_number() ? cell.number() : kNaN);
        }
        if (ent) ent_labels.push_back(table.display(table.at(r, *ent)));
        if (tim) time_labels.push_back(table.display(table.at(r, *tim)));
        if (clu) clu_labels.push_back(table.display(table.at(r, *clu)));
    }
    for (auto& v : values) f.columns.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    if (ent) f.entity = dense_codes(ent_labels, &f.n_entities);
    if (tim) f.time = dense_codes(time_labels, &f.n_times);
    if (clu) f.cluster = dense_codes(clu_labels, &f.n_clusters);
    return f;
}

AnalysisResult fit_linear(const Specification& spec, const Frame& f, const Eigen::VectorXd& y,
                          const DesignMatrix& design, std::vector<std::string> notes) {
    const bool fe = spec.entity_fe || spec.time_fe;
    const auto n = static_cast<Eigen::Index>(f.n());
    if (f.dropped > 0) notes.push_back(std::to_string(f.dropped) + " rows dropped for missing values");

    std::vector<std::string> names;
    std::vector<std::optional<int>> event_times;
    Eigen::MatrixXd X;
    Eigen::VectorXd yt;
    std::size_t absorbed = 0;
    double tss = 0.0;

    if (fe) {
        if (spec.entity_fe && f.n_entities == f.n() && f.n() > 0)
            throw EstimationError(EstimationErrorKind::RankDeficient, {spec.entity_var.value_or("entity")},
                                  "every entity is observed once; entity effects absorb the whole sample");
        if (static_cast<std::size_t>(n) <= static_cast<std::size_t>(design.X.cols()))
            throw EstimationError(EstimationErrorKind::InsufficientObservations, {},
                                  std::to_string(n) + " observations for " + std::to_string(design.X.cols()) + " regressors");
        Eigen::MatrixXd Xy(n, design.X.cols() + 1);
        Xy << design.X, y;
        auto w = within_transform(spec, f, std::move(Xy));
        absorbed = w.absorbed;
        notes.push_back(w.note);
        X = w.Xy.leftCols(design.X.cols());
        yt = w.Xy.col(design.X.cols());
        std::vector<std::string> flat;
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double raw = design.X.col(j).norm();
            if (!(raw > 0.0) || X.col(j).norm() <= 1e-9 * raw) flat.push_back(design.names[static_cast<std::size_t>(j)]);
        }
        if (!flat.empty())
            throw EstimationError(EstimationErrorKind::NoWithinVariation, flat,
                                  "regressor has no variation left after the within transformation");
        names = design.names;
        event_times = design.event_times;
        tss = yt.squaredNorm();
    } else {
        X.resize(n, design.X.cols() + 1);
        X << Eigen::VectorXd::Ones(n), design.X;
        yt = y;
        names.push_back("(Intercept)");
        names.insert(names.end(), design.names.begin(), design.names.end());
        event_times.push_back(std::nullopt);
        event_times.insert(event_times.end(), design.event_times.begin(), design.event_times.end());
        tss = n > 0 ? (y.array() - y.mean()).matrix().squaredNorm() : 0.0;
    }

    const auto k = static_cast<std::size_t>(X.cols());
    if (f.n() <= k + absorbed)
        throw EstimationError(EstimationErrorKind::InsufficientObservations, {},
                              std::to_string(f.n()) + " observations for " + std::to_string(k) + " parameters" +
                                  (absorbed ? " plus " + std::to_string(absorbed) + " absorbed effects" : ""));

    const auto ls = solve_least_squares(X, yt, names);
    const double df_resid = static_cast<double>(f.n() - k - absorbed);

    AnalysisResult out;
    out.spec = spec;
    out.n_obs = f.n();
    if (!f.entity.empty()) out.n_entities = f.n_entities;
    out.df_resid = f.n() - k - absorbed;
    out.within_r_squared = fe;
    out.r_squared = tss > 0.0 ? 1.0 - ls.ssr / tss : 1.0;
    out.perfect_fit = ls.ssr <= 1e-20 * tss || (tss == 0.0 && ls.ssr == 0.0);

    Eigen::MatrixXd V;
    double df_ref = df_resid;
    if (!out.perfect_fit) {
        switch (spec.se_type) {
        case SeType::Classical:
            V = vcov_classical(ls.xtx_inv, ls.ssr, df_resid);
            break;
        case SeType::HC1:
            V = vcov_hc1(X, ls.resid, ls.xtx_inv, df_resid);
            break;
        case SeType::ClusterRobust: {
            // Effects nested in the clusters (entity effects when clustering
            // by entity) do not count toward k.
            const bool nested = spec.entity_fe && spec.cluster_var == spec.entity_var;
            const std::size_t k_scale = k + absorbed - (nested ? f.n_entities : 0);
            try {
                V = vcov_cr1(X, ls.resid, ls.xtx_inv, f.cluster, k_scale);
                df_ref = static_cast<double>(f.n_clusters) - 1.0;
                out.n_clusters = f.n_clusters;
                notes.push_back("CR1 standard errors clustered by " + *spec.cluster_var + " (G = " +
                                std::to_string(f.n_clusters) + ")");
            } catch (const InferenceError& e) {
                V = vcov_classical(ls.xtx_inv, ls.ssr, df_resid);
                out.spec.se_type = SeType::Classical;
                out.n_clusters = f.n_clusters;
                notes.push_back(std::string("warning: ") + e.what() + "; classical standard errors reported");
            }
            break;
        }
        }
    } else {
        notes.push_back("perfect fit: residuals vanish, inference is degenerate");
    }

    const double crit = out.perfect_fit ? 0.0 : t_critical(df_ref);
    for (std::size_t j = 0; j < k; ++j) {
        Coefficient c;
        c.name = names[j];
        c.estimate = ls.beta(static_cast<Eigen::Index>(j));
        c.event_time = event_times[j];
        if (out.perfect_fit) {
            c.std_error = 0.0;
            c.t_stat = kNaN;
            c.p_value = kNaN;
            c.ci_low = c.ci_high = c.estimate;
        } else {
            c.std_error = std::sqrt(std::max(0.0, V(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j))));
            c.t_stat = c.estimate / c.std_error;
            c.p_value = t_pvalue(c.t_stat, df_ref);
            c.ci_low = c.estimate - crit * c.std_error;
            c.ci_high = c.estimate + crit * c.std_error;
        }
        out.coefficients.push_back(std::move(c));
    }

    const auto& outcome = y;
    bool binary = n > 0;
    for (Eigen::Index i = 0; i < n && binary; ++i) binary = outcome(i) == 0.0 || outcome(i) == 1.0;
    if (binary) notes.push_back("binary outcome: linear probability model");
    out.notes = std::move(notes);
    return out;
}

}  // namespace econloop::econometrics::detail
