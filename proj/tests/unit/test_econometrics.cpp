#include <chrono>
#include <cmath>
#include <filesystem>

#include <unistd.h>

#include <gtest/gtest.h>

#include "datasets.hpp"
#include "econloop/core/tables.hpp"
#include "econloop/econometrics/errors.hpp"
#include "econloop/econometrics/estimators.hpp"
#include "econloop/econometrics/inference.hpp"
#include "econloop/econometrics/linalg.hpp"
#include "econloop/econometrics/outputs.hpp"
#include "econloop/econometrics/plan.hpp"
#include "econloop/llm/scripted.hpp"
#include "oracles.hpp"
#include "property.hpp"
#include "scripts.hpp"

using namespace econloop;
using namespace econloop::econometrics;
using econloop::testing::for_all;
using econloop::testing::NA;
using econloop::testing::NamedColumn;
using econloop::testing::rel_diff;
using econloop::testing::Rng;
namespace oracle = econloop::testing::oracle;

namespace {

struct Cross {
    data::Table table;
    oracle::Matrix x;  // with the intercept column first
    std::vector<double> y;
    std::vector<std::string> names;
};

Cross random_cross(Rng& rng, int n, int k) {
    Cross c;
    std::vector<NamedColumn> cols;
    cols.push_back({"y", {}});
    for (int j = 1; j <= k; ++j) {
        c.names.push_back("x" + std::to_string(j));
        cols.push_back({c.names.back(), {}});
    }
    cols.push_back({"g", {}, ValueKind::Integer});
    std::vector<double> beta(static_cast<std::size_t>(k) + 1);
    for (auto& b : beta) b = rng.uniform(-3, 3);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row{1.0};
        double yi = beta[0];
        for (int j = 1; j <= k; ++j) {
            const double v = rng.normal() * rng.uniform(0.5, 5.0);
            row.push_back(v);
            cols[static_cast<std::size_t>(j)].values.push_back(v);
            yi += beta[static_cast<std::size_t>(j)] * v;
        }
        yi += rng.normal() * (0.5 + std::abs(row.back()) * 0.3);  // heteroskedastic
        cols[0].values.push_back(yi);
        cols.back().values.push_back(static_cast<double>(i % 7));
        c.x.push_back(row);
        c.y.push_back(yi);
    }
    c.table = econloop::testing::numeric_table(cols);
    return c;
}

Specification ols_spec(const std::vector<std::string>& regressors, SeType se = SeType::HC1) {
    Specification s;
    s.label = "ols";
    s.design = Design::OLS;
    s.outcome = "y";
    s.regressors = regressors;
    s.se_type = se;
    if (se == SeType::ClusterRobust) s.cluster_var = "g";
    return s;
}

struct Panel {
    data::Table table;
    oracle::Matrix x;
    std::vector<double> y;
    std::vector<int> entity, time;
    std::vector<std::string> names;
};

// Unbalanced panel with entity effects correlated with the regressors.
Panel random_panel(Rng& rng, int entities, int waves, int k, double keep = 0.85) {
    Panel p;
    std::vector<NamedColumn> cols{{"id", {}, ValueKind::Integer}, {"t", {}, ValueKind::Integer}, {"y", {}}};
    for (int j = 1; j <= k; ++j) {
        p.names.push_back("x" + std::to_string(j));
        cols.push_back({p.names.back(), {}});
    }
    std::vector<double> beta(static_cast<std::size_t>(k));
    for (auto& b : beta) b = rng.uniform(-2, 2);
    std::vector<double> gamma(static_cast<std::size_t>(waves));
    for (auto& g : gamma) g = rng.normal();
    for (int i = 0; i < entities; ++i) {
        const double alpha = rng.normal() * 3;
        for (int t = 0; t < waves; ++t) {
            if (!rng.bernoulli(keep) && t > 1) continue;  // every entity keeps two waves
            std::vector<double> row;
            double yi = alpha + gamma[static_cast<std::size_t>(t)];
            for (int j = 0; j < k; ++j) {
                const double v = rng.normal() + 0.5 * alpha;
                row.push_back(v);
                cols[static_cast<std::size_t>(3 + j)].values.push_back(v);
                yi += beta[static_cast<std::size_t>(j)] * v;
            }
            yi += rng.normal();
            cols[0].values.push_back(i + 1);
            cols[1].values.push_back(2000 + t);
            cols[2].values.push_back(yi);
            p.x.push_back(row);
            p.y.push_back(yi);
            p.entity.push_back(i);
            p.time.push_back(t);
        }
    }
    p.table = econloop::testing::numeric_table(cols);
    return p;
}

Specification fe_spec(const std::vector<std::string>& regressors, SeType se = SeType::HC1) {
    Specification s;
    s.label = "fe";
    s.design = Design::FixedEffects;
    s.outcome = "y";
    s.regressors = regressors;
    s.entity_fe = s.time_fe = true;
    s.entity_var = "id";
    s.time_var = "t";
    s.se_type = se;
    if (se == SeType::ClusterRobust) s.cluster_var = "id";
    return s;
}

Specification did_spec() {
    Specification s;
    s.label = "did";
    s.design = Design::DiD;
    s.outcome = "y";
    s.did_fields = DidFields{"treat", "post"};
    s.se_type = SeType::HC1;
    return s;
}

double coef(const AnalysisResult& r, const std::string& name) {
    const auto* c = r.find(name);
    if (!c) throw std::runtime_error("no coefficient " + name);
    return c->estimate;
}

Eigen::MatrixXd to_eigen(const oracle::Matrix& m) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m[0].size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[0].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
    return out;
}

// Staggered adoption, never-treated units, outcome = unit + period effects +
// 1 from the adoption period on. No noise.
data::Table step_panel() {
    std::vector<NamedColumn> cols{{"id", {}, ValueKind::Integer},
                                  {"t", {}, ValueKind::Integer},
                                  {"y", {}},
                                  {"ev", {}}};
    for (int i = 0; i < 12; ++i) {
        const int adopt = i < 4 ? 3 : i < 8 ? 5 : -1;
        for (int t = 0; t < 8; ++t) {
            const double e = adopt < 0 ? NA : static_cast<double>(t - adopt);
            const double y = 0.7 * i - 0.3 * t * t + 0.1 * t + ((adopt >= 0 && t >= adopt) ? 1.0 : 0.0);
            cols[0].values.push_back(i);
            cols[1].values.push_back(t);
            cols[2].values.push_back(y);
            cols[3].values.push_back(e);
        }
    }
    return econloop::testing::numeric_table(cols);
}

Specification es_spec() {
    Specification s;
    s.label = "es";
    s.design = Design::EventStudy;
    s.outcome = "y";
    s.entity_fe = s.time_fe = true;
    s.entity_var = "id";
    s.time_var = "t";
    s.cluster_var = "id";
    s.se_type = SeType::ClusterRobust;
    s.event_fields = EventFields{"ev", 2, 2, -1};
    return s;
}

}  // namespace

TEST(Ols, MatchesNormalEquationOracle) {
    const auto start = std::chrono::steady_clock::now();
    for_all(81, 20, [](Rng& rng, int) {
        const int k = static_cast<int>(rng.integer(1, 4));
        const int n = static_cast<int>(rng.integer(k + 3, 50));
        const auto c = random_cross(rng, n, k);
        const auto r = estimate_ols(c.table, ols_spec(c.names));
        const auto beta = oracle::ols(c.x, c.y);
        ASSERT_EQ(r.coefficients.size(), beta.size());
        EXPECT_EQ(r.coefficients[0].name, "(Intercept)");
        for (std::size_t j = 0; j < beta.size(); ++j) EXPECT_LE(rel_diff(r.coefficients[j].estimate, beta[j]), 1e-8);

        // residual orthogonality
        std::vector<double> b;
        for (const auto& co : r.coefficients) b.push_back(co.estimate);
        const auto u = oracle::residuals(c.x, c.y, b);
        double scale = 0, worst = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            double dot = 0, mag = 0;
            for (std::size_t i = 0; i < c.x.size(); ++i) {
                dot += c.x[i][j] * u[i];
                mag += std::abs(c.x[i][j]) * std::abs(c.y[i]);
            }
            worst = std::max(worst, std::abs(dot));
            scale = std::max(scale, mag);
        }
        EXPECT_LT(worst, 1e-8 * std::max(1.0, scale));

        // HC1 from the textbook sandwich
        const auto se = oracle::hc1(c.x, oracle::residuals(c.x, c.y, beta));
        for (std::size_t j = 0; j < se.size(); ++j) EXPECT_LE(rel_diff(r.coefficients[j].std_error, se[j]), 1e-8);
        EXPECT_EQ(r.n_obs, static_cast<std::size_t>(n));
        EXPECT_EQ(r.df_resid, static_cast<std::size_t>(n - k - 1));
    });
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(Ols, InferenceFieldsConsistent) {
    Rng rng(82);
    const auto c = random_cross(rng, 40, 3);
    for (auto se : {SeType::Classical, SeType::HC1, SeType::ClusterRobust}) {
        const auto r = estimate_ols(c.table, ols_spec(c.names, se));
        const double df = se == SeType::ClusterRobust ? 6.0 : 36.0;
        for (const auto& co : r.coefficients) {
            EXPECT_DOUBLE_EQ(co.t_stat, co.estimate / co.std_error);
            EXPECT_LE(co.ci_low, co.estimate);
            EXPECT_GE(co.ci_high, co.estimate);
            EXPECT_NEAR(co.p_value, t_pvalue(co.t_stat, df), 1e-14);
        }
    }
    const auto cl = estimate_ols(c.table, ols_spec(c.names, SeType::ClusterRobust));
    EXPECT_EQ(cl.n_clusters, std::optional<std::size_t>(7));
}

TEST(Ols, ClusterSeMatchesOracle) {
    Rng rng(83);
    const auto c = random_cross(rng, 45, 2);
    const auto r = estimate_ols(c.table, ols_spec(c.names, SeType::ClusterRobust));
    std::vector<int> g;
    for (std::size_t i = 0; i < c.x.size(); ++i) g.push_back(static_cast<int>(i % 7));
    const auto se = oracle::cr1(c.x, oracle::residuals(c.x, c.y, oracle::ols(c.x, c.y)), g);
    for (std::size_t j = 0; j < se.size(); ++j) EXPECT_LE(rel_diff(r.coefficients[j].std_error, se[j]), 1e-8);
}

TEST(OlsProperty, RescalingRegressorRescalesCoefficient) {
    for_all(84, 30, [](Rng& rng, int) {
        const int k = static_cast<int>(rng.integer(1, 4));
        auto c = random_cross(rng, static_cast<int>(rng.integer(20, 50)), k);
        const double factor = rng.uniform(0.1, 10.0) * (rng.bernoulli(0.5) ? 1 : -1);
        const auto col = c.table.require_column("x1");
        auto scaled = c.table;
        for (std::size_t r = 0; r < scaled.n_rows(); ++r)
            scaled.at(r, col) = data::Cell::number(scaled.at(r, col).number() * factor);
        for (auto se : {SeType::Classical, SeType::HC1, SeType::ClusterRobust}) {
            const auto a = estimate_ols(c.table, ols_spec(c.names, se));
            const auto b = estimate_ols(scaled, ols_spec(c.names, se));
            EXPECT_LE(rel_diff(coef(b, "x1"), coef(a, "x1") / factor), 1e-8);
            EXPECT_LE(rel_diff(b.find("x1")->t_stat, std::copysign(1.0, factor) * a.find("x1")->t_stat), 1e-8);
        }
    });
}

TEST(Ols, RankDeficiencyNamesColumns) {
    Rng rng(85);
    auto c = random_cross(rng, 30, 2);
    const auto col = c.table.add_column({"x3", ValueKind::Numeric});
    for (std::size_t r = 0; r < c.table.n_rows(); ++r)
        c.table.at(r, col) = data::Cell::number(2.0 * c.table.at(r, c.table.require_column("x1")).number());
    try {
        estimate_ols(c.table, ols_spec({"x1", "x2", "x3"}));
        FAIL();
    } catch (const EstimationError& e) {
        EXPECT_EQ(e.reason(), EstimationErrorKind::RankDeficient);
        ASSERT_EQ(e.offending().size(), 1u);
        EXPECT_TRUE(e.offending()[0] == "x1" || e.offending()[0] == "x3");
        EXPECT_EQ(e.detail()["kind"], "RankDeficient");
    }
}

TEST(Ols, TooFewObservationsAndMissingRows) {
    const auto t = econloop::testing::numeric_table({{"y", {1, 2}}, {"x1", {1, 3}}});
    try {
        estimate_ols(t, ols_spec({"x1"}));
        FAIL();
    } catch (const EstimationError& e) {
        EXPECT_EQ(e.reason(), EstimationErrorKind::InsufficientObservations);
    }
    const auto m = econloop::testing::numeric_table({{"y", {1, 2, NA, 4, 5}}, {"x1", {1, 3, 2, NA, 7}}});
    const auto r = estimate_ols(m, ols_spec({"x1"}));
    EXPECT_EQ(r.n_obs, 3u);
}

TEST(Fe, EqualsLsdvOnRandomPanels) {
    const auto start = std::chrono::steady_clock::now();
    for_all(91, 10, [](Rng& rng, int) {
        const int entities = static_cast<int>(rng.integer(3, 10));
        const int waves = static_cast<int>(rng.integer(3, 5));
        const int k = static_cast<int>(rng.integer(1, 2));
        const auto p = random_panel(rng, entities, waves, k);
        const auto r = estimate_fe(p.table, fe_spec(p.names));
        const auto beta = oracle::lsdv(p.x, p.y, p.entity, p.time, true);
        ASSERT_EQ(r.coefficients.size(), beta.size());
        for (std::size_t j = 0; j < beta.size(); ++j) EXPECT_LE(rel_diff(r.coefficients[j].estimate, beta[j]), 1e-8);
        EXPECT_TRUE(r.within_r_squared);
        EXPECT_EQ(r.n_entities, std::optional<std::size_t>(static_cast<std::size_t>(entities)));
    });
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(Fe, EntityOnlyEqualsLsdv) {
    Rng rng(92);
    const auto p = random_panel(rng, 8, 4, 2);
    auto s = fe_spec(p.names);
    s.time_fe = false;
    const auto r = estimate_fe(p.table, s);
    const auto beta = oracle::lsdv(p.x, p.y, p.entity, p.time, false);
    for (std::size_t j = 0; j < beta.size(); ++j) EXPECT_LE(rel_diff(r.coefficients[j].estimate, beta[j]), 1e-8);
}

TEST(Fe, TimeInvariantRegressorHasNoWithinVariation) {
    const auto& t = econloop::testing::labor_table();
    auto s = fe_spec({"birth_year", "experience"});
    s.outcome = "wage";
    s.entity_var = "id";
    s.time_var = "year";
    try {
        estimate_fe(t, s);
        FAIL();
    } catch (const EstimationError& e) {
        EXPECT_EQ(e.reason(), EstimationErrorKind::NoWithinVariation);
        EXPECT_EQ(e.offending(), std::vector<std::string>{"birth_year"});
        EXPECT_EQ(e.detail()["kind"], "NoWithinVariation");
        EXPECT_EQ(e.detail()["offending"][0], "birth_year");
    }
}

TEST(FeProperty, EntityConstantInOutcomeLeavesSlopesUnchanged) {
    for_all(93, 30, [](Rng& rng, int) {
        const auto p = random_panel(rng, static_cast<int>(rng.integer(3, 10)), static_cast<int>(rng.integer(3, 5)), 2);
        auto shifted = p.table;
        const auto id = shifted.require_column("id");
        const auto y = shifted.require_column("y");
        std::vector<double> shift(20);
        for (auto& s : shift) s = rng.uniform(-100, 100);
        for (std::size_t r = 0; r < shifted.n_rows(); ++r)
            shifted.at(r, y) = data::Cell::number(shifted.at(r, y).number() +
                                                  shift[static_cast<std::size_t>(shifted.at(r, id).number())]);
        for (bool time_fe : {false, true}) {
            auto s = fe_spec(p.names);
            s.time_fe = time_fe;
            const auto a = estimate_fe(p.table, s);
            const auto b = estimate_fe(shifted, s);
            for (std::size_t j = 0; j < a.coefficients.size(); ++j)
                EXPECT_LE(rel_diff(a.coefficients[j].estimate, b.coefficients[j].estimate), 1e-10);
        }
    });
}

TEST(FeProperty, RescalingUnderEverySeType) {
    for_all(94, 15, [](Rng& rng, int) {
        const auto p = random_panel(rng, 9, 5, 2);
        const double factor = rng.uniform(0.2, 20.0);
        auto scaled = p.table;
        const auto col = scaled.require_column("x2");
        for (std::size_t r = 0; r < scaled.n_rows(); ++r)
            scaled.at(r, col) = data::Cell::number(scaled.at(r, col).number() * factor);
        for (auto se : {SeType::Classical, SeType::HC1, SeType::ClusterRobust}) {
            const auto a = estimate_fe(p.table, fe_spec(p.names, se));
            const auto b = estimate_fe(scaled, fe_spec(p.names, se));
            EXPECT_LE(rel_diff(coef(b, "x2"), coef(a, "x2") / factor), 1e-8);
            EXPECT_LE(rel_diff(b.find("x2")->t_stat, a.find("x2")->t_stat), 1e-8);
        }
    });
}

TEST(Fe, SingleClusterFallsBackWithWarning) {
    Rng rng(95);
    const auto p = random_panel(rng, 6, 4, 1, 1.0);
    auto s = fe_spec(p.names, SeType::ClusterRobust);
    s.time_fe = false;
    s.cluster_var = "g";
    auto single = p.table;
    const auto g = single.add_column({"g", ValueKind::Integer});
    for (std::size_t r = 0; r < single.n_rows(); ++r) single.at(r, g) = data::Cell::number(1);
    const auto r = estimate_fe(single, s);
    EXPECT_EQ(r.spec.se_type, SeType::Classical);
    bool warned = false;
    for (const auto& n : r.notes) warned |= n.find("warning") != std::string::npos;
    EXPECT_TRUE(warned);
}

TEST(Did, ExactFourMeansCase) {
    // cell means (0,0)=1, (0,1)=2, (1,0)=3, (1,1)=5
    const auto t = econloop::testing::numeric_table({{"y", {0.5, 1.5, 2, 2, 3, 3, 4, 6}},
                                           {"treat", {0, 0, 0, 0, 1, 1, 1, 1}, ValueKind::Binary},
                                           {"post", {0, 0, 1, 1, 0, 0, 1, 1}, ValueKind::Binary}});
    const auto r = estimate_did(t, did_spec());
    EXPECT_NEAR(coef(r, "DiD"), 1.0, 1e-10);
    EXPECT_NEAR(coef(r, "(Intercept)"), 1.0, 1e-10);
}

TEST(Did, MatchesFourMeansOnBalancedCells) {
    for_all(101, 10, [](Rng& rng, int) {
        const int per_cell = static_cast<int>(rng.integer(2, 8));
        std::vector<double> y;
        std::vector<int> treat, post;
        for (int cell = 0; cell < 4; ++cell)
            for (int i = 0; i < per_cell; ++i) {
                treat.push_back(cell / 2);
                post.push_back(cell % 2);
                y.push_back(rng.uniform(-5, 5) + 2.0 * cell);
            }
        std::vector<double> tv(treat.begin(), treat.end()), pv(post.begin(), post.end());
        const auto t = econloop::testing::numeric_table({{"y", y}, {"treat", tv, ValueKind::Binary}, {"post", pv, ValueKind::Binary}});
        const auto r = estimate_did(t, did_spec());
        EXPECT_NEAR(coef(r, "DiD"), oracle::four_means(y, treat, post), 1e-10);
    });
}

TEST(Did, EmptyCellAndNonBinaryIndicator) {
    const auto t = econloop::testing::numeric_table({{"y", {1, 2, 3, 4}}, {"treat", {0, 0, 1, 1}}, {"post", {0, 1, 0, 0}}});
    try {
        estimate_did(t, did_spec());
        FAIL();
    } catch (const EstimationError& e) {
        EXPECT_EQ(e.reason(), EstimationErrorKind::EmptyCell);
        EXPECT_EQ(e.offending(), std::vector<std::string>{"treat=1,post=1"});
    }
    const auto bad = econloop::testing::numeric_table({{"y", {1, 2, 3, 4}}, {"treat", {0, 0, 2, 1}}, {"post", {0, 1, 0, 1}}});
    EXPECT_THROW(estimate_did(bad, did_spec()), EstimationError);
}

TEST(EventStudy, StepFunctionRecovered) {
    const auto r = estimate_event_study(step_panel(), es_spec());
    EXPECT_LT(std::abs(coef(r, "event_-2")), 1e-8);
    for (int k : {0, 1, 2}) EXPECT_NEAR(coef(r, "event_" + std::to_string(k)), 1.0, 1e-8) << k;
    EXPECT_EQ(r.find("event_-1"), nullptr);
    EXPECT_EQ(r.find("event_0")->event_time, std::optional<int>(0));
    EXPECT_FALSE(format_figure_csv(r).empty());
}

TEST(EventStudy, RequiresTwoWayEffects) {
    auto s = es_spec();
    s.time_fe = false;
    EXPECT_THROW(check_specification(s), EstimationError);
    s = es_spec();
    s.event_fields.reset();
    EXPECT_THROW(check_specification(s), EstimationError);
    s = es_spec();
    s.cluster_var.reset();
    EXPECT_THROW(check_specification(s), EstimationError);
}

TEST(Inference, SingletonClustersReproduceHc1) {
    for_all(111, 20, [](Rng& rng, int) {
        const int k = static_cast<int>(rng.integer(1, 4));
        const auto c = random_cross(rng, static_cast<int>(rng.integer(k + 5, 40)), k);
        const auto X = to_eigen(c.x);
        const Eigen::Map<const Eigen::VectorXd> y(c.y.data(), static_cast<Eigen::Index>(c.y.size()));
        std::vector<std::string> names(static_cast<std::size_t>(X.cols()), "x");
        const auto ls = solve_least_squares(X, y, names);
        const double n = static_cast<double>(X.rows());
        const double kk = static_cast<double>(X.cols());
        const Eigen::MatrixXd hc1 = vcov_hc1(X, ls.resid, ls.xtx_inv, n - kk);
        std::vector<std::size_t> singletons(static_cast<std::size_t>(X.rows()));
        for (std::size_t i = 0; i < singletons.size(); ++i) singletons[i] = i;
        const auto cr1 = cluster_robust_se(X, ls.resid, singletons);
        // G/(G-1) * (n-1)/(n-k) with G = n equals the HC1 factor n/(n-k)
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            EXPECT_LE(rel_diff(cr1(j), std::sqrt(hc1(j, j))), 1e-10);
    });
}

TEST(Inference, SingleClusterIsAnError) {
    Rng rng(112);
    const auto c = random_cross(rng, 20, 2);
    const auto X = to_eigen(c.x);
    const Eigen::Map<const Eigen::VectorXd> y(c.y.data(), static_cast<Eigen::Index>(c.y.size()));
    const auto ls = solve_least_squares(X, y, {"a", "b", "c"});
    EXPECT_THROW(cluster_robust_se(X, ls.resid, std::vector<std::size_t>(20, 0)), InferenceError);
}

TEST(Inference, StudentTReferenceValues) {
    // 30-digit values from the regularized incomplete beta
    EXPECT_NEAR(t_critical(10), 2.228138851986275, 1e-12);
    EXPECT_NEAR(t_critical(1), 12.70620473617471, 1e-10);
    EXPECT_NEAR(t_critical(1e7), 1.959963984540054, 1e-6);
    EXPECT_NEAR(t_pvalue(2.228138851986275, 10), 0.05, 1e-12);
    EXPECT_DOUBLE_EQ(t_pvalue(0, 5), 1.0);
    EXPECT_NEAR(t_pvalue(-2.228138851986275, 10), 0.05, 1e-12);
}

TEST(Linalg, DenseCodesAndDeficientColumns) {
    std::size_t g = 0;
    EXPECT_EQ(dense_codes({"b", "a", "b", "c"}, &g), (std::vector<std::size_t>{0, 1, 0, 2}));
    EXPECT_EQ(g, 3u);
    Eigen::MatrixXd X(4, 3);
    X << 1, 0, 2, 1, 0, 3, 1, 0, 4, 1, 0, 5;
    EXPECT_EQ(deficient_columns(X), std::vector<std::size_t>{1});
}

TEST(Plan, BaselineFollowsDesign) {
    const auto& audit = econloop::testing::labor_audit();
    auto q = [](std::string outcome, std::vector<std::string> treat, Design d) {
        ResearchQuestion r;
        r.question_id = "q1";
        r.outcome_var = std::move(outcome);
        r.treatment_vars = std::move(treat);
        r.control_vars = {"experience"};
        r.design = d;
        r.design_label = std::string(to_string(d));
        return r;
    };
    const auto ols = baseline_specification(q("wage", {"educ_years"}, Design::OLS), audit);
    EXPECT_EQ(ols.se_type, SeType::HC1);
    EXPECT_EQ(ols.regressors, (std::vector<std::string>{"educ_years", "experience"}));

    const auto fe = baseline_specification(q("wage", {"training"}, Design::FixedEffects), audit);
    EXPECT_TRUE(fe.entity_fe && fe.time_fe);
    EXPECT_EQ(fe.se_type, SeType::ClusterRobust);
    EXPECT_EQ(fe.cluster_var, std::optional<std::string>("id"));

    const auto did = baseline_specification(q("wage", {"treated", "post"}, Design::DiD), audit);
    EXPECT_EQ(did.did_fields, (std::optional<DidFields>(DidFields{"treated", "post"})));
    EXPECT_EQ(did.se_type, SeType::ClusterRobust);

    const auto es = baseline_specification(q("wage", {"event_time"}, Design::EventStudy), audit);
    ASSERT_TRUE(es.event_fields);
    EXPECT_EQ(es.event_fields->leads, 2);
    EXPECT_EQ(es.event_fields->omitted_period, -1);
    EXPECT_NO_THROW(check_specification(es));
}

TEST(Plan, RobustnessRequestAddsEventStudy) {
    const auto& audit = econloop::testing::labor_audit();
    ResearchQuestion q;
    q.question_id = "q1";
    q.outcome_var = "wage";
    q.treatment_vars = {"training"};
    q.design = Design::FixedEffects;
    q.design_label = "FixedEffects";
    const auto base = plan(q, audit);
    ASSERT_EQ(base.specifications.size(), 1u);

    llm::ScriptFixture f;
    f.add(llm::RoleTag::RevisionPlan, econloop::testing::event_study_plan_json().dump());
    f.add(llm::RoleTag::RevisionPlan, econloop::testing::event_study_plan_json().dump());
    llm::ScriptedBackend b(f);
    const std::vector<RevisionRequest> reqs{{RequestKind::RobustnessCheck, "event study please"},
                                            {RequestKind::Exposition, "shorter"}};
    const auto extended = plan(q, audit, reqs, &b, &base);
    ASSERT_EQ(extended.specifications.size(), 2u);
    EXPECT_EQ(extended.specifications[1].design, Design::EventStudy);
    EXPECT_EQ(extended.specifications[1].entity_var, std::optional<std::string>("id"));
    EXPECT_EQ(extended.primary_index, 0u);
    // asking again yields a duplicate that is dropped
    EXPECT_EQ(plan(q, audit, reqs, &b, &extended).specifications.size(), 2u);
    // no robustness request: no call
    EXPECT_EQ(plan(q, audit, {{RequestKind::Exposition, "x"}}, &b, &extended), extended);
}

TEST(Plan, InvalidPlansAreRejected) {
    const auto& audit = econloop::testing::labor_audit();
    ResearchQuestion q;
    q.question_id = "q1";
    q.outcome_var = "wage";
    q.treatment_vars = {"training"};
    q.design = Design::FixedEffects;
    q.design_label = "FixedEffects";
    const std::vector<RevisionRequest> reqs{{RequestKind::RobustnessCheck, "x"}};
    llm::ScriptFixture f;
    f.add(llm::RoleTag::RevisionPlan,
          R"({"specifications": [{"design": "OLS", "outcome": "wage", "regressors": ["parental_income"]}]})");
    f.add(llm::RoleTag::RevisionPlan, "no plan");
    f.add(llm::RoleTag::RevisionPlan, R"({"specifications": [{"design": "IV"}]})");
    llm::ScriptedBackend b(f);
    try {
        plan(q, audit, reqs, &b);
        FAIL();
    } catch (const PlanValidationError& e) {
        EXPECT_NE(e.problems()[0].find("parental_income"), std::string::npos);
    }
    EXPECT_THROW(plan(q, audit, reqs, &b), PlanValidationError);
    EXPECT_THROW(plan(q, audit, reqs, &b), PlanValidationError);

    auto ghost = q;
    ghost.outcome_var = "ghost";
    EXPECT_THROW(plan(ghost, audit), PlanValidationError);
}

TEST(Outputs, TablesAndFigures) {
    const auto dir = std::filesystem::temp_directory_path() / ("econloop_out_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    Rng rng(121);
    const auto c = random_cross(rng, 30, 2);
    auto a = estimate_ols(c.table, ols_spec(c.names));
    auto b = estimate_event_study(step_panel(), es_spec());
    const auto paths = emit_outputs({a, b}, dir);
    EXPECT_EQ(paths.size(), 3u);
    EXPECT_TRUE(std::filesystem::exists(dir / "table_1.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "table_2.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "figure_1.csv"));
    EXPECT_NE(render_result(a).find("x1"), std::string::npos);
    std::filesystem::remove_all(dir);
}
