#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "datasets.hpp"
#include "econloop/data/audit.hpp"
#include "econloop/profiler/moments.hpp"
#include "econloop/profiler/profile.hpp"
#include "property.hpp"

using namespace econloop;
using namespace econloop::profiler;
using econloop::testing::for_all;
using econloop::testing::NA;
using econloop::testing::rel_diff;
using econloop::testing::Rng;

namespace {

void expect_close(const std::optional<double>& a, const std::optional<double>& b, double tol, const std::string& what) {
    ASSERT_EQ(a.has_value(), b.has_value()) << what;
    if (a) { EXPECT_LE(rel_diff(*a, *b), tol) << what << ": " << *a << " vs " << *b; }
}

void expect_profiles_close(const DataProfile& a, const DataProfile& b) {
    ASSERT_EQ(a.variable_profiles.size(), b.variable_profiles.size());
    for (std::size_t i = 0; i < a.variable_profiles.size(); ++i) {
        const auto& x = a.variable_profiles[i];
        const auto& y = b.variable_profiles[i];
        EXPECT_EQ(x.name, y.name);
        EXPECT_EQ(x.kind, y.kind);
        EXPECT_EQ(x.missing_rate, y.missing_rate);
        EXPECT_EQ(x.n_distinct, y.n_distinct);
        EXPECT_EQ(x.top_categories, y.top_categories);
        expect_close(x.mean, y.mean, 1e-12, x.name + " mean");
        expect_close(x.sd, y.sd, 1e-12, x.name + " sd");
        expect_close(x.min, y.min, 0, x.name + " min");
        expect_close(x.max, y.max, 0, x.name + " max");
        expect_close(x.median, y.median, 0, x.name + " median");
        expect_close(x.skewness, y.skewness, 1e-9, x.name + " skewness");
    }
    ASSERT_EQ(a.correlations.size(), b.correlations.size());
    for (std::size_t i = 0; i < a.correlations.size(); ++i) {
        EXPECT_EQ(a.correlations[i].var_a, b.correlations[i].var_a);
        EXPECT_EQ(a.correlations[i].n_pairs, b.correlations[i].n_pairs);
        EXPECT_LE(rel_diff(a.correlations[i].pearson_r, b.correlations[i].pearson_r), 1e-12);
    }
    EXPECT_EQ(a.endogeneity_flags.size(), b.endogeneity_flags.size());
    EXPECT_EQ(a.transform_suggestions, b.transform_suggestions);
    EXPECT_EQ(a.high_missingness, b.high_missingness);
}

data::Table permuted(const data::Table& t, Rng& rng) {
    std::vector<std::size_t> order(t.n_rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    data::Table out(t.columns());
    std::vector<data::Cell> row(t.n_cols());
    for (auto r : order) {
        for (std::size_t c = 0; c < t.n_cols(); ++c) {
            const auto& cell = t.at(r, c);
            row[c] = cell.is_text() ? data::Cell::text(out.intern(t.text(cell.text_id()))) : cell;
        }
        out.append_row(row);
    }
    return out;
}

}  // namespace

TEST(Moments, SmallSample) {
    const std::vector<double> v{1, 2, 3, 4, NA};
    const auto m = two_pass_moments(v);
    EXPECT_EQ(m.n, 4u);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.min, 1);
    EXPECT_DOUBLE_EQ(m.max, 4);
    ASSERT_TRUE(m.skewness);
    EXPECT_NEAR(*m.skewness, 0.0, 1e-15);
    EXPECT_FALSE(two_pass_moments(std::vector<double>{3, 3, 3}).skewness);
}

TEST(Moments, SkewnessOfKnownSample) {
    // adjusted Fisher-Pearson of {1, 2, 10}: g1 * sqrt(n(n-1))/(n-2)
    const std::vector<double> v{1, 2, 10};
    const double mean = 13.0 / 3.0;
    double m2 = 0, m3 = 0;
    for (double x : v) {
        m2 += (x - mean) * (x - mean) / 3.0;
        m3 += (x - mean) * (x - mean) * (x - mean) / 3.0;
    }
    const double g1 = m3 / std::pow(m2, 1.5);
    const double expected = g1 * std::sqrt(6.0) / 1.0;
    EXPECT_NEAR(*two_pass_moments(v).skewness, expected, 1e-12);
}

TEST(MomentsProperty, OnePassAgreesWithTwoPass) {
    for_all(31, 100, [](Rng& rng, int i) {
        const int n = static_cast<int>(rng.integer(2, 500));
        const double offset = (i % 4 == 0) ? 1e6 : 0.0;  // stresses cancellation
        const double scale = rng.uniform(0.01, 100.0);
        std::vector<double> v;
        RunningMoments running;
        for (int k = 0; k < n; ++k) {
            const double x = rng.bernoulli(0.05) ? NA : offset + scale * std::exp(rng.normal());
            v.push_back(x);
            if (!std::isnan(x)) running.add(x);
        }
        const auto a = two_pass_moments(v);
        const auto b = running.result();
        ASSERT_EQ(a.n, b.n);
        if (a.n == 0) return;
        EXPECT_LE(rel_diff(a.mean, b.mean), 1e-12);
        EXPECT_LE(std::abs(a.variance - b.variance) / std::max(a.variance, 1e-300), 1e-9);
        EXPECT_EQ(a.min, b.min);
        EXPECT_EQ(a.max, b.max);
    });
}

TEST(Correlation, SymmetryAndSelf) {
    for_all(32, 50, [](Rng& rng, int) {
        const int n = static_cast<int>(rng.integer(3, 200));
        std::vector<double> a, b;
        for (int k = 0; k < n; ++k) {
            const double x = rng.normal();
            a.push_back(rng.bernoulli(0.1) ? NA : x);
            b.push_back(rng.bernoulli(0.1) ? NA : 0.3 * x + rng.normal());
        }
        const auto ab = pearson(a, b);
        const auto ba = pearson(b, a);
        ASSERT_EQ(ab.has_value(), ba.has_value());
        if (ab) {
            EXPECT_EQ(ab->r, ba->r);
            EXPECT_LE(std::abs(ab->r), 1.0);
        }
        const auto aa = pearson(a, a);
        if (aa) { EXPECT_NEAR(aa->r, 1.0, 1e-12); }
    });
    EXPECT_FALSE(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}));
}

TEST(Profile, LaborPanelInvariants) {
    const auto& p = econloop::testing::labor_profile();
    const auto& audit = econloop::testing::labor_audit();
    EXPECT_EQ(p.n_rows, audit.n_rows);
    for (const auto& v : p.variable_profiles) {
        const auto* info = audit.find(v.name);
        ASSERT_NE(info, nullptr);
        EXPECT_DOUBLE_EQ(v.missing_rate, 1.0 - static_cast<double>(info->n_nonmissing) / static_cast<double>(p.n_rows));
        if (v.sd) {
            EXPECT_GE(*v.sd, 0.0);
            EXPECT_LE(*v.min, *v.median);
            EXPECT_LE(*v.median, *v.max);
        }
        if (is_measure(v.kind) && info->n_nonmissing > 0) { EXPECT_TRUE(v.mean) << v.name; }
        if (!is_measure(v.kind)) { EXPECT_FALSE(v.mean) << v.name; }
    }
    // each unordered pair at most once, |r| <= 1
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& c : p.correlations) {
        EXPECT_LE(std::abs(c.pearson_r), 1.0);
        auto key = std::minmax(c.var_a, c.var_b);
        EXPECT_TRUE(pairs.insert({key.first, key.second}).second);
    }
    for (const auto& f : p.endogeneity_flags) EXPECT_NE(p.find_correlation(f.var_a, f.var_b), nullptr);

    // wage and log_wage move together; health_score is 30% missing
    bool flagged = false;
    for (const auto& f : p.endogeneity_flags)
        flagged |= (f.var_a == "wage" && f.var_b == "log_wage") || (f.var_a == "log_wage" && f.var_b == "wage");
    EXPECT_TRUE(flagged);
    bool noted = false;
    for (const auto& m : p.high_missingness) noted |= m.var == "health_score";
    EXPECT_TRUE(noted);
}

TEST(Profile, TransformSuggestions) {
    Rng rng(4);
    std::vector<econloop::testing::NamedColumn> cols(3);
    cols[0] = {"income", {}, ValueKind::Numeric};
    cols[1] = {"pop", {}, ValueKind::Numeric};
    cols[2] = {"flag", {}, ValueKind::Integer};
    for (int i = 0; i < 300; ++i) {
        cols[0].values.push_back(std::exp(1.5 * rng.normal()));
        cols[1].values.push_back(50000 + 5000 * rng.normal());
        cols[2].values.push_back(rng.bernoulli(0.5) ? 3 : 7);
    }
    const auto t = econloop::testing::numeric_table(cols);
    const auto audit = data::audit_dataset(t, "t");
    const auto p = profile(t, audit);
    std::map<std::string, TransformKind> got;
    for (const auto& s : p.transform_suggestions) got[s.var] = s.suggestion;
    EXPECT_EQ(got.at("income"), TransformKind::LogTransform);
    EXPECT_EQ(got.at("pop"), TransformKind::Standardize);
    EXPECT_EQ(got.at("flag"), TransformKind::BinaryRecode);
}

TEST(ProfileProperty, RowPermutationLeavesProfileUnchanged) {
    const auto& t = econloop::testing::labor_table();
    const auto& audit = econloop::testing::labor_audit();
    const auto& base = econloop::testing::labor_profile();
    for_all(33, 5, [&](Rng& rng, int) { expect_profiles_close(profile(permuted(t, rng), audit), base); });
}

TEST(Profile, Errors) {
    EXPECT_THROW(profile(data::Table{}, DatasetAudit{}), ProfilingError);
    const auto t = econloop::testing::numeric_table({{"a", {1, 2}, ValueKind::Numeric}});
    DatasetAudit wrong;
    EXPECT_THROW(profile(t, wrong), ProfilingError);
    EXPECT_NE(render_profile(econloop::testing::labor_profile()).find("health_score"), std::string::npos);
}
