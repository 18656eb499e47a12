#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "econloop/core/question.hpp"

namespace econloop {

enum class SeType { Classical, HC1, ClusterRobust };

std::string_view to_string(SeType se);
SeType se_type_from_string(std::string_view text);

struct DidFields {
    std::string treat_var;
    std::string post_var;

    bool operator==(const DidFields&) const = default;
};

struct EventFields {
    std::string event_time_var;
    int leads = 2;
    int lags = 2;
    int omitted_period = -1;

    bool operator==(const EventFields&) const = default;
};

struct Specification {
    std::string label;
    Design design = Design::OLS;
    std::string outcome;
    std::vector<std::string> regressors;
    bool entity_fe = false;
    bool time_fe = false;
    // Panel identifiers; required whenever fixed effects are requested.
    std::optional<std::string> entity_var;
    std::optional<std::string> time_var;
    std::optional<std::string> cluster_var;
    std::optional<DidFields> did_fields;
    std::optional<EventFields> event_fields;
    SeType se_type = SeType::HC1;

    /// Every variable the specification reads, outcome first.
    std::vector<std::string> variables() const;
    bool operator==(const Specification&) const = default;
};

struct AnalysisPlan {
    std::vector<Specification> specifications;
    std::size_t primary_index = 0;
    std::vector<std::string> notes;

    bool operator==(const AnalysisPlan&) const = default;
};

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::optional<int> event_time;

    // NaN inference fields (perfect fits) compare equal to each other.
    bool operator==(const Coefficient& other) const;
};

struct AnalysisResult {
    std::string result_id;
    Specification spec;
    std::vector<Coefficient> coefficients;
    std::size_t n_obs = 0;
    std::optional<std::size_t> n_entities;
    std::optional<std::size_t> n_clusters;
    std::size_t df_resid = 0;
    double r_squared = 0.0;
    bool within_r_squared = false;
    bool perfect_fit = false;
    std::vector<std::string> notes;

    const Coefficient* find(std::string_view name) const;
    bool operator==(const AnalysisResult&) const = default;
};

}  // namespace econloop
