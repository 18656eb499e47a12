#include "econloop/econometrics/errors.hpp"
#include "econloop/econometrics/estimators.hpp"
#include "model.hpp"

namespace econloop::econometrics {

namespace {

EstimationError invalid(const std::string& what) {
    return EstimationError(EstimationErrorKind::InvalidSpecification, {}, what);
}

}  // namespace

void check_specification(const Specification& spec) {
    if (spec.outcome.empty()) throw invalid("specification has no outcome");
    if (spec.entity_fe && !spec.entity_var) throw invalid("entity fixed effects need an entity variable");
    if (spec.time_fe && !spec.time_var) throw invalid("time fixed effects need a time variable");
    if (spec.se_type == SeType::ClusterRobust && !spec.cluster_var)
        throw invalid("cluster-robust standard errors need a cluster variable");
    switch (spec.design) {
    case Design::OLS:
        if (spec.entity_fe || spec.time_fe) throw invalid("OLS specification cannot absorb fixed effects");
        if (spec.regressors.empty()) throw invalid("OLS specification has no regressors");
        break;
    case Design::FixedEffects:
        if (!spec.entity_fe) throw invalid("fixed-effects specification needs entity effects");
        if (spec.regressors.empty()) throw invalid("fixed-effects specification has no regressors");
        break;
    case Design::DiD:
        if (!spec.did_fields) throw invalid("DiD specification needs treat and post variables");
        if (spec.did_fields->treat_var == spec.did_fields->post_var)
            throw invalid("DiD treat and post variables must differ");
        break;
    case Design::EventStudy: {
        if (!spec.event_fields) throw invalid("event-study specification needs event-time fields");
        if (!spec.entity_fe || !spec.time_fe) throw invalid("event study needs entity and time fixed effects");
        const auto& ev = *spec.event_fields;
        if (ev.leads < 1 || ev.lags < 1) throw invalid("event window needs leads >= 1 and lags >= 1");
        if (ev.omitted_period < -ev.leads || ev.omitted_period > ev.lags)
            throw invalid("omitted period " + std::to_string(ev.omitted_period) + " lies outside the event window [" +
                          std::to_string(-ev.leads) + ", " + std::to_string(ev.lags) + "]");
        break;
    }
    case Design::Unsupported:
        throw invalid("unsupported design");
    }
}

AnalysisResult estimate_ols(const data::Table& table, const Specification& spec) {
    if (spec.design != Design::OLS) throw invalid("estimate_ols called with a non-OLS specification");
    check_specification(spec);
    std::vector<std::string> required{spec.outcome};
    for (const auto& r : spec.regressors)
        if (std::find(required.begin(), required.end(), r) == required.end()) required.push_back(r);
    const auto frame = detail::collect(table, spec, required);

    detail::DesignMatrix d;
    d.X.resize(static_cast<Eigen::Index>(frame.n()), static_cast<Eigen::Index>(spec.regressors.size()));
    for (std::size_t j = 0; j < spec.regressors.size(); ++j) d.X.col(static_cast<Eigen::Index>(j)) = frame.col(spec.regressors[j]);
    d.names = spec.regressors;
    d.event_times.assign(spec.regressors.size(), std::nullopt);
    return detail::fit_linear(spec, frame, frame.col(spec.outcome), d, {});
}

AnalysisResult estimate(const data::Table& table, const Specification& spec) {
    switch (spec.design) {
    case Design::OLS: return estimate_ols(table, spec);
    case Design::FixedEffects: return estimate_fe(table, spec);
    case Design::DiD: return estimate_did(table, spec);
    case Design::EventStudy: return estimate_event_study(table, spec);
    case Design::Unsupported: break;
    }
    throw invalid("no estimator for an unsupported design");
}

}  // namespace econloop::econometrics
