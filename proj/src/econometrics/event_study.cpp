#include <cmath>

#include "econloop/econometrics/errors.hpp"
#include "econloop/econometrics/estimators.hpp"
#include "model.hpp"

namespace econloop::econometrics {

AnalysisResult estimate_event_study(const data::Table& table, const Specification& spec) {
    if (spec.design != Design::EventStudy)
        throw EstimationError(EstimationErrorKind::InvalidSpecification, {},
                              "estimate_event_study called with a non-event-study specification");
    check_specification(spec);
    const auto& ev = *spec.event_fields;

    std::vector<std::string> required{spec.outcome};
    std::vector<std::string> controls;
    for (const auto& r : spec.regressors)
        if (r != ev.event_time_var && std::find(required.begin(), required.end(), r) == required.end()) {
            required.push_back(r);
            controls.push_back(r);
        }
    const auto frame = detail::collect(table, spec, required, {ev.event_time_var});
    const auto& et = frame.col(ev.event_time_var);

    // Event times outside the window are binned into the endpoints; a missing
    // event time marks a never-treated unit (all dummies zero).
    std::vector<int> periods;
    for (int k = -ev.leads; k <= ev.lags; ++k)
        if (k != ev.omitted_period) periods.push_back(k);

    const auto n = static_cast<Eigen::Index>(frame.n());
    detail::DesignMatrix d;
    d.X = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(periods.size() + controls.size()));
    std::size_t never = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double e = et(i);
        if (std::isnan(e)) {
            ++never;
            continue;
        }
        if (std::abs(e - std::round(e)) > 1e-9)
            throw EstimationError(EstimationErrorKind::InvalidSpecification, {ev.event_time_var},
                                  "event time must be an integer number of periods");
        const int bin = std::clamp(static_cast<int>(std::lround(e)), -ev.leads, ev.lags);
        for (std::size_t j = 0; j < periods.size(); ++j)
            if (periods[j] == bin) d.X(i, static_cast<Eigen::Index>(j)) = 1.0;
    }
    for (int p : periods) {
        d.names.push_back("event_" + std::to_string(p));
        d.event_times.push_back(p);
    }
    for (std::size_t j = 0; j < controls.size(); ++j) {
        d.X.col(static_cast<Eigen::Index>(periods.size() + j)) = frame.col(controls[j]);
        d.names.push_back(controls[j]);
        d.event_times.push_back(std::nullopt);
    }

    std::vector<std::string> notes{"event window [" + std::to_string(-ev.leads) + ", " + std::to_string(ev.lags) +
                                   "] relative to period " + std::to_string(ev.omitted_period) +
                                   ", endpoints binned; " + std::to_string(never) + " never-treated observations"};
    try {
        return detail::fit_linear(spec, frame, frame.col(spec.outcome), d, std::move(notes));
    } catch (const EstimationError& e) {
        // An event-time dummy without variation means the observations do not
        // spread over the window: report it as rank deficiency.
        if (e.reason() != EstimationErrorKind::NoWithinVariation) throw;
        for (const auto& name : e.offending())
            if (name.rfind("event_", 0) != 0) throw;
        throw EstimationError(EstimationErrorKind::RankDeficient, e.offending(),
                              "event-time dummies are collinear with the fixed effects (observations concentrated in too few bins)");
    }
}

}  // namespace econloop::econometrics
