#include "econloop/econometrics/errors.hpp"
#include "econloop/econometrics/estimators.hpp"
#include "model.hpp"

namespace econloop::econometrics {

AnalysisResult estimate_fe(const data::Table& table, const Specification& spec) {
    if (spec.design != Design::FixedEffects)
        throw EstimationError(EstimationErrorKind::InvalidSpecification, {},
                              "estimate_fe called with a non-fixed-effects specification");
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

}  // namespace econloop::econometrics
