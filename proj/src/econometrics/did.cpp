#include <array>

#include "econloop/econometrics/errors.hpp"
#include "econloop/econometrics/estimators.hpp"
#include "model.hpp"

namespace econloop::econometrics {

AnalysisResult estimate_did(const data::Table& table, const Specification& spec) {
    if (spec.design != Design::DiD)
        throw EstimationError(EstimationErrorKind::InvalidSpecification, {}, "estimate_did called with a non-DiD specification");
    check_specification(spec);
    const auto& treat = spec.did_fields->treat_var;
    const auto& post = spec.did_fields->post_var;

    std::vector<std::string> required{spec.outcome, treat, post};
    std::vector<std::string> controls;
    for (const auto& r : spec.regressors)
        if (std::find(required.begin(), required.end(), r) == required.end()) {
            required.push_back(r);
            controls.push_back(r);
        }
    const auto frame = detail::collect(table, spec, required);
    const auto& tv = frame.col(treat);
    const auto& pv = frame.col(post);

    std::array<std::size_t, 4> cells{};
    for (Eigen::Index i = 0; i < tv.size(); ++i) {
        for (const auto& [v, name] : {std::pair{tv(i), &treat}, std::pair{pv(i), &post}})
            if (v != 0.0 && v != 1.0)
                throw EstimationError(EstimationErrorKind::InvalidSpecification, {*name},
                                      "DiD indicator '" + *name + "' takes values other than 0 and 1");
        ++cells[static_cast<std::size_t>(2 * tv(i) + pv(i))];
    }
    std::vector<std::string> empty;
    for (int c = 0; c < 4; ++c)
        if (cells[static_cast<std::size_t>(c)] == 0)
            empty.push_back(treat + "=" + std::to_string(c / 2) + "," + post + "=" + std::to_string(c % 2));
    if (!empty.empty())
        throw EstimationError(EstimationErrorKind::EmptyCell, empty, "a treatment-by-period cell has no observations");

    detail::DesignMatrix d;
    const auto n = static_cast<Eigen::Index>(frame.n());
    d.X.resize(n, static_cast<Eigen::Index>(3 + controls.size()));
    d.X.col(0) = tv;
    d.X.col(1) = pv;
    d.X.col(2) = tv.cwiseProduct(pv);
    for (std::size_t j = 0; j < controls.size(); ++j) d.X.col(static_cast<Eigen::Index>(3 + j)) = frame.col(controls[j]);
    d.names = {treat, post, "DiD"};
    d.names.insert(d.names.end(), controls.begin(), controls.end());
    d.event_times.assign(d.names.size(), std::nullopt);
    return detail::fit_linear(spec, frame, frame.col(spec.outcome), d, {});
}

}  // namespace econloop::econometrics
