#include "econloop/questions/screen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace econloop::questions {

namespace {

std::size_t n_waves(const DatasetAudit& audit) {
    return audit.panel_structure ? audit.panel_structure->waves.size() : 0;
}

// Structural check of the design against the data. Variables absent from the
// audit make role-specific checks fail; attribution still goes to criterion 1.
std::pair<bool, std::string> check_design(const ResearchQuestion& q, const DatasetAudit& audit) {
    const std::size_t waves = n_waves(audit);
    switch (q.design) {
    case Design::OLS:
        return {true, "cross-sectional regression needs no panel structure"};
    case Design::FixedEffects:
        if (waves < 2) return {false, "fixed effects need a panel with at least 2 waves"};
        return {true, "panel with " + std::to_string(waves) + " waves"};
    case Design::EventStudy: {
        if (!audit.panel_structure) return {false, "event study needs a panel"};
        if (waves < 3)
            return {false, "event study needs at least 3 waves; panel has " + std::to_string(waves)};
        const auto* ev = audit.find(q.treatment_vars.front());
        if (!ev) return {false, "event-time variable '" + q.treatment_vars.front() + "' is absent"};
        if (!is_measure(ev->dtype)) return {false, "event-time variable '" + ev->name + "' is not numeric"};
        return {true, "panel with " + std::to_string(waves) + " waves"};
    }
    case Design::DiD: {
        const auto* treat = audit.find(q.treatment_vars.front());
        if (!treat) return {false, "treatment variable '" + q.treatment_vars.front() + "' is absent"};
        if (treat->dtype != ValueKind::Binary)
            return {false, "DiD treatment '" + treat->name + "' is not binary"};
        if (q.treatment_vars.size() < 2) return {false, "DiD needs a post-period variable"};
        const auto* post = audit.find(q.treatment_vars[1]);
        if (!post) return {false, "post variable '" + q.treatment_vars[1] + "' is absent"};
        if (post->dtype != ValueKind::Binary) return {false, "DiD post variable '" + post->name + "' is not binary"};
        return {true, "binary treatment and post indicators"};
    }
    case Design::Unsupported:
        return {true, "no structural requirement checked"};
    }
    return {false, "unknown design"};
}

}  // namespace

FeasibilityReport screen(const ResearchQuestion& question, const DatasetAudit& audit, const DataProfile& profile) {
    FeasibilityReport r;
    r.question_id = question.question_id;
    const auto names = question.named_variables();
    for (const auto& name : names)
        if (!audit.find(name)) r.missing_vars.push_back(name);
    r.vars_exist = r.missing_vars.empty();

    if (question.treatment_vars.empty()) {
        r.design_compatible = false;
        r.design_reason = "no treatment variable named";
    } else {
        std::tie(r.design_compatible, r.design_reason) = check_design(question, audit);
    }

    r.method_supported = question.design != Design::Unsupported;
    r.method_reason = r.method_supported ? std::string(to_string(question.design)) + " is supported"
                                         : "design '" + question.design_label + "' is not a supported estimator";
    r.feasible = r.vars_exist && r.design_compatible && r.method_supported;

    double score = 1.0;
    for (const auto& name : names) {
        const auto* p = audit.find(name) ? profile.find(name) : nullptr;
        score *= p ? 1.0 - p->missing_rate : 0.0;
    }
    r.tractability_score = std::clamp(score, 0.0, 1.0);
    return r;
}

bool natural_less(const std::string& a, const std::string& b) {
    auto split = [](const std::string& s) {
        std::size_t i = s.size();
        while (i > 0 && s[i - 1] >= '0' && s[i - 1] <= '9') --i;
        unsigned long long n = 0;
        const bool has = i < s.size() && std::from_chars(s.data() + i, s.data() + s.size(), n).ec == std::errc{};
        return std::tuple<std::string, bool, unsigned long long>(s.substr(0, i), has, n);
    };
    const auto [pa, ha, na] = split(a);
    const auto [pb, hb, nb] = split(b);
    if (pa != pb || !ha || !hb) return a < b;
    if (na != nb) return na < nb;
    return a < b;
}

std::vector<ScreenedCandidate> rank(std::vector<ScreenedCandidate> candidates) {
    std::stable_partition(candidates.begin(), candidates.end(),
                          [](const ScreenedCandidate& c) { return c.report.feasible; });
    const auto first_infeasible = std::find_if(candidates.begin(), candidates.end(),
                                               [](const ScreenedCandidate& c) { return !c.report.feasible; });
    std::stable_sort(candidates.begin(), first_infeasible, [](const ScreenedCandidate& a, const ScreenedCandidate& b) {
        if (a.report.tractability_score != b.report.tractability_score)
            return a.report.tractability_score > b.report.tractability_score;
        return natural_less(a.question.question_id, b.question.question_id);
    });
    return candidates;
}

FeasibilityStats feasibility_stats(const std::vector<QuestionRound>& rounds) {
    FeasibilityStats s;
    for (const auto& round : rounds) {
        for (const auto& c : round.candidates) {
            ++s.n_questions;
            if (c.report.feasible) {
                ++s.n_feasible;
                continue;
            }
            switch (*c.report.first_failure()) {
            case FailureCause::MissingVariables: ++s.missing_variables; break;
            case FailureCause::IncompatibleDesign: ++s.incompatible_design; break;
            case FailureCause::UnsupportedMethod: ++s.unsupported_method; break;
            }
        }
    }
    s.share = s.n_questions ? static_cast<double>(s.n_feasible) / static_cast<double>(s.n_questions) : 0.0;
    s.percent = std::lround(100.0 * s.share);
    return s;
}

}  // namespace econloop::questions
