#include "econloop/econometrics/plan.hpp"

#include <algorithm>
#include <sstream>

#include "econloop/econometrics/errors.hpp"
#include "econloop/econometrics/estimators.hpp"
#include "econloop/llm/structured.hpp"

namespace econloop::econometrics {

namespace {

const char* kSystem =
    "You are an econometrics agent. Translate reviewer requests for additional analyses into concrete "
    "regression specifications using only the listed variables.";

void use_panel(Specification& s, const DatasetAudit& audit, bool time_fe) {
    if (!audit.panel_structure) return;
    s.entity_fe = true;
    s.time_fe = time_fe;
    s.entity_var = audit.panel_structure->entity_var;
    s.time_var = audit.panel_structure->time_var;
    s.cluster_var = audit.panel_structure->entity_var;
    s.se_type = SeType::ClusterRobust;
}

std::vector<std::string> strings(const nlohmann::json& item, const char* key, const std::vector<std::string>& fallback) {
    auto it = item.find(key);
    if (it == item.end() || it->is_null()) return fallback;
    if (!it->is_array()) throw PlanValidationError({std::string(key) + " must be a list of variable names"});
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) throw PlanValidationError({std::string(key) + " must be a list of variable names"});
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string describe(const Specification& s) {
    std::ostringstream os;
    os << s.label << ": " << to_string(s.design) << " of " << s.outcome << " on";
    for (const auto& r : s.regressors) os << " " << r;
    if (s.did_fields) os << " (treat " << s.did_fields->treat_var << ", post " << s.did_fields->post_var << ")";
    if (s.event_fields) os << " (event time " << s.event_fields->event_time_var << ")";
    return os.str();
}

}  // namespace

Specification baseline_specification(const ResearchQuestion& q, const DatasetAudit& audit) {
    Specification s;
    s.label = "baseline";
    s.design = q.design;
    s.outcome = q.outcome_var;
    switch (q.design) {
    case Design::OLS:
        s.regressors = q.treatment_vars;
        s.regressors.insert(s.regressors.end(), q.control_vars.begin(), q.control_vars.end());
        s.se_type = SeType::HC1;
        break;
    case Design::FixedEffects:
        s.regressors = q.treatment_vars;
        s.regressors.insert(s.regressors.end(), q.control_vars.begin(), q.control_vars.end());
        use_panel(s, audit, true);
        break;
    case Design::DiD:
        if (q.treatment_vars.size() >= 2) s.did_fields = DidFields{q.treatment_vars[0], q.treatment_vars[1]};
        s.regressors.assign(q.treatment_vars.begin() + std::min<std::size_t>(2, q.treatment_vars.size()),
                            q.treatment_vars.end());
        s.regressors.insert(s.regressors.end(), q.control_vars.begin(), q.control_vars.end());
        if (audit.panel_structure) {
            s.entity_var = audit.panel_structure->entity_var;
            s.cluster_var = audit.panel_structure->entity_var;
            s.se_type = SeType::ClusterRobust;
        } else {
            s.se_type = SeType::HC1;
        }
        break;
    case Design::EventStudy:
        if (!q.treatment_vars.empty()) s.event_fields = EventFields{q.treatment_vars[0], 2, 2, -1};
        s.regressors.assign(q.treatment_vars.begin() + std::min<std::size_t>(1, q.treatment_vars.size()),
                            q.treatment_vars.end());
        s.regressors.insert(s.regressors.end(), q.control_vars.begin(), q.control_vars.end());
        use_panel(s, audit, true);
        break;
    case Design::Unsupported:
        break;
    }
    return s;
}

void validate_specification(const Specification& spec, const DatasetAudit& audit) {
    std::vector<std::string> problems;
    try {
        check_specification(spec);
    } catch (const EstimationError& e) {
        problems.push_back(e.what());
    }
    std::vector<std::string> names = spec.variables();
    if (spec.entity_var) names.push_back(*spec.entity_var);
    if (spec.time_var) names.push_back(*spec.time_var);
    for (const auto& n : names) {
        if (!audit.find(n) &&
            std::find(problems.begin(), problems.end(), "unknown variable '" + n + "'") == problems.end())
            problems.push_back("unknown variable '" + n + "'");
    }
    if ((spec.entity_fe || spec.time_fe) && !audit.panel_structure)
        problems.push_back("fixed effects requested on a dataset without panel structure");
    if (!problems.empty()) throw PlanValidationError(std::move(problems));
}

Specification specification_from_json(const nlohmann::json& item, const Specification& baseline) {
    Specification s;
    const auto label = item.value("design", std::string());
    s.design = design_from_string(label);
    if (s.design == Design::Unsupported) throw PlanValidationError({"unsupported design '" + label + "'"});
    s.label = item.value("label", std::string());
    s.outcome = item.value("outcome", baseline.outcome);
    const bool panel = baseline.entity_var.has_value();
    auto panel_defaults = [&](bool fe) {
        if (!panel) return;
        s.entity_var = baseline.entity_var;
        s.cluster_var = baseline.entity_var;
        s.se_type = SeType::ClusterRobust;
        if (fe) {
            s.entity_fe = s.time_fe = true;
            s.time_var = baseline.time_var;
        }
    };
    switch (s.design) {
    case Design::OLS:
        s.regressors = strings(item, "regressors", baseline.regressors);
        s.se_type = SeType::HC1;
        break;
    case Design::FixedEffects:
        s.regressors = strings(item, "regressors", baseline.regressors);
        panel_defaults(true);
        break;
    case Design::DiD: {
        s.regressors = strings(item, "regressors", {});
        const auto treat = item.value("treat_var", std::string());
        const auto post = item.value("post_var", std::string());
        if (treat.empty() || post.empty()) throw PlanValidationError({"DiD specification needs treat_var and post_var"});
        s.did_fields = DidFields{treat, post};
        s.se_type = SeType::HC1;
        panel_defaults(false);
        break;
    }
    case Design::EventStudy: {
        s.regressors = strings(item, "regressors", {});
        const auto ev = item.value("event_time_var", std::string());
        if (ev.empty()) throw PlanValidationError({"event-study specification needs event_time_var"});
        s.event_fields = EventFields{ev, item.value("leads", 2), item.value("lags", 2), item.value("omitted_period", -1)};
        panel_defaults(true);
        break;
    }
    case Design::Unsupported:
        break;
    }
    return s;
}

AnalysisPlan plan(const ResearchQuestion& question, const DatasetAudit& audit,
                  const std::vector<RevisionRequest>& revision_requests, llm::LlmBackend* backend,
                  const AnalysisPlan* prior) {
    AnalysisPlan out;
    if (prior) {
        out = *prior;
    } else {
        auto base = baseline_specification(question, audit);
        validate_specification(base, audit);
        out.specifications.push_back(std::move(base));
        out.primary_index = 0;
        out.notes.push_back("baseline follows the question's " + std::string(to_string(question.design)) + " design");
    }

    std::vector<const RevisionRequest*> robustness;
    for (const auto& r : revision_requests)
        if (r.kind == RequestKind::RobustnessCheck) robustness.push_back(&r);
    if (robustness.empty()) return out;
    if (!backend) {
        for (const auto* r : robustness) out.notes.push_back("robustness request not planned (no planner): " + r->text);
        return out;
    }

    std::ostringstream user;
    user << "Research question: " << question.text << "\nDesign: " << question.design_label
         << "\nCurrent specifications:\n";
    for (const auto& s : out.specifications) user << "- " << describe(s) << "\n";
    user << "Reviewer requests:\n";
    for (const auto* r : robustness) user << "- " << r->text << "\n";
    user << "Available variables:";
    for (const auto& v : audit.variables) user << " " << v.name;
    user << "\n" << llm::json_contract(llm::SchemaTag::RevisionPlan) << "\n";

    llm::LlmRequest req;
    req.role = llm::RoleTag::RevisionPlan;
    req.system_text = kSystem;
    req.user_text = user.str();
    const auto response = backend->complete(req);

    nlohmann::json parsed;
    try {
        parsed = llm::parse_structured(response.text, llm::SchemaTag::RevisionPlan);
    } catch (const Error& e) {
        throw PlanValidationError({std::string("revision plan output unusable: ") + e.what()});
    }
    const auto& baseline = out.specifications[out.primary_index];
    std::vector<std::string> problems;
    for (const auto& item : parsed["specifications"]) {
        try {
            auto s = specification_from_json(item, baseline);
            if (s.label.empty()) s.label = "robustness_" + std::to_string(out.specifications.size());
            validate_specification(s, audit);
            bool duplicate = false;
            for (const auto& existing : out.specifications) {
                auto a = existing, b = s;
                a.label = b.label = "";
                duplicate |= a == b;
            }
            if (duplicate) continue;
            out.notes.push_back("added " + describe(s));
            out.specifications.push_back(std::move(s));
        } catch (const PlanValidationError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (!problems.empty()) throw PlanValidationError(std::move(problems));
    return out;
}

}  // namespace econloop::econometrics
