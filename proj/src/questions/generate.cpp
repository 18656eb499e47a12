#include "econloop/questions/generate.hpp"

#include <cstdio>
#include <sstream>

#include "econloop/llm/structured.hpp"

namespace econloop::questions {

namespace {

const char* kSystem =
    "You are a research-question agent for empirical economics. Propose concrete, answerable hypotheses "
    "with an outcome variable, treatment variables, controls and an estimation design.";

std::string rate(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * r);
    return buf;
}

std::string format_wave(double w) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", w);
    return buf;
}

std::optional<std::vector<std::string>> string_list(const nlohmann::json& item, const char* key, bool required) {
    auto it = item.find(key);
    if (it == item.end() || it->is_null()) {
        if (required) return std::nullopt;
        return std::vector<std::string>{};
    }
    if (!it->is_array()) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string() || v.get<std::string>().empty()) return std::nullopt;
        out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace

llm::LlmRequest build_question_prompt(const GenerationRequest& request) {
    std::ostringstream user;
    user << "Propose " << request.n << " candidate research questions in the domain of " << request.domain
         << " using the dataset '" << request.dataset_name << "'.\n";

    if (request.mode == GenerationMode::DatasetAware) {
        if (!request.audit || !request.profile)
            throw std::invalid_argument("dataset-aware generation needs an audit and a profile");
        const auto& audit = *request.audit;
        user << "\nVariables available (" << audit.n_cols << " columns, " << audit.n_rows << " rows). "
             << "Use only these names:\n";
        for (const auto& v : audit.variables) {
            user << "- " << v.name << " [" << to_string(v.dtype) << "]";
            if (v.label) user << ": " << *v.label;
            if (const auto* p = request.profile->find(v.name)) user << " (missing " << rate(p->missing_rate) << ")";
            user << "\n";
        }
        if (audit.panel_structure) {
            const auto& ps = *audit.panel_structure;
            user << "\nPanel structure: entity " << ps.entity_var << " (" << ps.n_entities << " entities), time "
                 << ps.time_var << ", waves";
            for (double w : ps.waves) user << " " << format_wave(w);
            user << ".\n";
        } else {
            user << "\nCross-sectional data: no panel structure.\n";
        }
        if (!request.profile->high_missingness.empty()) {
            user << "\nMissingness highlights:\n";
            for (const auto& m : request.profile->high_missingness) user << "- " << m.var << ": " << m.note << "\n";
        }
        if (!request.profile->endogeneity_flags.empty()) {
            user << "\nEndogeneity risks:\n";
            for (const auto& f : request.profile->endogeneity_flags)
                user << "- " << f.var_a << " / " << f.var_b << ": " << f.reason << "\n";
        }
        user << "\nSupported designs: OLS, FixedEffects, DiD (treatment_vars = [treat indicator, post indicator]), "
                "EventStudy (treatment_vars = [event-time variable]).\n";
    }
    if (request.constraints && !request.constraints->empty())
        user << "\nAdditional constraints from the principal investigator: " << *request.constraints << "\n";
    user << "\n" << llm::json_contract(llm::SchemaTag::QuestionList) << "\n";

    llm::LlmRequest out;
    out.role = llm::RoleTag::QuestionGen;
    out.system_text = kSystem;
    out.user_text = user.str();
    out.temperature = 0.7;
    return out;
}

std::optional<ResearchQuestion> parse_question(const nlohmann::json& item, std::string& why) {
    if (!item.is_object()) {
        why = "item is not an object";
        return std::nullopt;
    }
    auto text_field = [&](const char* key, bool required) -> std::optional<std::string> {
        auto it = item.find(key);
        if (it == item.end() || it->is_null()) return required ? std::nullopt : std::optional<std::string>("");
        if (!it->is_string()) return std::nullopt;
        auto s = it->get<std::string>();
        if (required && s.empty()) return std::nullopt;
        return s;
    };
    ResearchQuestion q;
    auto text = text_field("text", true);
    auto outcome = text_field("outcome_var", true);
    auto design = text_field("design", true);
    auto domain = text_field("domain_tag", false);
    auto rationale = text_field("rationale", false);
    auto treatments = string_list(item, "treatment_vars", true);
    auto controls = string_list(item, "control_vars", false);
    if (!text) why = "text";
    else if (!outcome) why = "outcome_var";
    else if (!design) why = "design";
    else if (!treatments || treatments->empty()) why = "treatment_vars";
    else if (!controls) why = "control_vars";
    else if (!domain) why = "domain_tag";
    else if (!rationale) why = "rationale";
    if (!why.empty()) {
        why = "missing or ill-typed field '" + why + "'";
        return std::nullopt;
    }
    q.text = *text;
    q.outcome_var = *outcome;
    q.treatment_vars = std::move(*treatments);
    q.control_vars = std::move(*controls);
    q.design_label = *design;
    q.design = design_from_string(*design);
    q.domain_tag = *domain;
    q.rationale = *rationale;
    return q;
}

GenerationOutcome generate_questions(const GenerationRequest& request, llm::LlmBackend& backend) {
    if (request.n < 1) throw std::invalid_argument("n must be positive");
    const auto response = backend.complete(build_question_prompt(request));

    nlohmann::json parsed;
    try {
        parsed = llm::parse_structured(response.text, llm::SchemaTag::QuestionList);
    } catch (const Error& e) {
        throw GenerationError(std::string("question generation returned no usable output: ") + e.what());
    }

    GenerationOutcome out;
    int next = request.first_id;
    std::size_t index = 0;
    for (const auto& item : parsed["questions"]) {
        ++index;
        if (out.questions.size() >= static_cast<std::size_t>(request.n)) break;
        std::string why;
        auto q = parse_question(item, why);
        if (!q) {
            out.warnings.push_back("dropped question item " + std::to_string(index) + ": " + why);
            continue;
        }
        q->question_id = "q" + std::to_string(next++);
        out.questions.push_back(std::move(*q));
    }
    if (out.questions.empty()) throw GenerationError("question generation produced no parseable questions");
    return out;
}

}  // namespace econloop::questions
