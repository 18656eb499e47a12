#include "econloop/core/json.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace econloop {

namespace {

// NaN and infinities are not representable in JSON; they are written as null
// and read back as NaN.
json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_real(const json& j, const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
    else j[key] = nullptr;
}

template <typename T>
void get_opt(const json& j, const char* key, std::optional<T>& out) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) out.reset();
    else out = it->get<T>();
}

void put_opt_real(json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = real(*v);
    else j[key] = nullptr;
}

template <typename T>
T enum_at(const json& j, const char* key, T (*parse)(std::string_view)) {
    return parse(j.at(key).get<std::string>());
}

template <typename T>
std::vector<T> list_at(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    return it->get<std::vector<T>>();
}

}  // namespace

// dataset

void to_json(json& j, const VariableInfo& v) {
    j = {{"name", v.name}, {"dtype", to_string(v.dtype)}, {"n_nonmissing", v.n_nonmissing}};
    put_opt(j, "label", v.label);
}
void from_json(const json& j, VariableInfo& v) {
    v.name = j.at("name").get<std::string>();
    v.dtype = enum_at(j, "dtype", value_kind_from_string);
    v.n_nonmissing = j.at("n_nonmissing").get<std::size_t>();
    get_opt(j, "label", v.label);
}

void to_json(json& j, const PanelStructure& v) {
    j = {{"entity_var", v.entity_var}, {"time_var", v.time_var}, {"n_entities", v.n_entities}, {"waves", v.waves}};
}
void from_json(const json& j, PanelStructure& v) {
    v.entity_var = j.at("entity_var").get<std::string>();
    v.time_var = j.at("time_var").get<std::string>();
    v.n_entities = j.at("n_entities").get<std::size_t>();
    v.waves = j.at("waves").get<std::vector<double>>();
}

void to_json(json& j, const DatasetAudit& v) {
    j = {{"dataset_id", v.dataset_id}, {"source_path", v.source_path}, {"n_rows", v.n_rows},
         {"n_cols", v.n_cols},         {"variables", v.variables}};
    put_opt(j, "panel_structure", v.panel_structure);
}
void from_json(const json& j, DatasetAudit& v) {
    v.dataset_id = j.at("dataset_id").get<std::string>();
    v.source_path = j.at("source_path").get<std::string>();
    v.n_rows = j.at("n_rows").get<std::size_t>();
    v.n_cols = j.at("n_cols").get<std::size_t>();
    v.variables = list_at<VariableInfo>(j, "variables");
    get_opt(j, "panel_structure", v.panel_structure);
}

// profile

void to_json(json& j, const VariableProfile& v) {
    j = {{"name", v.name},
         {"kind", to_string(v.kind)},
         {"missing_rate", real(v.missing_rate)},
         {"n_distinct", v.n_distinct},
         {"top_categories", json::array()}};
    put_opt_real(j, "mean", v.mean);
    put_opt_real(j, "sd", v.sd);
    put_opt_real(j, "min", v.min);
    put_opt_real(j, "max", v.max);
    put_opt_real(j, "median", v.median);
    put_opt_real(j, "skewness", v.skewness);
    for (const auto& [value, freq] : v.top_categories) j["top_categories"].push_back({{"value", value}, {"frequency", freq}});
}
void from_json(const json& j, VariableProfile& v) {
    v.name = j.at("name").get<std::string>();
    v.kind = enum_at(j, "kind", value_kind_from_string);
    v.missing_rate = get_real(j, "missing_rate");
    v.n_distinct = j.at("n_distinct").get<std::size_t>();
    get_opt(j, "mean", v.mean);
    get_opt(j, "sd", v.sd);
    get_opt(j, "min", v.min);
    get_opt(j, "max", v.max);
    get_opt(j, "median", v.median);
    get_opt(j, "skewness", v.skewness);
    v.top_categories.clear();
    for (const auto& c : j.at("top_categories"))
        v.top_categories.emplace_back(c.at("value").get<std::string>(), c.at("frequency").get<std::size_t>());
}

void to_json(json& j, const Correlation& v) {
    j = {{"var_a", v.var_a}, {"var_b", v.var_b}, {"pearson_r", real(v.pearson_r)}, {"n_pairs", v.n_pairs}};
}
void from_json(const json& j, Correlation& v) {
    v.var_a = j.at("var_a").get<std::string>();
    v.var_b = j.at("var_b").get<std::string>();
    v.pearson_r = get_real(j, "pearson_r");
    v.n_pairs = j.at("n_pairs").get<std::size_t>();
}

void to_json(json& j, const EndogeneityFlag& v) {
    j = {{"var_a", v.var_a}, {"var_b", v.var_b}, {"reason", v.reason}};
}
void from_json(const json& j, EndogeneityFlag& v) {
    v.var_a = j.at("var_a").get<std::string>();
    v.var_b = j.at("var_b").get<std::string>();
    v.reason = j.at("reason").get<std::string>();
}

void to_json(json& j, const TransformSuggestion& v) {
    j = {{"var", v.var}, {"suggestion", to_string(v.suggestion)}, {"reason", v.reason}};
}
void from_json(const json& j, TransformSuggestion& v) {
    v.var = j.at("var").get<std::string>();
    v.suggestion = enum_at(j, "suggestion", transform_kind_from_string);
    v.reason = j.at("reason").get<std::string>();
}

void to_json(json& j, const MissingnessNote& v) {
    j = {{"var", v.var}, {"missing_rate", real(v.missing_rate)}, {"note", v.note}};
}
void from_json(const json& j, MissingnessNote& v) {
    v.var = j.at("var").get<std::string>();
    v.missing_rate = get_real(j, "missing_rate");
    v.note = j.at("note").get<std::string>();
}

void to_json(json& j, const DataProfile& v) {
    j = {{"dataset_id", v.dataset_id},
         {"n_rows", v.n_rows},
         {"variable_profiles", v.variable_profiles},
         {"correlations", v.correlations},
         {"endogeneity_flags", v.endogeneity_flags},
         {"transform_suggestions", v.transform_suggestions},
         {"high_missingness", v.high_missingness}};
}
void from_json(const json& j, DataProfile& v) {
    v.dataset_id = j.at("dataset_id").get<std::string>();
    v.n_rows = j.at("n_rows").get<std::size_t>();
    v.variable_profiles = list_at<VariableProfile>(j, "variable_profiles");
    v.correlations = list_at<Correlation>(j, "correlations");
    v.endogeneity_flags = list_at<EndogeneityFlag>(j, "endogeneity_flags");
    v.transform_suggestions = list_at<TransformSuggestion>(j, "transform_suggestions");
    v.high_missingness = list_at<MissingnessNote>(j, "high_missingness");
}

// questions

void to_json(json& j, const ResearchQuestion& v) {
    j = {{"question_id", v.question_id},       {"text", v.text},
         {"outcome_var", v.outcome_var},       {"treatment_vars", v.treatment_vars},
         {"control_vars", v.control_vars},     {"design", to_string(v.design)},
         {"design_label", v.design_label},     {"domain_tag", v.domain_tag},
         {"rationale", v.rationale}};
}
void from_json(const json& j, ResearchQuestion& v) {
    v.question_id = j.at("question_id").get<std::string>();
    v.text = j.at("text").get<std::string>();
    v.outcome_var = j.at("outcome_var").get<std::string>();
    v.treatment_vars = list_at<std::string>(j, "treatment_vars");
    v.control_vars = list_at<std::string>(j, "control_vars");
    v.design_label = j.value("design_label", std::string());
    const auto design = j.at("design").get<std::string>();
    v.design = design == "Unsupported" ? Design::Unsupported : design_from_string(design);
    v.domain_tag = j.value("domain_tag", std::string());
    v.rationale = j.value("rationale", std::string());
}

void to_json(json& j, const FeasibilityReport& v) {
    j = {{"question_id", v.question_id},
         {"vars_exist", v.vars_exist},
         {"missing_vars", v.missing_vars},
         {"design_compatible", v.design_compatible},
         {"design_reason", v.design_reason},
         {"method_supported", v.method_supported},
         {"method_reason", v.method_reason},
         {"feasible", v.feasible},
         {"tractability_score", real(v.tractability_score)}};
    if (auto cause = v.first_failure()) j["first_failure"] = to_string(*cause);
    else j["first_failure"] = nullptr;
}
void from_json(const json& j, FeasibilityReport& v) {
    v.question_id = j.at("question_id").get<std::string>();
    v.vars_exist = j.at("vars_exist").get<bool>();
    v.missing_vars = list_at<std::string>(j, "missing_vars");
    v.design_compatible = j.at("design_compatible").get<bool>();
    v.design_reason = j.at("design_reason").get<std::string>();
    v.method_supported = j.at("method_supported").get<bool>();
    v.method_reason = j.at("method_reason").get<std::string>();
    v.feasible = j.at("feasible").get<bool>();
    v.tractability_score = get_real(j, "tractability_score");
}

void to_json(json& j, const ScreenedCandidate& v) { j = {{"question", v.question}, {"report", v.report}}; }
void from_json(const json& j, ScreenedCandidate& v) {
    v.question = j.at("question").get<ResearchQuestion>();
    v.report = j.at("report").get<FeasibilityReport>();
}

void to_json(json& j, const QuestionRound& v) {
    j = {{"round", v.round}, {"mode", to_string(v.mode)}, {"candidates", v.candidates}};
    put_opt(j, "constraints", v.constraints);
}
void from_json(const json& j, QuestionRound& v) {
    v.round = j.at("round").get<int>();
    v.mode = enum_at(j, "mode", generation_mode_from_string);
    get_opt(j, "constraints", v.constraints);
    v.candidates = list_at<ScreenedCandidate>(j, "candidates");
}

// analysis

void to_json(json& j, const Specification& v) {
    j = {{"label", v.label},           {"design", to_string(v.design)}, {"outcome", v.outcome},
         {"regressors", v.regressors}, {"entity_fe", v.entity_fe},      {"time_fe", v.time_fe},
         {"se_type", to_string(v.se_type)}};
    put_opt(j, "entity_var", v.entity_var);
    put_opt(j, "time_var", v.time_var);
    put_opt(j, "cluster_var", v.cluster_var);
    if (v.did_fields) j["did_fields"] = {{"treat_var", v.did_fields->treat_var}, {"post_var", v.did_fields->post_var}};
    else j["did_fields"] = nullptr;
    if (v.event_fields)
        j["event_fields"] = {{"event_time_var", v.event_fields->event_time_var},
                             {"leads", v.event_fields->leads},
                             {"lags", v.event_fields->lags},
                             {"omitted_period", v.event_fields->omitted_period}};
    else j["event_fields"] = nullptr;
}
void from_json(const json& j, Specification& v) {
    v.label = j.value("label", std::string());
    v.design = design_from_string(j.at("design").get<std::string>());
    v.outcome = j.at("outcome").get<std::string>();
    v.regressors = list_at<std::string>(j, "regressors");
    v.entity_fe = j.value("entity_fe", false);
    v.time_fe = j.value("time_fe", false);
    v.se_type = se_type_from_string(j.value("se_type", std::string("HC1")));
    get_opt(j, "entity_var", v.entity_var);
    get_opt(j, "time_var", v.time_var);
    get_opt(j, "cluster_var", v.cluster_var);
    v.did_fields.reset();
    if (auto it = j.find("did_fields"); it != j.end() && !it->is_null())
        v.did_fields = DidFields{it->at("treat_var").get<std::string>(), it->at("post_var").get<std::string>()};
    v.event_fields.reset();
    if (auto it = j.find("event_fields"); it != j.end() && !it->is_null())
        v.event_fields = EventFields{it->at("event_time_var").get<std::string>(), it->value("leads", 2),
                                     it->value("lags", 2), it->value("omitted_period", -1)};
}

void to_json(json& j, const AnalysisPlan& v) {
    j = {{"specifications", v.specifications}, {"primary_index", v.primary_index}, {"notes", v.notes}};
}
void from_json(const json& j, AnalysisPlan& v) {
    v.specifications = list_at<Specification>(j, "specifications");
    v.primary_index = j.at("primary_index").get<std::size_t>();
    v.notes = list_at<std::string>(j, "notes");
}

void to_json(json& j, const Coefficient& v) {
    j = {{"name", v.name},        {"estimate", real(v.estimate)}, {"std_error", real(v.std_error)},
         {"t_stat", real(v.t_stat)}, {"p_value", real(v.p_value)}, {"ci_low", real(v.ci_low)},
         {"ci_high", real(v.ci_high)}};
    put_opt(j, "event_time", v.event_time);
}
void from_json(const json& j, Coefficient& v) {
    v.name = j.at("name").get<std::string>();
    v.estimate = get_real(j, "estimate");
    v.std_error = get_real(j, "std_error");
    v.t_stat = get_real(j, "t_stat");
    v.p_value = get_real(j, "p_value");
    v.ci_low = get_real(j, "ci_low");
    v.ci_high = get_real(j, "ci_high");
    get_opt(j, "event_time", v.event_time);
}

void to_json(json& j, const AnalysisResult& v) {
    j = {{"result_id", v.result_id},
         {"spec", v.spec},
         {"coefficients", v.coefficients},
         {"n_obs", v.n_obs},
         {"df_resid", v.df_resid},
         {"r_squared", real(v.r_squared)},
         {"within_r_squared", v.within_r_squared},
         {"perfect_fit", v.perfect_fit},
         {"notes", v.notes}};
    put_opt(j, "n_entities", v.n_entities);
    put_opt(j, "n_clusters", v.n_clusters);
}
void from_json(const json& j, AnalysisResult& v) {
    v.result_id = j.at("result_id").get<std::string>();
    v.spec = j.at("spec").get<Specification>();
    v.coefficients = list_at<Coefficient>(j, "coefficients");
    v.n_obs = j.at("n_obs").get<std::size_t>();
    v.df_resid = j.at("df_resid").get<std::size_t>();
    v.r_squared = get_real(j, "r_squared");
    v.within_r_squared = j.at("within_r_squared").get<bool>();
    v.perfect_fit = j.at("perfect_fit").get<bool>();
    v.notes = list_at<std::string>(j, "notes");
    get_opt(j, "n_entities", v.n_entities);
    get_opt(j, "n_clusters", v.n_clusters);
}

// manuscript / review

void to_json(json& j, const Draft& v) {
    json sections = json::array();
    for (const auto& s : v.sections) sections.push_back({{"heading", s.heading}, {"present", s.present}});
    j = {{"version", v.version},       {"body", v.body},         {"word_count", v.word_count},
         {"sections", sections},       {"based_on", v.based_on}, {"warnings", v.warnings},
         {"redrafted_after_critique", v.redrafted_after_critique}};
}
void from_json(const json& j, Draft& v) {
    v.version = j.at("version").get<int>();
    v.body = j.at("body").get<std::string>();
    v.word_count = j.at("word_count").get<std::size_t>();
    v.sections.clear();
    for (const auto& s : j.at("sections"))
        v.sections.push_back({s.at("heading").get<std::string>(), s.at("present").get<bool>()});
    v.based_on = list_at<std::string>(j, "based_on");
    v.warnings = list_at<std::string>(j, "warnings");
    v.redrafted_after_critique = j.value("redrafted_after_critique", false);
}

void to_json(json& j, const RevisionRequest& v) { j = {{"kind", to_string(v.kind)}, {"text", v.text}}; }
void from_json(const json& j, RevisionRequest& v) {
    v.kind = request_kind_from_string(j.at("kind").get<std::string>());
    v.text = j.at("text").get<std::string>();
}

void to_json(json& j, const ReviewReport& v) {
    json scores = json::object();
    for (Dimension d : kDimensions) scores[std::string(dimension_key(d))] = real(v.score(d));
    j = {{"draft_version", v.draft_version},
         {"scores", scores},
         {"overall", real(v.overall)},
         {"revision_requests", v.revision_requests},
         {"verdict", to_string(v.verdict)},
         {"budget_exhausted", v.budget_exhausted}};
}
void from_json(const json& j, ReviewReport& v) {
    v.draft_version = j.at("draft_version").get<int>();
    const auto& scores = j.at("scores");
    for (std::size_t i = 0; i < kDimensions.size(); ++i)
        v.scores[i] = scores.at(std::string(dimension_key(kDimensions[i]))).get<double>();
    v.overall = get_real(j, "overall");
    v.revision_requests = list_at<RevisionRequest>(j, "revision_requests");
    v.verdict = j.at("verdict").get<std::string>() == "Accept" ? Verdict::Accept : Verdict::Revise;
    v.budget_exhausted = j.value("budget_exhausted", false);
}

void to_json(json& j, const CritiqueNote& v) {
    j = {{"draft_version", v.draft_version}, {"issues", v.issues}, {"severity", to_string(v.severity)}};
}
void from_json(const json& j, CritiqueNote& v) {
    v.draft_version = j.at("draft_version").get<int>();
    v.issues = list_at<std::string>(j, "issues");
    v.severity = j.at("severity").get<std::string>() == "Major" ? Severity::Major : Severity::Minor;
}

// run state

void to_json(json& j, const RunEvent& v) {
    j = {{"timestamp_ms", v.timestamp_ms}, {"actor", v.actor}, {"kind", to_string(v.kind)}, {"payload", v.payload}};
}
void from_json(const json& j, RunEvent& v) {
    v.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    v.actor = j.at("actor").get<std::string>();
    v.kind = enum_at(j, "kind", event_kind_from_string);
    v.payload = j.at("payload");
}

void to_json(json& j, const GateDecision& v) {
    j = {{"gate", to_string(v.gate)},
         {"action", to_string(v.action)},
         {"argument", v.argument},
         {"decided_by", v.decided_by},
         {"decided_at_ms", v.decided_at_ms}};
}
void from_json(const json& j, GateDecision& v) {
    v.gate = enum_at(j, "gate", gate_from_string);
    v.action = enum_at(j, "action", gate_action_from_string);
    v.argument = j.value("argument", std::string());
    v.decided_by = j.value("decided_by", std::string());
    v.decided_at_ms = j.value("decided_at_ms", std::int64_t{0});
}

void to_json(json& j, const LedgerEntry& v) {
    j = {{"agent", v.agent},
         {"input_tokens", v.input_tokens},
         {"output_tokens", v.output_tokens},
         {"input_price_micro", v.input_price},
         {"output_price_micro", v.output_price},
         {"cost_micro", v.cost}};
}
void from_json(const json& j, LedgerEntry& v) {
    v.agent = j.at("agent").get<std::string>();
    v.input_tokens = j.at("input_tokens").get<std::int64_t>();
    v.output_tokens = j.at("output_tokens").get<std::int64_t>();
    v.input_price = j.at("input_price_micro").get<std::int64_t>();
    v.output_price = j.at("output_price_micro").get<std::int64_t>();
    v.cost = j.at("cost_micro").get<std::int64_t>();
}

void to_json(json& j, const CostLedger& v) { j = {{"entries", v.entries}, {"total_micro", v.total}}; }
void from_json(const json& j, CostLedger& v) {
    v.entries = list_at<LedgerEntry>(j, "entries");
    v.total = j.at("total_micro").get<std::int64_t>();
}

void to_json(json& j, const SampleReport& v) {
    j = json{{"steps", json::array()}};
    for (const auto& s : v.steps) j["steps"].push_back({{"step", s.step}, {"rows", s.rows}});
}
void from_json(const json& j, SampleReport& v) {
    v.steps.clear();
    for (const auto& s : j.at("steps")) v.steps.push_back({s.at("step").get<std::string>(), s.at("rows").get<std::size_t>()});
}

void to_json(json& j, const RunState& v) {
    j = {{"schema_version", kSchemaVersion},
         {"run_id", v.run_id},
         {"created_at_ms", v.created_at_ms},
         {"stage", to_string(v.stage)},
         {"question_round", v.question_round},
         {"revision_iteration", v.revision_iteration},
         {"config", v.config},
         {"candidates", v.candidates},
         {"analyses", v.analyses},
         {"drafts", v.drafts},
         {"critiques", v.critiques},
         {"reviews", v.reviews},
         {"decisions", v.decisions},
         {"cost", v.cost},
         {"events", v.events}};
    put_opt(j, "audit", v.audit);
    put_opt(j, "profile", v.profile);
    put_opt(j, "selected_question", v.selected_question);
    put_opt(j, "plan", v.plan);
    put_opt(j, "sample_report", v.sample_report);
    put_opt(j, "rejection_reason", v.rejection_reason);
}
void from_json(const json& j, RunState& v) {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion)
        throw std::invalid_argument("unsupported schema_version " + std::to_string(version));
    v.run_id = j.at("run_id").get<std::string>();
    v.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
    v.stage = enum_at(j, "stage", stage_from_string);
    v.question_round = j.at("question_round").get<int>();
    v.revision_iteration = j.at("revision_iteration").get<int>();
    v.config = j.value("config", json::object());
    v.candidates = list_at<QuestionRound>(j, "candidates");
    v.analyses = list_at<AnalysisResult>(j, "analyses");
    v.drafts = list_at<Draft>(j, "drafts");
    v.critiques = list_at<CritiqueNote>(j, "critiques");
    v.reviews = list_at<ReviewReport>(j, "reviews");
    v.decisions = list_at<GateDecision>(j, "decisions");
    v.cost = j.at("cost").get<CostLedger>();
    v.events = list_at<RunEvent>(j, "events");
    get_opt(j, "audit", v.audit);
    get_opt(j, "profile", v.profile);
    get_opt(j, "selected_question", v.selected_question);
    get_opt(j, "plan", v.plan);
    get_opt(j, "sample_report", v.sample_report);
    get_opt(j, "rejection_reason", v.rejection_reason);
}

}  // namespace econloop
