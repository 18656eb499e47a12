#include "econloop/reviewer/review.hpp"

#include <cmath>
#include <sstream>

#include "econloop/core/tables.hpp"
#include "econloop/llm/structured.hpp"

namespace econloop::reviewer {

namespace {

const char* kReviewSystem =
    "You are a referee for an economics journal. Score the manuscript from 1 to 10 on novelty, identification "
    "credibility, data quality, clarity and policy relevance, and list concrete revision requests.";

const char* kCritiqueSystem =
    "You are the author re-reading your own manuscript before submission. List its weaknesses and rate their "
    "severity as Minor or Major.";

std::string results_block(const std::vector<AnalysisResult>& results) {
    std::ostringstream os;
    for (const auto& r : results) os << "Table " << r.result_id << " (" << r.spec.label << ")\n" << format_table_csv(r);
    return os.str();
}

}  // namespace

double overall_score(const std::array<double, 5>& s) { return (s[0] + s[1] + s[2] + s[3] + s[4]) / 5.0; }

ReviewReport report_from_json(const nlohmann::json& j, int draft_version) {
    ReviewReport r;
    r.draft_version = draft_version;
    for (auto d : kDimensions) {
        const double v = j.at("scores").at(std::string(dimension_key(d))).get<double>();
        if (!(v >= 1.0 && v <= 10.0))
            throw ReviewError("score for " + std::string(dimension_key(d)) + " is " + format_real(v) +
                              ", outside 1..10");
        r.scores[static_cast<std::size_t>(d)] = v;
    }
    r.overall = overall_score(r.scores);
    if (j.contains("revision_requests")) {
        for (const auto& item : j["revision_requests"]) {
            RevisionRequest req;
            req.text = item.at("text").get<std::string>();
            try {
                req.kind = request_kind_from_string(item.value("kind", std::string("Other")));
            } catch (const std::exception&) {
                req.kind = RequestKind::Other;
            }
            r.revision_requests.push_back(std::move(req));
        }
    }
    return r;
}

ReviewReport review(const Draft& draft, const std::vector<AnalysisResult>& results, llm::LlmBackend& backend,
                    const ReviewOptions& options, int prior_reviews) {
    llm::LlmRequest req;
    req.role = llm::RoleTag::Review;
    req.system_text = kReviewSystem;
    req.user_text = "Review draft v" + std::to_string(draft.version) + ".\n\nManuscript:\n" + draft.body +
                    "\n\nEstimated results:\n" + results_block(results) + "\n" +
                    llm::json_contract(llm::SchemaTag::ReviewReport) + "\n";

    ReviewReport report;
    for (int attempt = 1;; ++attempt) {
        try {
            const auto parsed = llm::parse_structured(backend.complete(req).text, llm::SchemaTag::ReviewReport);
            report = report_from_json(parsed, draft.version);
            break;
        } catch (const ReviewError& e) {
            if (attempt == 2) throw;
            req.user_text += "\nYour previous review was rejected: " + std::string(e.what()) +
                             ". Every score must lie between 1 and 10.\n";
        } catch (const llm::StructuredParseError& e) {
            if (attempt == 2) throw ReviewError(std::string("review output unusable: ") + e.what());
            req.user_text += "\nYour previous review contained no JSON object. Respond with the JSON object only.\n";
        } catch (const llm::SchemaValidationError& e) {
            if (attempt == 2) throw ReviewError(std::string("review output unusable: ") + e.what());
            req.user_text += "\nYour previous review was malformed: " + std::string(e.what()) + "\n";
        }
    }

    const bool accepted = report.overall >= options.accept_threshold;
    const bool budget = prior_reviews + 1 >= options.max_iterations;
    report.verdict = accepted || budget ? Verdict::Accept : Verdict::Revise;
    report.budget_exhausted = !accepted && budget;
    return report;
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
    case StopReason::Accepted: return "Accepted";
    case StopReason::BudgetExhausted: return "BudgetExhausted";
    case StopReason::NoImprovement: return "NoImprovement";
    }
    return "?";
}

LoopDecision should_continue(const std::vector<ReviewReport>& reports, int max_iterations, double margin) {
    if (reports.empty()) throw std::invalid_argument("should_continue needs at least one report");
    const auto& latest = reports.back();
    if (latest.verdict == Verdict::Accept && !latest.budget_exhausted) return {true, StopReason::Accepted};
    if (static_cast<int>(reports.size()) >= max_iterations) return {true, StopReason::BudgetExhausted};
    if (reports.size() >= 2 && latest.overall <= reports[reports.size() - 2].overall - margin + 1e-9)
        return {true, StopReason::NoImprovement};
    return {false, std::nullopt};
}

CritiqueOutcome self_critique(const Draft& draft, const std::vector<AnalysisResult>& results,
                              llm::LlmBackend& backend) {
    llm::LlmRequest req;
    req.role = llm::RoleTag::Critique;
    req.system_text = kCritiqueSystem;
    req.user_text = "Critique draft v" + std::to_string(draft.version) + ".\n\nManuscript:\n" + draft.body +
                    "\n\nEstimated results:\n" + results_block(results) + "\n" +
                    llm::json_contract(llm::SchemaTag::Critique) + "\n";
    const auto response = backend.complete(req);
    CritiqueOutcome out;
    try {
        const auto j = llm::parse_structured(response.text, llm::SchemaTag::Critique);
        CritiqueNote note;
        note.draft_version = draft.version;
        note.severity = j["severity"].get<std::string>() == "Major" ? Severity::Major : Severity::Minor;
        for (const auto& issue : j["issues"]) note.issues.push_back(issue.get<std::string>());
        out.note = std::move(note);
    } catch (const Error& e) {
        out.warning = "self-critique of draft v" + std::to_string(draft.version) + " skipped: " + e.what();
    }
    return out;
}

}  // namespace econloop::reviewer
