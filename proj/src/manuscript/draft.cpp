#include "econloop/manuscript/draft.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "econloop/core/tables.hpp"

namespace econloop::manuscript {

namespace {

const char* kSystem =
    "You are a paper-writing agent for empirical economics. Write a complete research manuscript in markdown "
    "with the sections Abstract, Introduction, Methodology, Results and Discussion. Quote only numbers that "
    "appear in the supplied tables.";

struct Required {
    const char* label;
    std::vector<const char*> keys;
};

const std::vector<Required>& required_sections() {
    static const std::vector<Required> r{{"Abstract", {"abstract"}},
                                         {"Introduction", {"introduction"}},
                                         {"Methodology", {"methodology", "empirical strategy"}},
                                         {"Results", {"results"}},
                                         {"Discussion", {"discussion"}}};
    return r;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        f(text.substr(pos, end - pos));
        if (end == text.size()) break;
        pos = end + 1;
    }
}

std::string_view trim_left(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

bool is_fence(std::string_view line) { return trim_left(line).substr(0, 3) == "```"; }
bool is_heading(std::string_view line) { return !line.empty() && line.front() == '#'; }

std::string unwrap(std::string text) {
    // A whole response wrapped in one markdown fence.
    auto start = text.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) return {};
    auto end = text.find_last_not_of(" \t\r\n");
    std::string_view core(text.data() + start, end - start + 1);
    if (core.substr(0, 3) == "```" && core.size() >= 6 && core.substr(core.size() - 3) == "```") {
        auto first_nl = core.find('\n');
        if (first_nl != std::string_view::npos && core.find("```", first_nl) == core.size() - 3)
            return std::string(core.substr(first_nl + 1, core.size() - 3 - first_nl - 1));
    }
    return text;
}

std::string tables_block(const std::vector<AnalysisResult>& results) {
    std::ostringstream os;
    for (const auto& r : results) {
        os << "Table " << r.result_id << " (" << to_string(r.spec.design) << ", " << r.spec.label << ", outcome "
           << r.spec.outcome << ", N = " << r.n_obs << ")\n"
           << format_table_csv(r);
        for (const auto& n : r.notes) os << "note: " << n << "\n";
        os << "\n";
    }
    return os.str();
}

std::string missing_list(const std::vector<Section>& sections) {
    std::string out;
    for (const auto& s : sections)
        if (!s.present) out += (out.empty() ? "" : ", ") + s.heading;
    return out;
}

Draft finish(const DraftContext& ctx, llm::LlmBackend& backend, llm::LlmRequest request, int version) {
    auto text = unwrap(backend.complete(request).text);
    if (word_count(text) == 0) throw DraftingError("draft v" + std::to_string(version) + " came back empty");
    auto sections = check_sections(text);
    if (!all_present(sections)) {
        request.user_text += "\n\nYour previous manuscript lacked these required sections: " + missing_list(sections) +
                             ". Return the complete manuscript with every required section heading.\n";
        text = unwrap(backend.complete(request).text);
        if (word_count(text) == 0) throw DraftingError("draft v" + std::to_string(version) + " came back empty");
        sections = check_sections(text);
        if (!all_present(sections))
            throw DraftingError("draft v" + std::to_string(version) + " still lacks required sections after re-prompt: " +
                                missing_list(sections));
    }
    Draft d;
    d.version = version;
    d.body = std::move(text);
    d.word_count = word_count(d.body);
    d.sections = std::move(sections);
    if (ctx.results)
        for (const auto& r : *ctx.results) d.based_on.push_back(r.result_id);
    if (ctx.results)
        for (const auto& n : unsupported_numerals(d.body, *ctx.results)) d.warnings.push_back("unsupported numeral " + n);
    return d;
}

}  // namespace

std::string strip_fenced_blocks(std::string_view body) {
    std::string out;
    bool inside = false;
    for_each_line(body, [&](std::string_view line) {
        if (is_fence(line)) {
            inside = !inside;
            return;
        }
        if (!inside) {
            out.append(line);
            out.push_back('\n');
        }
    });
    return out;
}

std::size_t word_count(std::string_view body) {
    const auto text = strip_fenced_blocks(body);
    std::size_t n = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c));
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

std::vector<Section> check_sections(std::string_view body) {
    const auto text = strip_fenced_blocks(body);
    std::vector<std::string> headings;
    for_each_line(text, [&](std::string_view line) {
        if (is_heading(line)) headings.push_back(lower(line));
    });
    std::vector<Section> out;
    for (const auto& req : required_sections()) {
        bool found = false;
        for (const auto& h : headings)
            for (const auto* key : req.keys) found |= h.find(key) != std::string::npos;
        out.push_back({req.label, found});
    }
    return out;
}

bool all_present(const std::vector<Section>& sections) {
    return std::all_of(sections.begin(), sections.end(), [](const Section& s) { return s.present; });
}

std::vector<std::string> unsupported_numerals(std::string_view body, const std::vector<AnalysisResult>& results) {
    std::vector<double> values;
    for (const auto& r : results) {
        values.push_back(r.r_squared);
        for (const auto& c : r.coefficients)
            for (double v : {c.estimate, c.std_error, c.t_stat, c.p_value, c.ci_low, c.ci_high})
                if (std::isfinite(v)) values.push_back(std::abs(v));
    }
    std::vector<std::string> out;
    std::set<std::string> seen;
    const auto text = strip_fenced_blocks(body);
    for_each_line(text, [&](std::string_view line) {
        if (is_heading(line)) return;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(line[i]))) continue;
            if (i > 0 && (std::isalnum(static_cast<unsigned char>(line[i - 1])) || line[i - 1] == '.' ||
                          line[i - 1] == '_')) {
                while (i < line.size() && (std::isdigit(static_cast<unsigned char>(line[i])) || line[i] == '.')) ++i;
                continue;
            }
            std::size_t j = i;
            while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
            if (j + 1 < line.size() && line[j] == '.' && std::isdigit(static_cast<unsigned char>(line[j + 1]))) {
                std::size_t k = j + 1;
                while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
                const std::string numeral(line.substr(i, k - i));
                const int decimals = static_cast<int>(k - j - 1);
                const bool supported = std::any_of(values.begin(), values.end(), [&](double v) {
                    return fmt::format("{:.{}f}", v, decimals) == numeral;
                });
                if (!supported && seen.insert(numeral).second) out.push_back(numeral);
                j = k;
            }
            i = j;
        }
    });
    return out;
}

llm::LlmRequest build_draft_prompt(const DraftContext& ctx, int version) {
    if (!ctx.question || !ctx.results || ctx.results->empty())
        throw DraftingError("drafting needs the selected question and at least one analysis result");
    std::ostringstream user;
    if (ctx.prior)
        user << "Revise draft v" << ctx.prior->version << " into draft v" << version << ".\n";
    else
        user << "Write draft v" << version << " of the manuscript.\n";
    const auto& q = *ctx.question;
    user << "\nResearch question (" << q.question_id << "): " << q.text << "\nOutcome: " << q.outcome_var
         << "\nDesign: " << q.design_label << "\nDomain: " << q.domain_tag << "\n";
    if (ctx.sample) {
        user << "\nSample construction:\n";
        for (const auto& s : ctx.sample->steps) user << "- " << s.step << ": " << s.rows << " rows\n";
    }
    if (ctx.profile && !ctx.profile->high_missingness.empty()) {
        user << "\nData caveats:\n";
        for (const auto& m : ctx.profile->high_missingness) user << "- " << m.var << ": " << m.note << "\n";
    }
    user << "\nCoefficient tables (CSV):\n" << tables_block(*ctx.results);
    if (ctx.prior) {
        if (ctx.prior_review) {
            user << "Reviewer requests on draft v" << ctx.prior->version << ":\n";
            for (const auto& r : ctx.prior_review->revision_requests)
                user << "- [" << to_string(r.kind) << "] " << r.text << "\n";
        }
        user << "\nPrevious draft:\n" << ctx.prior->body << "\n";
    }
    llm::LlmRequest req;
    req.role = llm::RoleTag::DraftGen;
    req.system_text = kSystem;
    req.user_text = user.str();
    req.max_output_tokens = 16384;
    return req;
}

Draft draft(const DraftContext& ctx, llm::LlmBackend& backend) {
    const int version = ctx.prior ? ctx.prior->version + 1 : 1;
    return finish(ctx, backend, build_draft_prompt(ctx, version), version);
}

Draft redraft_after_critique(const DraftContext& ctx, const Draft& current, const CritiqueNote& critique,
                             llm::LlmBackend& backend) {
    auto req = build_draft_prompt(ctx, current.version);
    req.user_text = "Redraft draft v" + std::to_string(current.version) + " addressing the self-critique below.\n\n" +
                    req.user_text + "\nSelf-critique (" + std::string(to_string(critique.severity)) + "):\n";
    for (const auto& issue : critique.issues) req.user_text += "- " + issue + "\n";
    req.user_text += "\nCurrent draft:\n" + current.body + "\n";
    auto d = finish(ctx, backend, std::move(req), current.version);
    d.redrafted_after_critique = true;
    return d;
}

}  // namespace econloop::manuscript
