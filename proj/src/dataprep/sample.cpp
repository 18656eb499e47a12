#include "econloop/dataprep/sample.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <map>

#include "econloop/data/csv.hpp"

namespace econloop::dataprep {

namespace {

constexpr std::array<std::string_view, 6> kOps{"==", "!=", "<", "<=", ">", ">="};

void push_unique(std::vector<std::string>& names, const std::string& n) {
    for (const auto& x : names)
        if (x == n) return;
    names.push_back(n);
}

std::string list_rows(const std::vector<std::size_t>& rows) {
    std::string out;
    for (std::size_t i = 0; i < rows.size() && i < 10; ++i) out += (i ? ", " : "") + std::to_string(rows[i]);
    if (rows.size() > 10) out += ", ... (" + std::to_string(rows.size()) + " rows)";
    return out;
}

bool compare(double a, Comparator op, double b) {
    switch (op) {
    case Comparator::Eq: return a == b;
    case Comparator::Ne: return a != b;
    case Comparator::Lt: return a < b;
    case Comparator::Le: return a <= b;
    case Comparator::Gt: return a > b;
    case Comparator::Ge: return a >= b;
    }
    return false;
}

void merge(data::Table& t, const ExternalSeries& s) {
    const std::size_t key_col = t.require_column(s.key_var);
    std::optional<std::size_t> time_col;
    if (s.time_var) time_col = t.require_column(*s.time_var);
    if (t.column_index(s.value_var))
        throw SampleSpecError("external value column '" + s.value_var + "' collides with an existing column");

    std::map<std::pair<std::string, double>, double> index;
    for (const auto& r : s.rows) {
        if (!index.emplace(std::pair{r.key, r.time.value_or(0.0)}, r.value).second)
            throw MergeError(r.key, "external series " + s.source_id + " matches key " + r.key + " more than once");
    }
    const std::size_t out = t.add_column({s.value_var, ValueKind::Numeric});
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        const auto& key = t.at(r, key_col);
        if (key.missing()) continue;
        double time = 0.0;
        if (time_col) {
            const auto& tc = t.at(r, *time_col);
            if (!tc.is_number()) continue;
            time = tc.number();
        }
        auto it = index.find({t.display(key), time});
        if (it != index.end()) t.at(r, out) = data::Cell::number(it->second);
    }
}

void apply_transform(data::Table& t, const Transform& tr) {
    const std::size_t c = t.require_column(tr.var);
    std::vector<std::size_t> bad;
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        const auto& cell = t.at(r, c);
        if (cell.is_text() || (tr.kind == TransformKind::LogTransform && cell.is_number() && !(cell.number() > 0.0)))
            bad.push_back(r + 1);
    }
    if (!bad.empty()) {
        const char* what = tr.kind == TransformKind::LogTransform ? "non-positive or non-numeric" : "non-numeric";
        throw TransformError(tr.var, bad,
                             std::string(to_string(tr.kind)) + " on '" + tr.var + "': " + what + " values in rows " +
                                 list_rows(bad));
    }
    switch (tr.kind) {
    case TransformKind::LogTransform:
        for (std::size_t r = 0; r < t.n_rows(); ++r)
            if (t.at(r, c).is_number()) t.at(r, c) = data::Cell::number(std::log(t.at(r, c).number()));
        t.set_kind(c, ValueKind::Numeric);
        break;
    case TransformKind::Standardize: {
        double sum = 0, n = 0;
        for (std::size_t r = 0; r < t.n_rows(); ++r)
            if (t.at(r, c).is_number()) sum += t.at(r, c).number(), n += 1;
        if (n < 2) throw TransformError(tr.var, {}, "Standardize on '" + tr.var + "': fewer than 2 values");
        const double mean = sum / n;
        double ss = 0;
        for (std::size_t r = 0; r < t.n_rows(); ++r)
            if (t.at(r, c).is_number()) ss += (t.at(r, c).number() - mean) * (t.at(r, c).number() - mean);
        const double sd = std::sqrt(ss / (n - 1));
        if (!(sd > 0)) throw TransformError(tr.var, {}, "Standardize on '" + tr.var + "': zero variance");
        for (std::size_t r = 0; r < t.n_rows(); ++r)
            if (t.at(r, c).is_number()) t.at(r, c) = data::Cell::number((t.at(r, c).number() - mean) / sd);
        t.set_kind(c, ValueKind::Numeric);
        break;
    }
    case TransformKind::BinaryRecode:
        for (std::size_t r = 0; r < t.n_rows(); ++r)
            if (t.at(r, c).is_number()) t.at(r, c) = data::Cell::number(t.at(r, c).number() > tr.threshold ? 1.0 : 0.0);
        t.set_kind(c, ValueKind::Binary);
        break;
    }
}

std::vector<bool> restriction_mask(const data::Table& t, const Restriction& rs) {
    const std::size_t c = t.require_column(rs.var);
    double lit = 0.0;
    const bool numeric = data::parse_number(rs.literal, lit);
    if (!numeric && rs.op != Comparator::Eq && rs.op != Comparator::Ne)
        throw SampleSpecError("restriction " + rs.describe() + ": ordering needs a numeric literal");
    std::vector<bool> keep(t.n_rows(), false);
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        const auto& cell = t.at(r, c);
        if (cell.missing()) continue;
        if (cell.is_number() && numeric) keep[r] = compare(cell.number(), rs.op, lit);
        else if (cell.is_text() && !numeric) keep[r] = (t.text(cell.text_id()) == rs.literal) == (rs.op == Comparator::Eq);
    }
    return keep;
}

data::Table filter(const data::Table& t, const std::vector<bool>& keep) {
    std::vector<std::size_t> cols(t.n_cols());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    return t.select(cols, &keep);
}

}  // namespace

std::string_view to_string(Comparator op) { return kOps[static_cast<std::size_t>(op)]; }

Comparator comparator_from_string(std::string_view text) {
    if (text == "=") return Comparator::Eq;
    for (std::size_t i = 0; i < kOps.size(); ++i)
        if (kOps[i] == text) return static_cast<Comparator>(i);
    throw SampleSpecError("unknown comparator '" + std::string(text) + "'");
}

std::string Restriction::describe() const { return var + " " + std::string(to_string(op)) + " " + literal; }

void validate_sample_spec(const SampleSpec& spec, const DatasetAudit& audit,
                          const std::vector<ExternalSeries>& externals) {
    auto known = [&](const std::string& name) {
        if (audit.find(name)) return true;
        for (const auto& e : externals)
            if (e.value_var == name) return true;
        return false;
    };
    std::vector<std::string> unknown;
    auto check = [&](const std::string& name) {
        if (!known(name)) push_unique(unknown, name);
    };
    for (const auto& v : spec.variables) check(v);
    for (const auto& v : spec.id_vars) check(v);
    for (const auto& v : spec.listwise_on) check(v);
    for (const auto& r : spec.restrictions) check(r.var);
    for (const auto& t : spec.transforms) check(t.var);
    if (!unknown.empty()) {
        std::string names;
        for (const auto& u : unknown) names += (names.empty() ? "" : ", ") + u;
        throw SampleSpecError("sample specification names unknown variables: " + names);
    }
    if (spec.variables.empty()) throw SampleSpecError("sample specification has no variables");
}

PreparedSample build_analytic_table(const data::Table& table, const SampleSpec& spec,
                                    const std::vector<ExternalSeries>& externals) {
    PreparedSample out;
    out.report.steps.push_back({"input", table.n_rows()});

    // Work on the columns the pipeline touches only.
    std::vector<std::string> needed;
    for (const auto& v : spec.id_vars) push_unique(needed, v);
    for (const auto& v : spec.variables) push_unique(needed, v);
    for (const auto& r : spec.restrictions) push_unique(needed, r.var);
    for (const auto& v : spec.listwise_on) push_unique(needed, v);
    for (const auto& t : spec.transforms) push_unique(needed, t.var);
    for (const auto& e : externals) {
        push_unique(needed, e.key_var);
        if (e.time_var) push_unique(needed, *e.time_var);
    }
    std::vector<std::size_t> cols;
    for (const auto& n : needed) {
        bool external = false;
        for (const auto& e : externals) external |= e.value_var == n;
        if (external && !table.column_index(n)) continue;
        cols.push_back(table.require_column(n));
    }
    data::Table work = table.select(cols);

    for (const auto& e : externals) {
        merge(work, e);
        out.report.steps.push_back({"merge " + e.source_id, work.n_rows()});
    }
    for (const auto& t : spec.transforms) {
        apply_transform(work, t);
        out.report.steps.push_back({"transform " + std::string(to_string(t.kind)) + " " + t.var, work.n_rows()});
    }
    for (const auto& r : spec.restrictions) {
        work = filter(work, restriction_mask(work, r));
        out.report.steps.push_back({"restrict " + r.describe(), work.n_rows()});
    }
    if (!spec.listwise_on.empty()) {
        std::vector<std::size_t> lw;
        for (const auto& v : spec.listwise_on) lw.push_back(work.require_column(v));
        std::vector<bool> keep(work.n_rows(), true);
        for (std::size_t r = 0; r < work.n_rows(); ++r)
            for (auto c : lw)
                if (work.at(r, c).missing()) keep[r] = false;
        work = filter(work, keep);
        out.report.steps.push_back({"listwise deletion", work.n_rows()});
    }
    if (work.empty()) throw EmptySampleError("sample construction left no observations");

    std::vector<std::string> final_names;
    for (const auto& v : spec.id_vars) push_unique(final_names, v);
    for (const auto& v : spec.variables) push_unique(final_names, v);
    std::vector<std::size_t> final_cols;
    for (const auto& n : final_names) final_cols.push_back(work.require_column(n));
    out.table = work.select(final_cols);
    return out;
}

}  // namespace econloop::dataprep
