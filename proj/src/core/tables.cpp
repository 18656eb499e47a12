#include "econloop/core/tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace econloop {

std::string significance_stars(double p) {
    if (!(p >= 0.0)) return "";
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string format_table_csv(const AnalysisResult& result) {
    std::string out = "term,estimate,se,t,p,ci_low,ci_high,stars\n";
    for (const auto& c : result.coefficients) {
        out += csv_field(c.name);
        for (double v : {c.estimate, c.std_error, c.t_stat, c.p_value, c.ci_low, c.ci_high}) {
            out += ',';
            out += format_real(v);
        }
        out += ',';
        out += significance_stars(c.p_value);
        out += '\n';
    }
    return out;
}

std::string format_figure_csv(const AnalysisResult& result) {
    std::vector<const Coefficient*> points;
    for (const auto& c : result.coefficients)
        if (c.event_time) points.push_back(&c);
    if (points.empty()) return {};
    std::stable_sort(points.begin(), points.end(),
                     [](const Coefficient* a, const Coefficient* b) { return *a->event_time < *b->event_time; });
    std::string out = "event_time,estimate,ci_low,ci_high\n";
    for (const auto* c : points)
        out += std::to_string(*c->event_time) + ',' + format_real(c->estimate) + ',' + format_real(c->ci_low) + ',' +
               format_real(c->ci_high) + '\n';
    return out;
}

}  // namespace econloop
