#include "econloop/econometrics/outputs.hpp"

#include <cstdio>
#include <sstream>

#include "econloop/core/error.hpp"
#include "econloop/core/run_store.hpp"
#include "econloop/core/tables.hpp"

namespace econloop::econometrics {

std::vector<std::filesystem::path> emit_outputs(const std::vector<AnalysisResult>& results,
                                                const std::filesystem::path& dir) {
    if (results.empty()) throw std::invalid_argument("emit_outputs needs at least one result");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw PersistenceError(dir.string(), "cannot create output directory (" + ec.message() + ")");
    std::vector<std::filesystem::path> written;
    int figure = 0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        auto table = dir / ("table_" + std::to_string(k + 1) + ".csv");
        write_file(table, format_table_csv(results[k]));
        written.push_back(table);
        if (auto fig = format_figure_csv(results[k]); !fig.empty()) {
            auto path = dir / ("figure_" + std::to_string(++figure) + ".csv");
            write_file(path, fig);
            written.push_back(path);
        }
    }
    return written;
}

std::string render_result(const AnalysisResult& r) {
    std::ostringstream os;
    os << "Result " << (r.result_id.empty() ? "-" : r.result_id) << " (" << to_string(r.spec.design) << ", "
       << (r.spec.label.empty() ? "unlabeled" : r.spec.label) << "): outcome " << r.spec.outcome << ", N = " << r.n_obs;
    if (r.n_entities) os << ", entities = " << *r.n_entities;
    if (r.n_clusters) os << ", clusters = " << *r.n_clusters;
    char buf[256];
    std::snprintf(buf, sizeof buf, ", %sR2 = %.4f\n", r.within_r_squared ? "within " : "", r.r_squared);
    os << buf;
    std::snprintf(buf, sizeof buf, "%-28s %12s %12s %9s %9s\n", "term", "estimate", "se", "t", "p");
    os << buf;
    for (const auto& c : r.coefficients) {
        std::snprintf(buf, sizeof buf, "%-28s %12.4f %12.4f %9.3f %9.4f %s\n", c.name.c_str(), c.estimate, c.std_error,
                      c.t_stat, c.p_value, significance_stars(c.p_value).c_str());
        os << buf;
    }
    for (const auto& n : r.notes) os << "note: " << n << "\n";
    return os.str();
}

}  // namespace econloop::econometrics
