#include "econloop/core/run_store.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "econloop/core/error.hpp"
#include "econloop/core/json.hpp"
#include "econloop/core/tables.hpp"

namespace fs = std::filesystem;

namespace econloop {

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw PersistenceError(path.parent_path().string(), "cannot create directory");

    // Unchanged content is left alone so re-persisting does not touch mtimes.
    if (fs::exists(path, ec)) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream existing;
        existing << in.rdbuf();
        if (in && existing.str() == content) return;
    }

    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw PersistenceError(tmp.string(), "cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw PersistenceError(tmp.string(), "write failed");
    }
    fs::rename(tmp, path, ec);
    if (ec) throw PersistenceError(path.string(), "cannot replace file");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path.string(), "cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string serialize_state(const RunState& state) { return json(state).dump(2) + "\n"; }

namespace {

void remove_stale(const fs::path& dir, const std::string& prefix, std::size_t keep) {
    // Files numbered above `keep` belong to a previous, longer state.
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(prefix, 0) != 0) continue;
        const std::string digits = name.substr(prefix.size(), name.find('.') - prefix.size());
        try {
            if (std::stoul(digits) > keep) fs::remove(entry.path(), ec);
        } catch (const std::exception&) {
        }
    }
}

}  // namespace

fs::path persist_run(const RunState& state, const fs::path& root) {
    validate(state);
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw PersistenceError(root.string(), "output root is not a directory");

    const fs::path dir = root / state.run_id;
    write_file(dir / "state.json", serialize_state(state));

    std::string log;
    for (const auto& e : state.events) log += json(e).dump() + "\n";
    write_file(dir / "events.log", log);

    if (state.profile) write_file(dir / "profile.json", json(*state.profile).dump(2) + "\n");

    for (const auto& round : state.candidates)
        write_file(dir / "questions" / ("round_" + std::to_string(round.round) + ".json"),
                   json(round).dump(2) + "\n");

    for (const auto& d : state.drafts)
        write_file(dir / "drafts" / ("draft_v" + std::to_string(d.version) + ".md"), d.body);
    remove_stale(dir / "drafts", "draft_v", state.drafts.size());

    for (const auto& r : state.reviews)
        write_file(dir / "reviews" / ("review_v" + std::to_string(r.draft_version) + ".json"),
                   json(r).dump(2) + "\n");
    remove_stale(dir / "reviews", "review_v", state.reviews.size());

    std::size_t figure = 0;
    for (std::size_t k = 0; k < state.analyses.size(); ++k) {
        const auto& result = state.analyses[k];
        write_file(dir / "analysis" / ("table_" + std::to_string(k + 1) + ".csv"), format_table_csv(result));
        if (auto fig = format_figure_csv(result); !fig.empty())
            write_file(dir / "analysis" / ("figure_" + std::to_string(++figure) + ".csv"), fig);
    }
    if (state.sample_report)
        write_file(dir / "analysis" / "sample_report.json", json(*state.sample_report).dump(2) + "\n");

    return dir;
}

RunState load_run(const fs::path& run_dir) {
    const fs::path state_path = run_dir / "state.json";
    RunState state;
    try {
        state = json::parse(read_file(state_path)).get<RunState>();
    } catch (const LoadError&) {
        throw;
    } catch (const std::exception& e) {
        throw LoadError(state_path.string(), std::string("corrupt state (") + e.what() + ")");
    }

    const fs::path log_path = run_dir / "events.log";
    std::vector<RunEvent> logged;
    {
        const std::string text = read_file(log_path);
        if (!text.empty() && text.back() != '\n') throw LoadError(log_path.string(), "truncated event log");
        std::istringstream lines(text);
        std::string line;
        std::size_t n = 0;
        while (std::getline(lines, line)) {
            ++n;
            try {
                logged.push_back(json::parse(line).get<RunEvent>());
            } catch (const std::exception&) {
                throw LoadError(log_path.string(), "corrupt event at line " + std::to_string(n));
            }
        }
    }
    if (logged != state.events) throw LoadError(log_path.string(), "event log does not match state.json");

    validate(state);
    return state;
}

}  // namespace econloop
