#include "econloop/gateway/cli.hpp"

#include <csignal>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "econloop/data/audit.hpp"
#include "econloop/data/csv.hpp"
#include "econloop/gateway/server.hpp"
#include "econloop/orchestrator/ablation.hpp"
#include "econloop/orchestrator/pipeline.hpp"
#include "econloop/profiler/profile.hpp"

namespace econloop::gateway {

namespace {

// "age>=18", "female==1", "province!=Beijing"
dataprep::Restriction parse_restriction(const std::string& text) {
    static const char* ops[] = {"==", "!=", "<=", ">=", "<", ">", "="};
    for (std::size_t i = 0; i < text.size(); ++i) {
        for (const char* op : ops) {
            const std::string o(op);
            if (text.compare(i, o.size(), o) == 0 && i > 0 && i + o.size() < text.size())
                return {text.substr(0, i), dataprep::comparator_from_string(o), text.substr(i + o.size())};
        }
    }
    throw CLI::ValidationError("--restrict", "expected <var><op><value>, got '" + text + "'");
}

struct Loaded {
    std::shared_ptr<data::Table> table;
    DatasetAudit audit;
    DataProfile profile;
};

Loaded load_dataset(const std::string& dataset, const std::string& meta_path) {
    Loaded l;
    l.table = std::make_shared<data::Table>(data::load_csv(dataset));
    data::DatasetMeta meta;
    if (!meta_path.empty())
        meta = data::load_meta(meta_path);
    else if (auto p = orchestrator::default_meta_path(dataset))
        meta = data::load_meta(*p);
    if (meta.dataset_id.empty()) meta.dataset_id = std::filesystem::path(dataset).stem().string();
    l.audit = data::audit_dataset(*l.table, meta.dataset_id, meta.panel, meta.labels);
    l.audit.source_path = dataset;
    l.profile = profiler::profile(*l.table, l.audit);
    return l;
}

int exit_for(Stage stage) {
    switch (stage) {
    case Stage::Completed: return kExitOk;
    case Stage::Halted: return kExitHalted;
    case Stage::Rejected: return kExitRejected;
    default: return kExitFailure;
    }
}

Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"econloop: dataset-to-manuscript research pipeline with human decision gates"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run the full pipeline on one dataset");
    std::string dataset, meta, domain = "labor economics", mode = "headless", llm_choice, generation = "aware";
    std::string out_root = "runs", select_id, prices_path, run_id;
    int n_questions = 8, max_iter = 4;
    double threshold = 6.0;
    std::vector<std::string> restrictions, externals;
    run->add_option("--dataset", dataset, "CSV dataset")->required()->check(CLI::ExistingFile);
    run->add_option("--meta", meta, "metadata sidecar (default <dataset>.meta.json)")->check(CLI::ExistingFile);
    run->add_option("--domain", domain, "research domain");
    run->add_option("--n-questions", n_questions, "questions per round")->check(CLI::PositiveNumber);
    run->add_option("--mode", mode, "interactive | headless")->check(CLI::IsMember({"interactive", "headless"}));
    run->add_option("--llm", llm_choice, "live | scripted:<fixture>")->required();
    run->add_option("--generation", generation, "aware | unconstrained")
        ->check(CLI::IsMember({"aware", "unconstrained"}));
    run->add_option("--out", out_root, "output root");
    run->add_option("--select", select_id, "headless: select this question id instead of the top-ranked one");
    run->add_option("--prices", prices_path, "price table JSON (micro-dollars per token)")->check(CLI::ExistingFile);
    run->add_option("--accept-threshold", threshold, "review score that ends the revision loop");
    run->add_option("--max-iterations", max_iter, "revision budget")->check(CLI::PositiveNumber);
    run->add_option("--run-id", run_id, "fixed run id");
    run->add_option("--restrict", restrictions, "sample restriction, e.g. age>=18 (repeatable)");
    run->add_option("--external", externals, "external key[,time],value CSV to merge (repeatable)")
        ->check(CLI::ExistingFile);

    // profile
    auto* prof = app.add_subcommand("profile", "audit and profile a dataset");
    std::string p_dataset, p_meta;
    prof->add_option("--dataset", p_dataset, "CSV dataset")->required()->check(CLI::ExistingFile);
    prof->add_option("--meta", p_meta, "metadata sidecar")->check(CLI::ExistingFile);

    // ablation
    auto* abl = app.add_subcommand("ablation", "dataset-aware vs unconstrained question generation");
    std::string a_dataset, a_meta, fixture_a, fixture_b, a_out, a_domain = "labor economics";
    int rounds = 1, per_round = 8;
    abl->add_option("--dataset", a_dataset, "CSV dataset")->required()->check(CLI::ExistingFile);
    abl->add_option("--meta", a_meta, "metadata sidecar")->check(CLI::ExistingFile);
    abl->add_option("--fixture-a", fixture_a, "scripted fixture for the dataset-aware arm")
        ->required()
        ->check(CLI::ExistingFile);
    abl->add_option("--fixture-b", fixture_b, "scripted fixture for the unconstrained arm")
        ->required()
        ->check(CLI::ExistingFile);
    abl->add_option("--rounds", rounds, "generation rounds per arm")->check(CLI::PositiveNumber);
    abl->add_option("--n", per_round, "questions per round")->check(CLI::PositiveNumber);
    abl->add_option("--domain", a_domain, "research domain");
    abl->add_option("--out", a_out, "directory for ablation.json / ablation.txt");

    // serve
    auto* srv = app.add_subcommand("serve", "HTTP API for runs and gate decisions");
    std::string bind = "127.0.0.1:8080", s_out = "runs";
    srv->add_option("--bind", bind, "host:port");
    srv->add_option("--out", s_out, "output root");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*run) {
            orchestrator::RunConfig config;
            config.dataset_path = dataset;
            if (!meta.empty()) config.meta_path = meta;
            config.domain = domain;
            config.n_questions = n_questions;
            config.mode = mode == "headless" ? orchestrator::RunMode::Headless : orchestrator::RunMode::Interactive;
            if (!select_id.empty()) {
                config.policy = orchestrator::HeadlessPolicy::SelectById;
                config.select_id = select_id;
            }
            config.generation_mode =
                generation == "aware" ? GenerationMode::DatasetAware : GenerationMode::Unconstrained;
            config.accept_threshold = threshold;
            config.max_revision_iterations = max_iter;
            config.output_root = out_root;
            std::filesystem::create_directories(config.output_root);
            if (!run_id.empty()) config.run_id = run_id;
            for (const auto& r : restrictions) config.restrictions.push_back(parse_restriction(r));
            for (const auto& e : externals) config.externals.push_back(e);
            try {
                config.backend = orchestrator::BackendChoice::parse(llm_choice);
                if (!prices_path.empty()) config.prices = llm::PriceTable::load(prices_path);
                config.validate();
            } catch (const std::invalid_argument& e) {
                err << "error: " << e.what() << "\n\n" << run->help();
                return kExitUsage;
            }
            auto backend = orchestrator::make_backend(config.backend);
            std::unique_ptr<orchestrator::GateResolver> resolver;
            if (config.mode == orchestrator::RunMode::Interactive)
                resolver = std::make_unique<orchestrator::TerminalResolver>(in, out);
            else
                resolver = std::make_unique<orchestrator::PolicyResolver>(config.policy, config.select_id);
            orchestrator::RunExecutor ex(config, *backend, *resolver);
            ex.initialize();
            const auto state = ex.run();
            out << "run " << state.run_id << ": " << to_string(state.stage);
            if (!state.reviews.empty()) out << ", " << state.reviews.size() << " review(s), last overall "
                                            << state.reviews.back().overall;
            out << ", cost " << state.cost.total << " micro-USD\n" << ex.run_dir().string() << "\n";
            if (state.stage == Stage::Halted && !state.events.empty())
                err << "halted: " << state.events.back().payload.dump() << "\n";
            return exit_for(state.stage);
        }
        if (*prof) {
            const auto l = load_dataset(p_dataset, p_meta);
            out << profiler::render_profile(l.profile);
            return kExitOk;
        }
        if (*abl) {
            const auto l = load_dataset(a_dataset, a_meta);
            auto a = orchestrator::make_backend(orchestrator::BackendChoice::parse("scripted:" + fixture_a));
            auto b = orchestrator::make_backend(orchestrator::BackendChoice::parse("scripted:" + fixture_b));
            orchestrator::AblationConfig cfg;
            cfg.audit = &l.audit;
            cfg.profile = &l.profile;
            cfg.domain = a_domain;
            cfg.rounds = rounds;
            cfg.n_per_round = per_round;
            cfg.arms = {{"Dataset-aware", GenerationMode::DatasetAware, a.get()},
                        {"Unconstrained", GenerationMode::Unconstrained, b.get()}};
            const auto report = orchestrator::run_ablation(cfg);
            if (!a_out.empty()) orchestrator::write_ablation(report, a_out);
            out << report.render();
            return kExitOk;
        }
        if (*srv) {
            const auto colon = bind.rfind(':');
            int port = 0;
            try {
                if (colon == std::string::npos) throw std::invalid_argument(bind);
                port = std::stoi(bind.substr(colon + 1));
            } catch (const std::exception&) {
                err << "error: --bind expects host:port\n\n" << srv->help();
                return kExitUsage;
            }
            std::filesystem::create_directories(s_out);
            Server server(bind.substr(0, colon), port, s_out);
            const int bound = server.bind();
            out << "listening on " << bind.substr(0, colon) << ":" << bound << "\n" << std::flush;
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.listen();
            g_server = nullptr;
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error (" << e.kind() << "): " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace econloop::gateway
