#include "designflow/domain_json.hpp"
#include "designflow/mock_providers.hpp"
#include "designflow/service.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace designflow;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;

int exit_code_for(Errc code) {
    switch (http_status(code)) {
        case 400:
        case 409:
        case 422: return 3;
        case 404: return 4;
        case 502: return 5;
        default: return 1;
    }
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(Errc::not_found, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::optional<fs::path>& out, const std::string& text) {
    if (!out) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream f(*out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::storage_error, "cannot write " + out->string());
    f << text << '\n';
}

fs::path make_temp_root() {
    std::string tmpl = (fs::temp_directory_path() / "designflow-run-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw Error(Errc::storage_error, "cannot create a temporary directory");
    return tmpl;
}

ApiServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

struct ServeArgs {
    fs::path root = "designflow-data";
    std::optional<std::string> provider;
    std::optional<int> port;
    std::optional<std::string> host;
};

int serve(const ServeArgs& a) {
    fs::create_directories(a.root);
    ServiceConfig cfg = load_service_config(a.root);
    if (a.provider) cfg.providers.provider = *a.provider;
    if (a.port) cfg.port = *a.port;
    if (a.host) cfg.host = *a.host;

    Store store(a.root);
    Pipeline pipeline(make_providers(cfg.providers), store, cfg.pipeline);
    JobRegistry jobs(cfg.workers);
    ApiServer server(pipeline, jobs);
    const int port = server.bind(cfg.host, cfg.port);
    std::cout << "listening on http://" << cfg.host << ":" << port << " (provider " << cfg.providers.provider
              << ", root " << a.root.string() << ")" << std::endl;
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen();
    g_server = nullptr;
    return 0;
}

struct RunArgs {
    fs::path brief;
    bool auto_mode = false;
    std::size_t n = 1;
    std::optional<fs::path> out;
    std::optional<fs::path> root;
    std::optional<std::string> provider;
    std::optional<std::uint64_t> seed;
    std::string orientation = "portrait";
    std::optional<std::string> format;
    std::optional<std::string> language;
};

int run(const RunArgs& a) {
    if (!a.auto_mode) {
        std::cerr << "error: usage: only --auto runs are supported\n";
        return kExitUsage;
    }
    const std::string brief = read_text(a.brief);
    const bool temporary = !a.root;
    const fs::path root = temporary ? make_temp_root() : *a.root;
    fs::create_directories(root);

    ServiceConfig cfg = load_service_config(root);
    if (a.provider) cfg.providers.provider = *a.provider;
    if (a.seed) cfg.providers.seed = *a.seed;

    AutoRunOptions opt;
    opt.n = a.n;
    opt.seed = cfg.providers.seed;
    opt.deliverable_format = a.format;
    opt.output_language = a.language;
    opt.orientation = orientation_from_string(a.orientation);
    if (!opt.orientation) throw Error(Errc::invalid_argument, "orientation must be portrait, landscape or square");

    json summary;
    {
        Store store(root);
        Pipeline pipeline(make_providers(cfg.providers), store, cfg.pipeline);
        const BatchResult r = run_batch(pipeline, brief, opt, a.out);
        json prompts = json::array();
        for (const auto& p : r.session.integrated_prompts) prompts.push_back(p.text);
        json images = json::array();
        for (const auto& h : r.session.history) images.push_back(h.image_ref.content_hash);
        std::size_t cards = 0;
        for (const auto& [type, list] : r.session.element_cards) cards += list.size();
        summary = {{"session_id", r.session.id},
                   {"requirement_entries", r.session.requirement_cards.size()},
                   {"element_cards", cards},
                   {"artifacts", r.session.history.size()},
                   {"integrated_prompts", prompts},
                   {"image_hashes", images},
                   {"bundle", r.bundle ? json(r.bundle->string()) : json(nullptr)}};
    }
    if (temporary) fs::remove_all(root);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct AnalyzeArgs {
    std::string what;
    fs::path dir;
    std::optional<fs::path> out;
    std::optional<std::string> provider;
};

int analyze(const AnalyzeArgs& a) {
    ProviderSettings settings = load_provider_settings(std::nullopt);
    if (a.provider) settings.provider = *a.provider;
    const ProviderSet providers = make_providers(settings);
    const DiversityReport report = a.what == "prompts" ? analyze_prompt_dir(a.dir, *providers.embedder)
                                                       : analyze_image_dir(a.dir, *providers.embedder);
    write_text(a.out, json(report).dump(2));
    return 0;
}

int replay(const fs::path& bundle) {
    const ReplaySummary s = replay_bundle(bundle);
    std::cout << json(s).dump(2) << '\n';
    if (s.mismatch) {
        std::cerr << "error: " << code_name(Errc::corrupt_record) << ": replayed state disagrees with the stored session: "
                  << *s.mismatch << '\n';
        return exit_code_for(Errc::corrupt_record);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"designflow: brief-to-design pipeline service and tools"};
    app.require_subcommand(1);

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    serve_cmd->add_option("--root", serve_args.root, "Data directory (sessions, blobs, config)");
    serve_cmd->add_option("--provider", serve_args.provider, "mock or http")->check(CLI::IsMember({"mock", "http"}));
    serve_cmd->add_option("--port", serve_args.port, "Port (0 picks a free one)");
    serve_cmd->add_option("--host", serve_args.host, "Bind address");

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run a brief end to end and export the session bundle");
    run_cmd->add_option("--brief", run_args.brief, "Brief text file")->required()->check(CLI::ExistingFile);
    run_cmd->add_flag("--auto", run_args.auto_mode, "Make every choice automatically");
    run_cmd->add_option("--n", run_args.n, "Candidates per element type")->check(CLI::Range(1, 32));
    run_cmd->add_option("--out", run_args.out, "Bundle path (.tar)");
    run_cmd->add_option("--root", run_args.root, "Data directory (default: temporary)");
    run_cmd->add_option("--provider", run_args.provider, "mock or http")->check(CLI::IsMember({"mock", "http"}));
    run_cmd->add_option("--seed", run_args.seed, "Mock provider seed (overrides B2D_SEED)");
    run_cmd->add_option("--orientation", run_args.orientation, "portrait, landscape or square");
    run_cmd->add_option("--format", run_args.format, "Deliverable format (default: first extracted)");
    run_cmd->add_option("--language", run_args.language, "Output language");

    AnalyzeArgs analyze_args;
    auto* analyze_cmd = app.add_subcommand("analyze", "Diversity report over a directory of prompts or images");
    analyze_cmd->add_option("kind", analyze_args.what, "prompts or images")
        ->required()
        ->check(CLI::IsMember({"prompts", "images"}));
    analyze_cmd->add_option("dir", analyze_args.dir, "Input directory")->required();
    analyze_cmd->add_option("--out", analyze_args.out, "Report file (default: stdout)");
    analyze_cmd->add_option("--provider", analyze_args.provider, "mock or http")->check(CLI::IsMember({"mock", "http"}));

    fs::path replay_path;
    auto* replay_cmd = app.add_subcommand("replay", "Rebuild session state from a bundle's event log");
    replay_cmd->add_option("bundle", replay_path, "Bundle path")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*serve_cmd) return serve(serve_args);
        if (*run_cmd) return run(run_args);
        if (*analyze_cmd) return analyze(analyze_args);
        if (*replay_cmd) return replay(replay_path);
    } catch (const Error& e) {
        std::cerr << "error: " << code_name(e.code()) << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
