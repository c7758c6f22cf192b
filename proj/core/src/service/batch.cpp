#include "designflow/domain_json.hpp"
#include "designflow/service.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace designflow {

using nlohmann::json;

namespace fs = std::filesystem;

BatchResult run_batch(Pipeline& pipeline, std::string_view brief_text, const AutoRunOptions& options,
                      const std::optional<fs::path>& bundle) {
    BatchResult out{pipeline.run_auto(brief_text, options), std::nullopt};
    if (bundle) {
        pipeline.store().export_bundle(out.session.id, *bundle);
        out.bundle = bundle;
    }
    return out;
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(Errc::not_found, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> files_in(const fs::path& dir, const std::vector<std::string>& extensions) {
    if (!fs::is_directory(dir)) throw Error(Errc::not_found, "not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

template <class Fn>
DiversityReport analyze(const std::vector<fs::path>& files, Fn&& report) {
    std::vector<std::string> items;
    std::vector<std::string> ids;
    for (const auto& f : files) {
        items.push_back(read_file(f));
        ids.push_back(f.filename().string());
    }
    if (items.size() < 2) {
        throw Error(Errc::too_few_items, "at least two items are needed, found " + std::to_string(items.size()),
                    {{"item_count", items.size()}});
    }
    return report(items, ids);
}

}  // namespace

DiversityReport analyze_prompt_dir(const fs::path& dir, Embedder& embedder) {
    return analyze(files_in(dir, {".txt"}), [&](const auto& items, const auto& ids) {
        return corpus_diversity_texts(items, embedder, ids);
    });
}

DiversityReport analyze_image_dir(const fs::path& dir, Embedder& embedder) {
    return analyze(files_in(dir, {".png", ".jpg", ".jpeg", ".gif", ".webp"}),
                   [&](const auto& items, const auto& ids) { return corpus_diversity_images(items, embedder, ids); });
}

void to_json(json& j, const ReplaySummary& s) {
    json revisions = json::object();
    for (const auto& [id, rev] : s.state.revisions) revisions[id.str()] = rev;
    json types = json::object();
    for (const auto& [id, t] : s.state.card_types) types[id.str()] = key(t);
    j = {{"session_id", s.session_id},
         {"event_count", s.event_count},
         {"card_count", s.state.revisions.size()},
         {"revisions", revisions},
         {"card_types", types},
         {"selection", s.state.selection ? json(*s.state.selection) : json(nullptr)},
         {"history_length", s.state.history_length},
         {"stored_history_length", s.stored_history_length},
         {"requirement_entries", s.state.requirement_entries},
         {"closed", s.state.closed},
         {"consistent", !s.mismatch},
         {"mismatch", s.mismatch ? json(*s.mismatch) : json(nullptr)}};
}

ReplaySummary replay_bundle(const fs::path& bundle) {
    const BundleContents contents = read_bundle(bundle);
    ReplaySummary s;
    s.session_id = contents.session.id;
    s.event_count = contents.events.size();
    s.state = replay_events(contents.events);
    s.stored_history_length = contents.session.history.size();
    s.mismatch = replay_mismatch(s.state, contents.session);
    return s;
}

}  // namespace designflow
