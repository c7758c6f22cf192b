#include "designflow/service.hpp"

#include <fstream>

namespace designflow {

using nlohmann::json;

ServiceConfig load_service_config(const std::filesystem::path& root, const EnvLookup& env) {
    ServiceConfig c;
    c.root = root;
    const auto file = root / "config";
    c.providers = load_provider_settings(file, env);
    if (!std::filesystem::exists(file)) return c;

    std::ifstream in(file);
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(Errc::invalid_argument, "config file is not a JSON object: " + file.string());
    }
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.workers = j.value("workers", c.workers);
    auto& p = c.pipeline;
    p.element_candidates = j.value("element_candidates", p.element_candidates);
    p.requirement_candidates = j.value("requirement_candidates", p.requirement_candidates);
    p.output_language = j.value("output_language", p.output_language);
    p.default_deliverable_format = j.value("default_deliverable_format", p.default_deliverable_format);
    if (j.contains("preview_size")) {
        p.preview_size.width = j["preview_size"].at("width").get<int>();
        p.preview_size.height = j["preview_size"].at("height").get<int>();
    }
    if (c.workers == 0) throw Error(Errc::invalid_argument, "workers must be at least 1");
    return c;
}

}  // namespace designflow
