#include "designflow/http_providers.hpp"

#include "designflow/error.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <chrono>

namespace designflow {

using nlohmann::json;

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string base;    // path prefix without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (url.empty() || scheme_end == std::string::npos) {
        throw Error(Errc::invalid_argument, "endpoint must be an absolute URL: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = url.substr(0, path_start);
    e.base = path_start == std::string::npos ? std::string{} : url.substr(path_start);
    while (!e.base.empty() && e.base.back() == '/') e.base.pop_back();
    return e;
}

std::string decode_base64(std::string_view in) {
    std::string clean;
    for (char c : in) {
        if (c != '\n' && c != '\r' && c != ' ') clean += c;
    }
    if (clean.size() % 4 != 0) throw Error(Errc::transport_error, "image payload is not valid base64");
    std::string out(clean.size() / 4 * 3, '\0');
    const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(clean.data()),
                                  static_cast<int>(clean.size()));
    if (n < 0) throw Error(Errc::transport_error, "image payload is not valid base64");
    std::size_t pad = 0;
    if (!clean.empty() && clean.back() == '=') ++pad;
    if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

}  // namespace

json post_json(const ProviderConfig& config, std::string_view path, const json& body) {
    const auto ep = split_endpoint(config.endpoint);
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::milliseconds(config.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(ep.base + std::string(path), headers, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        const auto elapsed = std::chrono::steady_clock::now() - start;
        if (err == httplib::Error::ConnectionTimeout ||
            (err == httplib::Error::Read && elapsed >= timeout)) {
            throw Error(Errc::timeout, "provider request timed out", {{"path", path}});
        }
        throw Error(Errc::transport_error, "provider request failed: " + httplib::to_string(err),
                    {{"path", path}});
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(Errc::transport_error, "provider returned HTTP " + std::to_string(res->status),
                    {{"path", path}, {"status", res->status}});
    }
    json out = json::parse(res->body, nullptr, false);
    if (out.is_discarded()) throw Error(Errc::transport_error, "provider reply is not JSON", {{"path", path}});
    return out;
}

HttpChatProvider::HttpChatProvider(ProviderConfig config) : config_(std::move(config)) {
    validate_config(config_);
}

json HttpChatProvider::complete(const RenderedPrompt& prompt, const StructuredSchema& schema,
                                std::string_view corrective_suffix) {
    json body = {
        {"model", config_.model},
        {"temperature", config_.temperature},
        {"messages", json::array({{{"role", "user"}, {"content", prompt.text + std::string(corrective_suffix)}}})},
        {"response_format",
         {{"type", "json_schema"},
          {"json_schema", {{"name", to_string(schema.id)}, {"strict", true}, {"schema", json_schema(schema)}}}}}};
    const json reply = post_json(config_, "/v1/chat/completions", body);
    try {
        const auto& content = reply.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) return nullptr;
        // Malformed content is a schema problem, not a transport one.
        return json::parse(content.get<std::string>(), nullptr, false);
    } catch (const json::exception&) {
        throw Error(Errc::transport_error, "chat reply has no message content");
    }
}

HttpImageProvider::HttpImageProvider(ProviderConfig config) : config_(std::move(config)) {
    validate_config(config_);
}

GeneratedImage HttpImageProvider::generate(std::string_view prompt, ImageSize size, std::uint64_t) {
    json body = {{"model", config_.model},
                 {"prompt", prompt},
                 {"n", 1},
                 {"size", std::to_string(size.width) + "x" + std::to_string(size.height)},
                 {"response_format", "b64_json"}};
    const json reply = post_json(config_, "/v1/images/generations", body);
    std::string b64;
    try {
        b64 = reply.at("data").at(0).at("b64_json").get<std::string>();
    } catch (const json::exception&) {
        throw Error(Errc::transport_error, "image reply has no b64_json data");
    }
    GeneratedImage img;
    img.bytes = decode_base64(b64);
    img.media_type = sniff_media_type(img.bytes);
    img.width = size.width;
    img.height = size.height;
    return img;
}

HttpEmbedder::HttpEmbedder(ProviderConfig config) : config_(std::move(config)) { validate_config(config_); }

std::size_t HttpEmbedder::dimension() const {
    std::lock_guard lock(mutex_);
    return dimension_;
}

EmbeddingVector HttpEmbedder::embed_text(std::string_view text) {
    const json reply = post_json(config_, "/v1/embeddings", {{"model", config_.model}, {"input", text}});
    std::vector<double> values;
    try {
        values = reply.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception&) {
        throw Error(Errc::transport_error, "embedding reply has no vector");
    }
    EmbeddingVector v(std::move(values));
    std::lock_guard lock(mutex_);
    if (dimension_ == 0) dimension_ = v.dims();
    return v;
}

EmbeddingVector HttpEmbedder::embed_image(std::string_view) {
    throw Error(Errc::invalid_argument, "the http embedder does not support image embeddings");
}

}  // namespace designflow
