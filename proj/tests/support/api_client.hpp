#pragma once

#include "designflow/mock_providers.hpp"
#include "designflow/service.hpp"

#include "support.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <stdexcept>
#include <string>
#include <thread>

namespace designflow::testing {

struct ApiResponse {
    int status = 0;
    nlohmann::json body;
};

/// Thin JSON client for the HTTP API.
class ApiClient {
public:
    explicit ApiClient(int port) : client_("127.0.0.1", port) {
        client_.set_read_timeout(std::chrono::seconds(30));
    }

    ApiResponse get(const std::string& path) { return wrap(client_.Get(path)); }
    ApiResponse post(const std::string& path, const nlohmann::json& body = nlohmann::json::object()) {
        return wrap(client_.Post(path, body.dump(), "application/json"));
    }
    ApiResponse put(const std::string& path, const nlohmann::json& body) {
        return wrap(client_.Put(path, body.dump(), "application/json"));
    }
    ApiResponse patch(const std::string& path, const nlohmann::json& body) {
        return wrap(client_.Patch(path, body.dump(), "application/json"));
    }
    ApiResponse del(const std::string& path) { return wrap(client_.Delete(path)); }
    ApiResponse raw_post(const std::string& path, const std::string& body) {
        return wrap(client_.Post(path, body, "application/json"));
    }
    httplib::Result get_raw(const std::string& path) { return client_.Get(path); }

    /// Polls GET /jobs/{id} until the job settles.
    ApiResponse await_job(const ApiResponse& submitted) {
        if (submitted.status != 202) return submitted;
        const std::string path = "/jobs/" + submitted.body.at("job_id").get<std::string>();
        for (int i = 0; i < 6000; ++i) {
            auto r = get(path);
            const auto state = r.body.value("state", "");
            if (state == "done" || state == "failed") return r;
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
        throw std::runtime_error("job did not finish: " + path);
    }

    /// Submits and waits; the settled job response.
    ApiResponse run(const std::string& path, const nlohmann::json& body = nlohmann::json::object()) {
        return await_job(post(path, body));
    }

private:
    static ApiResponse wrap(const httplib::Result& r) {
        if (!r) throw std::runtime_error("http request failed: " + httplib::to_string(r.error()));
        ApiResponse out;
        out.status = r->status;
        out.body = r->body.empty() ? nlohmann::json() : nlohmann::json::parse(r->body, nullptr, false);
        return out;
    }

    httplib::Client client_;
};

/// Pipeline with mock providers served on a loopback port.
struct ServedPipeline {
    TempDir dir;
    Store store{dir.path()};
    MockProviders mocks;
    Pipeline pipeline;
    JobRegistry jobs{2};
    ApiServer server{pipeline, jobs};
    int port = 0;

    static PipelineConfig fast_retries() {
        PipelineConfig c;
        c.retry.initial_backoff = std::chrono::milliseconds(1);
        return c;
    }

    explicit ServedPipeline(std::uint64_t seed = 0, PipelineConfig config = fast_retries())
        : mocks(make_mock_providers(seed)),
          pipeline(mocks.providers(), store, std::move(config), step_clock(fixed_time(), std::chrono::seconds(1))) {
        port = server.bind("127.0.0.1", 0);
        server.start();
    }
    ~ServedPipeline() {
        server.stop();
        jobs.drain();
    }
};

}  // namespace designflow::testing
