#pragma once

#include "designflow/analytics.hpp"
#include "designflow/error.hpp"
#include "designflow/pipeline.hpp"
#include "designflow/providers.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace designflow {

// ---------------------------------------------------------------------------
// Errors on the wire

/// HTTP status for an error code: 404 unknown ids, 409 state conflicts,
/// 422 validation, 502 provider failures, 400 malformed requests.
int http_status(Errc code) noexcept;

/// {"error": {"code", "message", "details"}}
nlohmann::json error_body(const Error& e);

// ---------------------------------------------------------------------------
// Jobs

enum class JobKind { extract, recommend_requirements, recommend_elements, enhance_preview, integrate, regenerate_design };
enum class JobState { queued, running, done, failed };

std::string_view to_string(JobKind kind) noexcept;
std::string_view to_string(JobState state) noexcept;

struct JobError {
    Errc code = Errc::invalid_argument;
    std::string message;
    nlohmann::json details;
};

struct Job {
    std::string id;
    JobKind kind = JobKind::extract;
    SessionId session_id;
    JobState state = JobState::queued;
    nlohmann::json result;
    std::optional<JobError> error;
};

void to_json(nlohmann::json& j, const Job& job);

/// Bounded worker pool running queued jobs in submission order.
class JobRegistry {
public:
    explicit JobRegistry(std::size_t workers = 4);
    ~JobRegistry();

    JobRegistry(const JobRegistry&) = delete;
    JobRegistry& operator=(const JobRegistry&) = delete;

    Job submit(JobKind kind, SessionId session, std::function<nlohmann::json()> work);
    /// Throws Errc::job_not_found.
    Job get(const std::string& id) const;
    /// Waits until the job is done or failed (or the timeout passes).
    Job wait(const std::string& id, std::chrono::milliseconds timeout = std::chrono::minutes(5)) const;
    /// Waits until nothing is queued or running.
    void drain() const;

private:
    void work(std::stop_token stop);

    mutable std::mutex mutex_;
    mutable std::condition_variable_any changed_;
    std::map<std::string, Job> jobs_;
    std::deque<std::pair<std::string, std::function<nlohmann::json()>>> queue_;
    std::size_t running_ = 0;
    std::uint64_t next_ = 1;
    std::vector<std::jthread> workers_;
};

// ---------------------------------------------------------------------------
// Configuration

struct ServiceConfig {
    std::filesystem::path root = "designflow-data";
    ProviderSettings providers;
    PipelineConfig pipeline;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t workers = 4;
};

/// Reads <root>/config (JSON, optional) and the B2D_* environment.
ServiceConfig load_service_config(const std::filesystem::path& root, const EnvLookup& env = process_env);

// ---------------------------------------------------------------------------
// HTTP API

class ApiServer {
public:
    ApiServer(Pipeline& pipeline, JobRegistry& jobs);
    ~ApiServer();

    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds the socket; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves on the calling thread until stop().
    void listen();
    /// Serves on a background thread.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Batch helpers behind the command line tool

struct BatchResult {
    Session session;
    std::optional<std::filesystem::path> bundle;
};

/// run_auto, then export of the session bundle when `bundle` is given.
BatchResult run_batch(Pipeline& pipeline, std::string_view brief_text, const AutoRunOptions& options,
                      const std::optional<std::filesystem::path>& bundle);

/// One item per regular file, in file name order; ids are the file names.
/// Prompts are read from *.txt files, images from png/jpeg/gif/webp files.
DiversityReport analyze_prompt_dir(const std::filesystem::path& dir, Embedder& embedder);
DiversityReport analyze_image_dir(const std::filesystem::path& dir, Embedder& embedder);

struct ReplaySummary {
    SessionId session_id;
    std::size_t event_count = 0;
    ReplayState state;
    std::size_t stored_history_length = 0;
    std::optional<std::string> mismatch;
};

void to_json(nlohmann::json& j, const ReplaySummary& s);

ReplaySummary replay_bundle(const std::filesystem::path& bundle);

}  // namespace designflow
