#include "designflow/service.hpp"

namespace designflow {

using nlohmann::json;

int http_status(Errc code) noexcept {
    switch (code) {
        case Errc::session_not_found:
        case Errc::job_not_found:
        case Errc::image_not_found:
        case Errc::unknown_card:
        case Errc::unknown_entry:
        case Errc::not_found:
            return 404;
        case Errc::missing_composition:
        case Errc::no_text:
        case Errc::not_selected:
        case Errc::invalid_state:
        case Errc::no_prior_design:
        case Errc::duplicate_entry:
        case Errc::id_collision:
            return 409;
        case Errc::invalid_argument:
        case Errc::no_colon:
        case Errc::empty_part:
        case Errc::empty_after_trim:
        case Errc::empty_brief:
        case Errc::invalid_text_format:
        case Errc::type_mismatch:
        case Errc::duplicate_selection:
        case Errc::missing_field:
        case Errc::missing_context:
        case Errc::unsupported_for_text:
        case Errc::dimension_mismatch:
        case Errc::too_few_items:
            return 422;
        case Errc::bad_request:
            return 400;
        case Errc::timeout:
        case Errc::schema_violation:
        case Errc::transport_error:
            return 502;
        case Errc::missing_variable:
        case Errc::corrupt_record:
        case Errc::missing_blob:
        case Errc::storage_error:
            return 500;
    }
    return 500;
}

json error_body(const Error& e) {
    return {{"error", {{"code", code_name(e.code())}, {"message", e.what()}, {"details", e.details()}}}};
}

std::string_view to_string(JobKind kind) noexcept {
    switch (kind) {
        case JobKind::extract: return "extract";
        case JobKind::recommend_requirements: return "recommend_requirements";
        case JobKind::recommend_elements: return "recommend_elements";
        case JobKind::enhance_preview: return "enhance_preview";
        case JobKind::integrate: return "integrate";
        case JobKind::regenerate_design: return "regenerate_design";
    }
    return "unknown";
}

std::string_view to_string(JobState state) noexcept {
    switch (state) {
        case JobState::queued: return "queued";
        case JobState::running: return "running";
        case JobState::done: return "done";
        case JobState::failed: return "failed";
    }
    return "unknown";
}

void to_json(json& j, const Job& job) {
    j = {{"job_id", job.id},
         {"kind", to_string(job.kind)},
         {"session_id", job.session_id},
         {"state", to_string(job.state)},
         {"result", job.result},
         {"error", nullptr}};
    if (job.error) {
        j["error"] = {{"code", code_name(job.error->code)},
                      {"message", job.error->message},
                      {"details", job.error->details},
                      {"status", http_status(job.error->code)}};
    }
}

JobRegistry::JobRegistry(std::size_t workers) {
    if (workers == 0) throw Error(Errc::invalid_argument, "job registry needs at least one worker");
    workers_.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) {
        workers_.emplace_back([this](std::stop_token st) { work(st); });
    }
}

JobRegistry::~JobRegistry() {
    for (auto& w : workers_) w.request_stop();
    changed_.notify_all();
    workers_.clear();
}

Job JobRegistry::submit(JobKind kind, SessionId session, std::function<json()> fn) {
    std::lock_guard lock(mutex_);
    Job job;
    job.id = "job-" + std::to_string(next_++);
    job.kind = kind;
    job.session_id = std::move(session);
    jobs_[job.id] = job;
    queue_.emplace_back(job.id, std::move(fn));
    changed_.notify_all();
    return job;
}

Job JobRegistry::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(Errc::job_not_found, "unknown job: " + id, {{"job_id", id}});
    return it->second;
}

Job JobRegistry::wait(const std::string& id, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(Errc::job_not_found, "unknown job: " + id, {{"job_id", id}});
    changed_.wait_for(lock, timeout, [&] {
        return it->second.state == JobState::done || it->second.state == JobState::failed;
    });
    return it->second;
}

void JobRegistry::drain() const {
    std::unique_lock lock(mutex_);
    changed_.wait(lock, [&] { return queue_.empty() && running_ == 0; });
}

void JobRegistry::work(std::stop_token stop) {
    while (true) {
        std::pair<std::string, std::function<json()>> item;
        {
            std::unique_lock lock(mutex_);
            if (!changed_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
            item = std::move(queue_.front());
            queue_.pop_front();
            jobs_[item.first].state = JobState::running;
            ++running_;
        }
        json result;
        std::optional<JobError> error;
        try {
            result = item.second();
        } catch (const Error& e) {
            error = JobError{e.code(), e.what(), e.details()};
        } catch (const std::exception& e) {
            error = JobError{Errc::storage_error, e.what(), nullptr};
        }
        {
            std::lock_guard lock(mutex_);
            auto& job = jobs_[item.first];
            job.state = error ? JobState::failed : JobState::done;
            job.result = std::move(result);
            job.error = std::move(error);
            --running_;
        }
        changed_.notify_all();
    }
}

}  // namespace designflow
