#pragma once

#include "designflow/domain.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace designflow {

// ---------------------------------------------------------------------------
// Event log

/// Kinds written by the pipeline. Replay understands the mutation kinds; the
/// provider-call kinds are informational.
namespace event_kind {
inline constexpr std::string_view session_opened = "session_opened";
inline constexpr std::string_view session_closed = "session_closed";
inline constexpr std::string_view render_prompt = "render_prompt";
inline constexpr std::string_view complete_structured = "complete_structured";
inline constexpr std::string_view generate_image = "generate_image";
inline constexpr std::string_view embed_text = "embed_text";
inline constexpr std::string_view embed_image = "embed_image";
inline constexpr std::string_view requirements_extracted = "requirements_extracted";
inline constexpr std::string_view requirements_recommended = "requirements_recommended";
inline constexpr std::string_view requirement_added = "requirement_added";
inline constexpr std::string_view requirement_edited = "requirement_edited";
inline constexpr std::string_view requirement_deleted = "requirement_deleted";
inline constexpr std::string_view cards_created = "cards_created";
inline constexpr std::string_view card_previewed = "card_previewed";
inline constexpr std::string_view card_failed = "card_failed";
inline constexpr std::string_view card_edited = "card_edited";
inline constexpr std::string_view preview_regenerated = "preview_regenerated";
inline constexpr std::string_view card_deleted = "card_deleted";
inline constexpr std::string_view selection_changed = "selection_changed";
inline constexpr std::string_view integrated_prompt_created = "integrated_prompt_created";
inline constexpr std::string_view design_generated = "design_generated";
inline constexpr std::string_view deliverable_context_changed = "deliverable_context_changed";
}  // namespace event_kind

struct EventRecord {
    std::uint64_t seq = 0;
    Timestamp timestamp{};
    SessionId session_id;
    std::string kind;
    std::string payload_digest;
    nlohmann::json detail = nlohmann::json::object();
    std::optional<std::int64_t> duration_ms;
};

/// SHA-256 over the canonical (sorted-key, compact) dump of `detail`.
std::string payload_digest(const nlohmann::json& detail);

void to_json(nlohmann::json& j, const EventRecord& e);
void from_json(const nlohmann::json& j, EventRecord& e);

/// Session state reconstructed by folding the event log.
struct ReplayState {
    std::map<CardId, std::uint32_t> revisions;  // live cards only
    std::map<CardId, ElementType> card_types;
    std::optional<SelectionSet> selection;
    std::size_t history_length = 0;
    std::size_t requirement_entries = 0;
    bool closed = false;
};

ReplayState replay_events(std::span<const EventRecord> events);

/// Compares a replayed state against a stored session; returns a description
/// of the first disagreement.
std::optional<std::string> replay_mismatch(const ReplayState& state, const Session& session);

// ---------------------------------------------------------------------------
// Blobs

struct BlobRef {
    std::string content_hash;
    std::string media_type;
    std::size_t size = 0;
};

/// Guesses a media type from magic bytes.
std::string sniff_media_type(std::string_view bytes);

/// Content-addressed byte storage; put is idempotent.
class BlobStore {
public:
    virtual ~BlobStore() = default;

    virtual BlobRef put_blob(std::string_view bytes, std::string_view media_type) = 0;
    /// Throws Errc::image_not_found for unknown hashes.
    virtual std::string get_blob(std::string_view content_hash) const = 0;
    virtual bool has_blob(std::string_view content_hash) const = 0;
};

class MemoryBlobStore final : public BlobStore {
public:
    BlobRef put_blob(std::string_view bytes, std::string_view media_type) override;
    std::string get_blob(std::string_view content_hash) const override;
    bool has_blob(std::string_view content_hash) const override;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::string, std::less<>> blobs_;
};

/// Every blob hash a session references (previews and final images).
std::vector<std::string> referenced_blobs(const Session& session);

// ---------------------------------------------------------------------------
// File-system store
//
//   <root>/sessions/<id>/session.json
//   <root>/sessions/<id>/events.jsonl
//   <root>/blobs/<hh>/<hash>

struct BundleContents {
    Session session;
    std::string session_file;
    std::string events_file;
    std::vector<EventRecord> events;
    std::map<std::string, std::string> blobs;  // hash -> bytes
};

/// Parses and verifies a bundle archive without touching any store.
BundleContents read_bundle(const std::filesystem::path& path);

class Store final : public BlobStore {
public:
    explicit Store(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    void save_session(const Session& session);
    /// Throws Errc::session_not_found or Errc::corrupt_record.
    Session load_session(const SessionId& id) const;
    bool has_session(const SessionId& id) const;
    std::vector<SessionId> list_sessions() const;

    /// Assigns seq, digest (and timestamp when unset). The session must exist.
    std::uint64_t append_event(EventRecord record);
    std::vector<EventRecord> read_events(const SessionId& id) const;

    BlobRef put_blob(std::string_view bytes, std::string_view media_type) override;
    std::string get_blob(std::string_view content_hash) const override;
    bool has_blob(std::string_view content_hash) const override;

    /// Single tar archive mirroring the store layout. Throws Errc::missing_blob.
    void export_bundle(const SessionId& id, const std::filesystem::path& path) const;
    /// Throws Errc::id_collision, Errc::missing_blob, Errc::corrupt_record.
    Session import_bundle(const std::filesystem::path& path);

private:
    std::filesystem::path session_dir(const SessionId& id) const;
    std::filesystem::path blob_path(std::string_view content_hash) const;

    std::filesystem::path root_;
    mutable std::mutex events_mutex_;
    std::map<SessionId, std::uint64_t> last_seq_;
};

}  // namespace designflow
