#include "designflow/persistence.hpp"

#include "designflow/domain_json.hpp"
#include "designflow/error.hpp"
#include "designflow/hashing.hpp"
#include "tar.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace designflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::not_found, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_suffix() {
    static std::atomic<std::uint64_t> counter{0};
    static const std::uint64_t salt = std::random_device{}();
    return ".tmp-" + std::to_string(salt) + "-" + std::to_string(counter++);
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + temp_suffix();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::storage_error, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(Errc::storage_error, "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

bool is_hex_hash(std::string_view s) {
    return s.size() == 64 &&
           std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

std::string session_document(const Session& session) {
    json body = session;
    json doc{{"digest", payload_digest(body)}, {"session", body}};
    return doc.dump(2) + "\n";
}

Session parse_session_document(std::string_view text, std::string_view origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::corrupt_record, std::string(origin) + ": unreadable session document: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("digest") || !doc.contains("session")) {
        throw Error(Errc::corrupt_record, std::string(origin) + ": session document lacks digest or body");
    }
    if (doc["digest"] != payload_digest(doc["session"])) {
        throw Error(Errc::corrupt_record, std::string(origin) + ": session digest mismatch");
    }
    try {
        return doc["session"].get<Session>();
    } catch (const json::exception& e) {
        throw Error(Errc::corrupt_record, std::string(origin) + ": malformed session: " + e.what());
    }
}

std::vector<EventRecord> parse_events(std::string_view text, std::string_view origin) {
    std::vector<EventRecord> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            throw Error(Errc::corrupt_record, std::string(origin) + ": event log ends mid-record");
        }
        ++line_no;
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        EventRecord rec;
        try {
            rec = json::parse(line).get<EventRecord>();
        } catch (const json::exception& e) {
            throw Error(Errc::corrupt_record,
                        std::string(origin) + ": bad event on line " + std::to_string(line_no) + ": " + e.what());
        }
        if (rec.payload_digest != payload_digest(rec.detail)) {
            throw Error(Errc::corrupt_record,
                        std::string(origin) + ": event digest mismatch on line " + std::to_string(line_no));
        }
        if (!out.empty() && rec.seq <= out.back().seq) {
            throw Error(Errc::corrupt_record, std::string(origin) + ": event seq not increasing");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::optional<SelectionSet> selection_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<SelectionSet>();
}

}  // namespace

// ---------------------------------------------------------------------------

std::string payload_digest(const json& detail) { return sha256_hex(detail.dump()); }

void to_json(json& j, const EventRecord& e) {
    j = json{{"seq", e.seq},
             {"timestamp", format_iso8601(e.timestamp)},
             {"session_id", e.session_id},
             {"kind", e.kind},
             {"payload_digest", e.payload_digest},
             {"detail", e.detail}};
    if (e.duration_ms) j["duration_ms"] = *e.duration_ms;
}

void from_json(const json& j, EventRecord& e) {
    e.seq = j.at("seq").get<std::uint64_t>();
    e.timestamp = parse_iso8601(j.at("timestamp").get<std::string>());
    e.session_id = j.at("session_id").get<SessionId>();
    e.kind = j.at("kind").get<std::string>();
    e.payload_digest = j.at("payload_digest").get<std::string>();
    e.detail = j.at("detail");
    e.duration_ms.reset();
    if (auto it = j.find("duration_ms"); it != j.end()) e.duration_ms = it->get<std::int64_t>();
}

ReplayState replay_events(std::span<const EventRecord> events) {
    ReplayState state;
    for (const auto& e : events) {
        const auto& d = e.detail;
        if (e.kind == event_kind::requirements_extracted) {
            state.requirement_entries += d.at("entries").size();
        } else if (e.kind == event_kind::requirement_added) {
            ++state.requirement_entries;
        } else if (e.kind == event_kind::requirement_deleted) {
            --state.requirement_entries;
        } else if (e.kind == event_kind::cards_created) {
            const auto type = element_type_from_key(d.at("type").get<std::string>());
            for (const auto& c : d.at("cards")) {
                const auto id = c.at("id").get<CardId>();
                state.revisions[id] = 0;
                if (type) state.card_types[id] = *type;
            }
        } else if (e.kind == event_kind::card_edited || e.kind == event_kind::preview_regenerated) {
            state.revisions[d.at("card_id").get<CardId>()] = d.at("revision").get<std::uint32_t>();
        } else if (e.kind == event_kind::card_deleted) {
            const auto id = d.at("card_id").get<CardId>();
            state.revisions.erase(id);
            state.card_types.erase(id);
        } else if (e.kind == event_kind::selection_changed) {
            state.selection = selection_from(d.at("selection"));
        } else if (e.kind == event_kind::design_generated) {
            ++state.history_length;
        } else if (e.kind == event_kind::session_closed) {
            state.closed = true;
        }
    }
    return state;
}

std::optional<std::string> replay_mismatch(const ReplayState& state, const Session& session) {
    std::map<CardId, std::uint32_t> stored;
    for (const auto& [type, cards] : session.element_cards) {
        for (const auto& c : cards) stored[c.id] = c.revision;
    }
    if (stored != state.revisions) {
        return "card revisions differ (replayed " + std::to_string(state.revisions.size()) + " cards, stored " +
               std::to_string(stored.size()) + ")";
    }
    const bool replayed_empty = !state.selection || state.selection->empty();
    const bool stored_empty = !session.selection || session.selection->empty();
    if (replayed_empty != stored_empty || (!replayed_empty && *state.selection != *session.selection)) {
        return "selection differs";
    }
    if (state.history_length != session.history.size()) {
        return "history length differs (replayed " + std::to_string(state.history_length) + ", stored " +
               std::to_string(session.history.size()) + ")";
    }
    if (state.requirement_entries != session.requirement_cards.size()) {
        return "requirement entry count differs";
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

std::string sniff_media_type(std::string_view bytes) {
    if (bytes.starts_with("\x89PNG\r\n\x1a\n")) return "image/png";
    if (bytes.starts_with("\xff\xd8\xff")) return "image/jpeg";
    if (bytes.starts_with("GIF8")) return "image/gif";
    if (bytes.size() >= 12 && bytes.substr(0, 4) == "RIFF" && bytes.substr(8, 4) == "WEBP") return "image/webp";
    if (bytes.starts_with("P6") || bytes.starts_with("P3")) return "image/x-portable-pixmap";
    return "application/octet-stream";
}

BlobRef MemoryBlobStore::put_blob(std::string_view bytes, std::string_view media_type) {
    BlobRef ref{sha256_hex(bytes), std::string(media_type), bytes.size()};
    std::lock_guard lock(mutex_);
    blobs_.try_emplace(ref.content_hash, bytes);
    return ref;
}

std::string MemoryBlobStore::get_blob(std::string_view content_hash) const {
    std::lock_guard lock(mutex_);
    auto it = blobs_.find(content_hash);
    if (it == blobs_.end()) {
        throw Error(Errc::image_not_found, "unknown blob: " + std::string(content_hash));
    }
    return it->second;
}

bool MemoryBlobStore::has_blob(std::string_view content_hash) const {
    std::lock_guard lock(mutex_);
    return blobs_.find(content_hash) != blobs_.end();
}

std::size_t MemoryBlobStore::size() const {
    std::lock_guard lock(mutex_);
    return blobs_.size();
}

std::vector<std::string> referenced_blobs(const Session& session) {
    std::set<std::string> hashes;
    for (const auto& [type, cards] : session.element_cards) {
        for (const auto& c : cards) {
            if (c.preview_ref) hashes.insert(c.preview_ref->content_hash);
        }
    }
    for (const auto& a : session.history) hashes.insert(a.image_ref.content_hash);
    return {hashes.begin(), hashes.end()};
}

// ---------------------------------------------------------------------------

Store::Store(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_ / "sessions");
    fs::create_directories(root_ / "blobs");
}

fs::path Store::session_dir(const SessionId& id) const {
    const auto& s = id.str();
    const bool safe = !s.empty() && s != "." && s != ".." &&
                      std::all_of(s.begin(), s.end(), [](char c) {
                          return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
                      });
    if (!safe) throw Error(Errc::invalid_argument, "invalid session id: " + s);
    return root_ / "sessions" / s;
}

fs::path Store::blob_path(std::string_view content_hash) const {
    if (!is_hex_hash(content_hash)) {
        throw Error(Errc::image_not_found, "not a content hash: " + std::string(content_hash));
    }
    return root_ / "blobs" / std::string(content_hash.substr(0, 2)) / std::string(content_hash);
}

void Store::save_session(const Session& session) {
    write_file_atomic(session_dir(session.id) / "session.json", session_document(session));
}

Session Store::load_session(const SessionId& id) const {
    const auto path = session_dir(id) / "session.json";
    if (!fs::exists(path)) {
        throw Error(Errc::session_not_found, "unknown session: " + id.str(), {{"session_id", id.str()}});
    }
    Session s = parse_session_document(read_file(path), path.string());
    if (s.id != id) throw Error(Errc::corrupt_record, path.string() + ": session id mismatch");
    return s;
}

bool Store::has_session(const SessionId& id) const {
    return fs::exists(session_dir(id) / "session.json");
}

std::vector<SessionId> Store::list_sessions() const {
    std::vector<SessionId> out;
    for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
        if (fs::exists(entry.path() / "session.json")) out.emplace_back(entry.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t Store::append_event(EventRecord record) {
    const auto dir = session_dir(record.session_id);
    std::lock_guard lock(events_mutex_);
    if (!fs::exists(dir / "session.json")) {
        throw Error(Errc::session_not_found, "cannot log events for unknown session " + record.session_id.str());
    }
    auto [it, inserted] = last_seq_.try_emplace(record.session_id, 0);
    if (inserted) {
        const auto path = dir / "events.jsonl";
        if (fs::exists(path)) {
            auto existing = parse_events(read_file(path), path.string());
            it->second = existing.empty() ? 0 : existing.back().seq;
        }
    }
    record.seq = ++it->second;
    if (record.timestamp == Timestamp{}) record.timestamp = now_utc();
    record.payload_digest = payload_digest(record.detail);
    std::ofstream out(dir / "events.jsonl", std::ios::binary | std::ios::app);
    if (!out) throw Error(Errc::storage_error, "cannot append to event log of " + record.session_id.str());
    out << json(record).dump() << '\n';
    out.flush();
    if (!out) throw Error(Errc::storage_error, "event append failed for " + record.session_id.str());
    return record.seq;
}

std::vector<EventRecord> Store::read_events(const SessionId& id) const {
    const auto path = session_dir(id) / "events.jsonl";
    if (!fs::exists(path)) {
        if (!has_session(id)) throw Error(Errc::session_not_found, "unknown session: " + id.str());
        return {};
    }
    std::lock_guard lock(events_mutex_);
    return parse_events(read_file(path), path.string());
}

BlobRef Store::put_blob(std::string_view bytes, std::string_view media_type) {
    BlobRef ref{sha256_hex(bytes), std::string(media_type), bytes.size()};
    const auto path = blob_path(ref.content_hash);
    if (!fs::exists(path)) write_file_atomic(path, bytes);
    return ref;
}

std::string Store::get_blob(std::string_view content_hash) const {
    const auto path = blob_path(content_hash);
    if (!fs::exists(path)) {
        throw Error(Errc::image_not_found, "unknown blob: " + std::string(content_hash));
    }
    return read_file(path);
}

bool Store::has_blob(std::string_view content_hash) const {
    return is_hex_hash(content_hash) && fs::exists(blob_path(content_hash));
}

void Store::export_bundle(const SessionId& id, const fs::path& path) const {
    const Session session = load_session(id);
    const auto dir = session_dir(id);
    std::vector<detail::TarEntry> entries;
    const std::string prefix = "sessions/" + id.str() + "/";
    entries.push_back({prefix + "session.json", read_file(dir / "session.json")});
    {
        std::lock_guard lock(events_mutex_);
        const auto events_path = dir / "events.jsonl";
        entries.push_back({prefix + "events.jsonl", fs::exists(events_path) ? read_file(events_path) : ""});
    }
    for (const auto& hash : referenced_blobs(session)) {
        if (!has_blob(hash)) {
            throw Error(Errc::missing_blob, "session " + id.str() + " references missing blob " + hash,
                        {{"content_hash", hash}});
        }
        entries.push_back({"blobs/" + hash.substr(0, 2) + "/" + hash, get_blob(hash)});
    }
    write_file_atomic(path, detail::write_tar(entries));
}

BundleContents read_bundle(const fs::path& path) {
    if (!fs::exists(path)) throw Error(Errc::not_found, "no such bundle: " + path.string());
    const auto entries = detail::read_tar(read_file(path));

    BundleContents out;
    std::optional<std::string> session_id;
    for (const auto& e : entries) {
        const fs::path p(e.path);
        std::vector<std::string> parts(p.begin(), p.end());
        if (parts.size() == 3 && parts[0] == "sessions") {
            if (session_id && *session_id != parts[1]) {
                throw Error(Errc::corrupt_record, "bundle holds more than one session");
            }
            session_id = parts[1];
            if (parts[2] == "session.json") out.session_file = e.data;
            else if (parts[2] == "events.jsonl") out.events_file = e.data;
        } else if (parts.size() == 3 && parts[0] == "blobs") {
            if (!is_hex_hash(parts[2]) || sha256_hex(e.data) != parts[2]) {
                throw Error(Errc::corrupt_record, "bundle blob does not match its hash: " + e.path);
            }
            out.blobs[parts[2]] = e.data;
        }
    }
    if (!session_id || out.session_file.empty()) {
        throw Error(Errc::corrupt_record, "bundle has no session document");
    }
    out.session = parse_session_document(out.session_file, path.string());
    if (out.session.id.str() != *session_id) {
        throw Error(Errc::corrupt_record, "bundle session id does not match its path");
    }
    out.events = parse_events(out.events_file, path.string());
    for (const auto& hash : referenced_blobs(out.session)) {
        if (!out.blobs.contains(hash)) {
            throw Error(Errc::missing_blob, "bundle lacks referenced blob " + hash, {{"content_hash", hash}});
        }
    }
    return out;
}

Session Store::import_bundle(const fs::path& path) {
    BundleContents bundle = read_bundle(path);
    const auto& id = bundle.session.id;
    if (has_session(id)) {
        throw Error(Errc::id_collision, "session " + id.str() + " already exists in this store",
                    {{"session_id", id.str()}});
    }
    for (const auto& [hash, bytes] : bundle.blobs) put_blob(bytes, sniff_media_type(bytes));
    const auto dir = session_dir(id);
    write_file_atomic(dir / "events.jsonl", bundle.events_file);
    write_file_atomic(dir / "session.json", bundle.session_file);
    {
        std::lock_guard lock(events_mutex_);
        last_seq_.erase(id);
    }
    return load_session(id);
}

}  // namespace designflow
