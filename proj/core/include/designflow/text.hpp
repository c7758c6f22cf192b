#pragma once

#include <string>
#include <string_view>

namespace designflow {

struct TextEntry {
    std::string role;
    std::string content;

    friend bool operator==(const TextEntry&, const TextEntry&) = default;
};

std::string trim(std::string_view s);

/// Splits "Role: content" at the first colon. Throws Errc::no_colon or
/// Errc::empty_part.
TextEntry parse_text_entry(std::string_view raw);

std::string format_text_entry(const TextEntry& entry);

/// Collapses whitespace runs to single spaces and trims; casing is kept.
/// Throws Errc::empty_after_trim when nothing is left.
std::string normalize_entry_text(std::string_view raw);

/// Equality key for requirement entries: normalized and ASCII case-folded.
std::string dedup_key(std::string_view raw);

/// Replaces every run of CR/LF characters with a single space.
std::string collapse_newlines(std::string_view s);

}  // namespace designflow
