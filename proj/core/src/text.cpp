#include "designflow/text.hpp"

#include "designflow/error.hpp"

#include <cctype>

namespace designflow {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && is_space(s[begin])) ++begin;
    while (end > begin && is_space(s[end - 1])) --end;
    return std::string(s.substr(begin, end - begin));
}

TextEntry parse_text_entry(std::string_view raw) {
    const auto colon = raw.find(':');
    if (colon == std::string_view::npos) {
        throw Error(Errc::no_colon, "text entry has no ':' separator: \"" + std::string(raw) + "\"");
    }
    TextEntry entry{trim(raw.substr(0, colon)), trim(raw.substr(colon + 1))};
    if (entry.role.empty() || entry.content.empty()) {
        throw Error(Errc::empty_part, "text entry needs both a role and content: \"" +
                                          std::string(raw) + "\"");
    }
    return entry;
}

std::string format_text_entry(const TextEntry& entry) {
    return entry.role + ": " + entry.content;
}

std::string normalize_entry_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    if (out.empty()) {
        throw Error(Errc::empty_after_trim, "entry text is empty after trimming");
    }
    return out;
}

std::string dedup_key(std::string_view raw) {
    std::string key = normalize_entry_text(raw);
    for (char& c : key) {
        // ASCII-only folding; other scripts compare byte-wise.
        if (static_cast<unsigned char>(c) < 0x80) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    return key;
}

std::string collapse_newlines(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_run = false;
    for (char c : s) {
        if (c == '\n' || c == '\r') {
            if (!in_run) out.push_back(' ');
            in_run = true;
        } else {
            out.push_back(c);
            in_run = false;
        }
    }
    return out;
}

}  // namespace designflow
