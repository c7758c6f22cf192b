#pragma once

// Minimal POSIX ustar reader/writer for session bundles: regular files only,
// paths up to 100 bytes, zeroed owner and mtime so archives are reproducible.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace designflow::detail {

struct TarEntry {
    std::string path;
    std::string data;
};

std::string write_tar(std::span<const TarEntry> entries);

/// Throws Errc::corrupt_record on malformed archives.
std::vector<TarEntry> read_tar(std::string_view archive);

}  // namespace designflow::detail
