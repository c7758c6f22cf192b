#include "tar.hpp"

#include "designflow/error.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>

namespace designflow::detail {

namespace {

constexpr std::size_t kBlock = 512;

void put_octal(char* dst, std::size_t width, std::uint64_t value) {
    // width includes the terminating NUL
    std::snprintf(dst, width, "%0*llo", static_cast<int>(width - 1),
                  static_cast<unsigned long long>(value));
}

std::uint64_t get_octal(const char* src, std::size_t width) {
    std::uint64_t v = 0;
    std::size_t i = 0;
    while (i < width && (src[i] == ' ' || src[i] == '\0')) ++i;
    for (; i < width && src[i] >= '0' && src[i] <= '7'; ++i) v = v * 8 + static_cast<unsigned>(src[i] - '0');
    return v;
}

unsigned header_checksum(const std::array<char, kBlock>& h) {
    unsigned sum = 0;
    for (std::size_t i = 0; i < kBlock; ++i) {
        const bool in_chksum = i >= 148 && i < 156;
        sum += in_chksum ? static_cast<unsigned>(' ') : static_cast<unsigned char>(h[i]);
    }
    return sum;
}

}  // namespace

std::string write_tar(std::span<const TarEntry> entries) {
    std::string out;
    for (const auto& e : entries) {
        if (e.path.empty() || e.path.size() >= 100) {
            throw Error(Errc::invalid_argument, "tar path must be 1..99 bytes: " + e.path);
        }
        std::array<char, kBlock> h{};
        std::memcpy(h.data(), e.path.data(), e.path.size());
        put_octal(h.data() + 100, 8, 0644);
        put_octal(h.data() + 108, 8, 0);
        put_octal(h.data() + 116, 8, 0);
        put_octal(h.data() + 124, 12, e.data.size());
        put_octal(h.data() + 136, 12, 0);
        h[156] = '0';
        std::memcpy(h.data() + 257, "ustar", 6);
        h[263] = '0';
        h[264] = '0';
        std::snprintf(h.data() + 148, 8, "%06o", header_checksum(h));
        h[155] = ' ';
        out.append(h.data(), kBlock);
        out.append(e.data);
        out.append((kBlock - e.data.size() % kBlock) % kBlock, '\0');
    }
    out.append(2 * kBlock, '\0');
    return out;
}

std::vector<TarEntry> read_tar(std::string_view archive) {
    std::vector<TarEntry> out;
    std::size_t pos = 0;
    while (true) {
        if (pos + kBlock > archive.size()) {
            throw Error(Errc::corrupt_record, "bundle archive is truncated");
        }
        std::array<char, kBlock> h{};
        std::memcpy(h.data(), archive.data() + pos, kBlock);
        if (std::all_of(h.begin(), h.end(), [](char c) { return c == '\0'; })) break;
        if (get_octal(h.data() + 148, 8) != header_checksum(h)) {
            throw Error(Errc::corrupt_record, "bundle archive header checksum mismatch");
        }
        const std::size_t size = get_octal(h.data() + 124, 12);
        const char type = h[156];
        pos += kBlock;
        if (pos + size > archive.size()) {
            throw Error(Errc::corrupt_record, "bundle archive entry is truncated");
        }
        if (type == '0' || type == '\0') {
            TarEntry e;
            e.path.assign(h.data(), strnlen(h.data(), 100));
            e.data.assign(archive.substr(pos, size));
            out.push_back(std::move(e));
        }
        pos += size + (kBlock - size % kBlock) % kBlock;
    }
    return out;
}

}  // namespace designflow::detail
