#include "designflow/mock_providers.hpp"

#include "designflow/error.hpp"
#include "designflow/hashing.hpp"
#include "designflow/text.hpp"

#include <zlib.h>

#include <cmath>
#include <sstream>

namespace designflow {

using nlohmann::json;

namespace {

void raise_faults(const MockFaults& f) {
    if (f.timeout.load()) throw Error(Errc::timeout, "mock provider timed out");
    if (f.transport_error.load()) throw Error(Errc::transport_error, "mock provider transport failure");
}

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    for (std::string w; in >> w;) out.push_back(std::move(w));
    return out;
}

std::string join_words(const std::vector<std::string>& ws, std::size_t limit) {
    std::string out;
    for (std::size_t i = 0; i < ws.size() && i < limit; ++i) {
        if (i) out += ' ';
        out += ws[i];
    }
    return out;
}

std::string var(const RenderedPrompt& p, const std::string& name) {
    auto it = p.variables_used.find(name);
    return it == p.variables_used.end() ? std::string{} : it->second;
}

std::vector<std::string> sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        std::string s = trim(cur);
        while (!s.empty() && (s.front() == '"' || s.front() == '\'')) s.erase(0, 1);
        while (!s.empty() && (s.back() == '"' || s.back() == '\'')) s.pop_back();
        s = trim(s);
        if (!s.empty()) out.push_back(std::move(s));
        cur.clear();
    };
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?' || c == '\n') {
            flush();
        } else {
            cur += c;
        }
    }
    flush();
    return out;
}

json extracted(const RenderedPrompt& p) {
    json out = json::object();
    for (auto f : kRequirementFields) out[std::string(key(f))] = json::array();
    const auto ss = sentences(var(p, "user_input"));
    for (std::size_t j = 0; j < ss.size(); ++j) {
        const auto f = kRequirementFields[j % kRequirementFields.size()];
        out[std::string(key(f))].push_back(join_words(words(ss[j]), 12));
    }
    return out;
}

std::string initials(std::string_view k) {
    std::string out;
    bool start = true;
    for (char c : k) {
        if (c == '_') {
            start = true;
        } else if (start) {
            out += c;
            start = false;
        }
    }
    return out;
}

std::optional<RequirementField> field_from_label(std::string_view l) {
    for (auto f : kRequirementFields) {
        if (label(f) == l) return f;
    }
    return std::nullopt;
}

json requirement_candidates(const RenderedPrompt& p, const StructuredSchema& schema, std::uint64_t seed) {
    const auto field = field_from_label(var(p, "target_field")).value_or(RequirementField::DeliverableFormat);
    json list = json::array();
    for (std::size_t i = 1; i <= schema.expected_count; ++i) {
        list.push_back({{"value", "mock-" + initials(key(field)) + "-" + std::to_string(i)},
                        {"reasoning", "mock reasoning (seed " + std::to_string(seed) + ")"},
                        {"influencing_fields", {key(field)}}});
    }
    return {{"candidates", list}};
}

std::size_t count_listed(std::string_view block) {
    std::size_t n = 0;
    std::istringstream in{std::string(block)};
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("- ", 0) == 0) ++n;
    }
    return n;
}

std::string requirements_digest(std::string_view requirements_text) {
    std::string joined;
    std::istringstream in{std::string(requirements_text)};
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("- ", 0) == 0) joined += line.substr(2) + ' ';
    }
    auto ws = words(joined);
    if (ws.empty()) return "no stated requirements";
    return join_words(ws, 6);
}

constexpr std::array<std::string_view, 5> kTextRoles = {"Headline", "Subheadline", "Body",
                                                        "Call to Action", "Details"};

json element_candidates(const RenderedPrompt& p, const StructuredSchema& schema, std::uint64_t seed) {
    const auto type = schema.element_type.value_or(
        element_type_from_label(var(p, "element_type")).value_or(ElementType::Object));
    const std::size_t offset = count_listed(var(p, "predetermined_section"));
    const std::string digest = requirements_digest(var(p, "requirements_text"));
    json list = json::array();
    for (std::size_t i = 1; i <= schema.expected_count; ++i) {
        const std::size_t n = offset + i;
        std::string value;
        if (type == ElementType::Text) {
            value = std::string(kTextRoles[(n - 1) % kTextRoles.size()]) + ": mock-text-" +
                    std::to_string(n) + " " + digest;
        } else {
            value = "mock-" + std::string(key(type)) + "-" + std::to_string(n) + ": " + digest;
        }
        list.push_back({{"value", value},
                        {"reasoning", "mock reasoning (seed " + std::to_string(seed) + ")"},
                        {"influencing_fields", json::array({"creative_direction"})}});
    }
    return {{"element_type", label(type)}, {"candidates", list}};
}

std::string integrated(std::string_view selected_elements) {
    std::vector<std::string> sections;
    std::istringstream in{std::string(selected_elements)};
    for (std::string line; std::getline(in, line);) {
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("- ", 0) == 0 && !sections.empty()) {
            sections.back() += ' ' + line;
        } else {
            sections.push_back(line);
        }
    }
    std::string out;
    for (const auto& s : sections) {
        if (!out.empty()) out += " | ";
        out += s;
    }
    return out;
}

}  // namespace

json MockChatProvider::complete(const RenderedPrompt& prompt, const StructuredSchema& schema,
                                std::string_view) {
    ++calls_;
    raise_faults(faults_);
    if (faults_.schema_violation.load()) return {{"unexpected", true}};
    switch (schema.id) {
        case SchemaId::ExtractedRequirements: return extracted(prompt);
        case SchemaId::RequirementCandidates: return requirement_candidates(prompt, schema, seed_);
        case SchemaId::ElementCandidates: return element_candidates(prompt, schema, seed_);
        case SchemaId::EnhancedLine:
            return {{"text", "ENHANCED[" + std::string(to_string(prompt.kind)) +
                                 "]: " + trim(collapse_newlines(var(prompt, "rough_prompt")))}};
        case SchemaId::IntegratedParagraph:
            return {{"text", integrated(var(prompt, "selected_elements"))}};
    }
    return json::object();
}

// ---------------------------------------------------------------------------
// Images

std::string MockImageProvider::pixel_seed(std::uint64_t seed, std::uint64_t nonce, ImageSize size,
                                          std::string_view prompt) {
    std::string material = "mock-image|" + std::to_string(seed) + "|" + std::to_string(nonce) + "|" +
                           std::to_string(size.width) + "x" + std::to_string(size.height) + "|";
    material += prompt;
    return sha256_raw(material);
}

std::array<std::uint8_t, 3> MockImageProvider::cell_colour(std::string_view digest, int cell) {
    auto at = [&](int i) { return static_cast<std::uint8_t>(digest[static_cast<std::size_t>(i % 32)]); };
    const std::uint8_t flip = cell >= 32 ? 0xff : 0x00;
    return {static_cast<std::uint8_t>(at(cell) ^ flip), static_cast<std::uint8_t>(at(cell + 11) ^ flip),
            static_cast<std::uint8_t>(at(cell + 23) ^ flip)};
}

GeneratedImage MockImageProvider::generate(std::string_view prompt, ImageSize size, std::uint64_t nonce) {
    ++calls_;
    raise_faults(faults_);
    if (size.width <= 0 || size.height <= 0) {
        throw Error(Errc::invalid_argument, "image dimensions must be positive");
    }
    const std::string digest = pixel_seed(seed_, nonce, size, prompt);
    const auto w = static_cast<std::size_t>(size.width);
    const auto h = static_cast<std::size_t>(size.height);
    std::string rgb(w * h * 3, '\0');
    std::array<std::array<std::uint8_t, 3>, 64> palette{};
    for (int c = 0; c < 64; ++c) palette[static_cast<std::size_t>(c)] = cell_colour(digest, c);
    for (std::size_t y = 0; y < h; ++y) {
        const std::size_t cy = y * 8 / h;
        for (std::size_t x = 0; x < w; ++x) {
            const auto& col = palette[cy * 8 + x * 8 / w];
            char* px = rgb.data() + (y * w + x) * 3;
            px[0] = static_cast<char>(col[0]);
            px[1] = static_cast<char>(col[1]);
            px[2] = static_cast<char>(col[2]);
        }
    }
    return GeneratedImage{encode_png_rgb(size.width, size.height, rgb), "image/png", size.width,
                          size.height};
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    out += static_cast<char>((v >> 24) & 0xff);
    out += static_cast<char>((v >> 16) & 0xff);
    out += static_cast<char>((v >> 8) & 0xff);
    out += static_cast<char>(v & 0xff);
}

void put_chunk(std::string& out, std::string_view type, std::string_view data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type);
    body += data;
    out += body;
    put_u32(out, static_cast<std::uint32_t>(
                     crc32(0, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
}

}  // namespace

std::string encode_png_rgb(int width, int height, std::string_view rgb) {
    if (width <= 0 || height <= 0) throw Error(Errc::invalid_argument, "png dimensions must be positive");
    const auto stride = static_cast<std::size_t>(width) * 3;
    if (rgb.size() != stride * static_cast<std::size_t>(height)) {
        throw Error(Errc::invalid_argument, "pixel buffer does not match png dimensions");
    }
    // Row 0 unfiltered, later rows use the Up filter (cheap and effective on flat cells).
    std::string raw;
    raw.reserve((stride + 1) * static_cast<std::size_t>(height));
    for (std::size_t y = 0; y < static_cast<std::size_t>(height); ++y) {
        const char* row = rgb.data() + y * stride;
        if (y == 0) {
            raw += '\0';
            raw.append(row, stride);
            continue;
        }
        raw += '\2';
        const char* prev = row - stride;
        for (std::size_t i = 0; i < stride; ++i) {
            raw += static_cast<char>(static_cast<std::uint8_t>(row[i]) - static_cast<std::uint8_t>(prev[i]));
        }
    }
    uLongf cap = compressBound(static_cast<uLong>(raw.size()));
    std::string z(cap, '\0');
    if (compress2(reinterpret_cast<Bytef*>(z.data()), &cap, reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 6) != Z_OK) {
        throw Error(Errc::storage_error, "png compression failed");
    }
    z.resize(cap);

    std::string ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr += '\x08';  // bit depth
    ihdr += '\x02';  // truecolour
    ihdr += std::string(3, '\0');

    std::string out("\x89PNG\r\n\x1a\n", 8);
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", z);
    put_chunk(out, "IEND", {});
    return out;
}

// ---------------------------------------------------------------------------
// Embeddings

EmbeddingVector MockEmbedder::embed_text(std::string_view text) {
    raise_faults(faults_);
    std::vector<double> buckets(kDimension, 0.0);
    const auto ws = words(text);
    if (ws.empty()) throw Error(Errc::invalid_argument, "text to embed has no tokens");
    for (const auto& w : ws) buckets[fnv1a64(w) % kDimension] += 1.0;
    return EmbeddingVector(std::move(buckets));
}

EmbeddingVector MockEmbedder::embed_image(std::string_view image_bytes) {
    raise_faults(faults_);
    if (image_bytes.empty()) throw Error(Errc::invalid_argument, "image to embed is empty");
    std::vector<double> buckets(kDimension, 0.0);
    for (unsigned char c : image_bytes) buckets[c >> 2] += 1.0;
    return EmbeddingVector(std::move(buckets));
}

MockProviders make_mock_providers(std::uint64_t seed) {
    return MockProviders{std::make_shared<MockChatProvider>(seed), std::make_shared<MockImageProvider>(seed),
                         std::make_shared<MockEmbedder>()};
}

}  // namespace designflow
