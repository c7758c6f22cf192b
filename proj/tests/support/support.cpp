#include "support.hpp"

#include "designflow/error.hpp"

#include <sys/wait.h>
#include <unistd.h>
#include <zlib.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace designflow::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "designflow-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

Clock step_clock(Timestamp start, std::chrono::milliseconds step) {
    auto ticks = std::make_shared<std::atomic<std::int64_t>>(0);
    return [=] { return start + step * ticks->fetch_add(1); };
}

Timestamp fixed_time() { return parse_iso8601("2025-03-07T09:00:00Z"); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

fs::path source_dir() { return DESIGNFLOW_SOURCE_DIR; }
fs::path cli_path() { return DESIGNFLOW_CLI_PATH; }

std::string brief(int index) {
    return read_file(source_dir() / "tests" / "fixtures" / "briefs" / ("t" + std::to_string(index) + ".txt"));
}

namespace {

std::uint32_t be32(std::string_view b, std::size_t at) {
    return (std::uint32_t(std::uint8_t(b[at])) << 24) | (std::uint32_t(std::uint8_t(b[at + 1])) << 16) |
           (std::uint32_t(std::uint8_t(b[at + 2])) << 8) | std::uint32_t(std::uint8_t(b[at + 3]));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    return pb <= pc ? b : c;
}

}  // namespace

DecodedPng decode_png(std::string_view bytes) {
    if (bytes.substr(0, 8) != std::string_view("\x89PNG\r\n\x1a\n", 8)) throw std::runtime_error("not a png");
    DecodedPng out;
    std::string idat;
    for (std::size_t at = 8; at + 12 <= bytes.size();) {
        const std::uint32_t len = be32(bytes, at);
        const std::string_view type = bytes.substr(at + 4, 4);
        const std::string_view data = bytes.substr(at + 8, len);
        const std::uint32_t crc = be32(bytes, at + 8 + len);
        const auto body = bytes.substr(at + 4, len + 4);
        if (crc32(0, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())) != crc) {
            throw std::runtime_error("bad chunk crc");
        }
        if (type == "IHDR") {
            out.width = static_cast<int>(be32(data, 0));
            out.height = static_cast<int>(be32(data, 4));
            if (data[8] != 8 || data[9] != 2 || data[12] != 0) throw std::runtime_error("unsupported png");
        } else if (type == "IDAT") {
            idat += data;
        } else if (type == "IEND") {
            break;
        }
        at += 12 + len;
    }
    const std::size_t stride = static_cast<std::size_t>(out.width) * 3;
    uLongf raw_len = static_cast<uLongf>((stride + 1) * static_cast<std::size_t>(out.height));
    std::string raw(raw_len, '\0');
    if (uncompress(reinterpret_cast<Bytef*>(raw.data()), &raw_len, reinterpret_cast<const Bytef*>(idat.data()),
                   static_cast<uLong>(idat.size())) != Z_OK ||
        raw_len != raw.size()) {
        throw std::runtime_error("bad idat stream");
    }
    out.rgb.assign(stride * static_cast<std::size_t>(out.height), '\0');
    auto px = [&](std::size_t y, std::size_t i) -> int {
        return std::uint8_t(out.rgb[y * stride + i]);
    };
    for (std::size_t y = 0; y < static_cast<std::size_t>(out.height); ++y) {
        const int filter = std::uint8_t(raw[y * (stride + 1)]);
        for (std::size_t i = 0; i < stride; ++i) {
            const int x = std::uint8_t(raw[y * (stride + 1) + 1 + i]);
            const int a = i >= 3 ? px(y, i - 3) : 0;
            const int b = y > 0 ? px(y - 1, i) : 0;
            const int c = (i >= 3 && y > 0) ? px(y - 1, i - 3) : 0;
            int v = 0;
            switch (filter) {
                case 0: v = x; break;
                case 1: v = x + a; break;
                case 2: v = x + b; break;
                case 3: v = x + (a + b) / 2; break;
                case 4: v = x + paeth(a, b, c); break;
                default: throw std::runtime_error("bad filter");
            }
            out.rgb[y * stride + i] = static_cast<char>(v & 0xff);
        }
    }
    return out;
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& argv) {
    TempDir tmp;
    std::string cmd;
    for (const auto& a : argv) cmd += shell_quote(a) + " ";
    cmd += "> " + shell_quote((tmp / "out").string()) + " 2> " + shell_quote((tmp / "err").string());
    const int status = std::system(cmd.c_str());
    CommandResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(tmp / "out");
    r.err = read_file(tmp / "err");
    return r;
}

// ---------------------------------------------------------------------------
// Snapshot contexts

RequirementCardSet snapshot_requirements() {
    RequirementCardSet set;
    auto add = [&](const char* id, RequirementField f, const char* text) {
        RequirementEntry e;
        e.id = EntryId(id);
        e.field = f;
        e.text = text;
        set.add(e);
    };
    add("req-1", RequirementField::DeliverableFormat, "Poster");
    add("req-2", RequirementField::TargetAudience, "University  students");
    add("req-3", RequirementField::TargetAudience, "Young professionals");
    return set;
}

namespace {

ElementCard card(const char* id, ElementType type, const char* rough, const char* enhanced = nullptr) {
    ElementCard c;
    c.id = CardId(id);
    c.type = type;
    c.rough_prompt = rough;
    if (enhanced) c.enhanced_prompt = enhanced;
    return c;
}

}  // namespace

RenderedPrompt snapshot_render(PromptTemplateKind kind) {
    switch (kind) {
        case PromptTemplateKind::RequirementExtractor: {
            std::vector<FieldDescription> fds;
            for (auto f : kRequirementFields) {
                fds.push_back({f, std::string(label(f)), "what " + std::string(key(f)) + " covers"});
            }
            std::reverse(fds.begin(), fds.end());  // order of the input list must not matter
            return render_requirement_extractor("en", fds, "Spring poster for a neighbourhood bakery.");
        }
        case PromptTemplateKind::RequirementRecommender:
            return render_requirement_recommender(3, "ko", snapshot_requirements(), RequirementField::TargetAudience,
                                                  "Who the design speaks to");
        case PromptTemplateKind::ElementRecommender: {
            using namespace std::chrono;
            const std::vector<std::string> existing = {"Bold serif\nheadings", "Clean sans body"};
            return render_element_recommender(ElementType::Typography, 4, "en", year{2025} / March / 7,
                                              snapshot_requirements(), existing);
        }
        case PromptTemplateKind::EnhanceObject:
            return render_enhancer(kind, "  A red apple ", {});
        case PromptTemplateKind::EnhanceBackground: {
            EnhancerContext ctx;
            ctx.output_language = "ja";
            return render_enhancer(kind, "Soft gradient", ctx);
        }
        case PromptTemplateKind::EnhanceTypography:
            return render_enhancer(kind, "Bold sans", {});
        case PromptTemplateKind::EnhanceComposition: {
            EnhancerContext ctx;
            ctx.deliverable_format = "poster";
            ctx.orientation = Orientation::landscape;
            return render_enhancer(kind, "Hero image on top\r\ntext below", ctx);
        }
        case PromptTemplateKind::DesignIntegrator: {
            ValidatedSelection v;
            v.composition = card("el-1", ElementType::Composition, "Hero image on top\ntext below");
            v.background = card("el-2", ElementType::Background, "peach", "Soft peach gradient with grain");
            v.texts = {card("el-3", ElementType::Text, "Headline:  Big Spring Sale "),
                       card("el-4", ElementType::Text, "Call to Action: Visit us today")};
            v.typography = card("el-5", ElementType::Typography, "Bold sans headings");
            v.object = card("el-6", ElementType::Object, "apple", "A glossy red apple on a white plinth");
            return render_integrator(v, "en");
        }
    }
    throw std::logic_error("unknown template kind");
}

}  // namespace designflow::testing
