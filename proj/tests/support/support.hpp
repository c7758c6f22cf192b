#pragma once

#include "designflow/domain.hpp"
#include "designflow/prompts.hpp"
#include "designflow/timestamp.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace designflow::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Clock starting at `start` that advances `step` on every call.
Clock step_clock(Timestamp start, std::chrono::milliseconds step);

Timestamp fixed_time();  // 2025-03-07T09:00:00Z

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view bytes);

std::filesystem::path source_dir();
std::filesystem::path cli_path();

/// Brief fixture t1..t4.
std::string brief(int index);

struct DecodedPng {
    int width = 0;
    int height = 0;
    std::string rgb;  // packed rows
};

/// Minimal decoder for 8-bit truecolour, non-interlaced PNG (all five filters).
DecodedPng decode_png(std::string_view bytes);

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the command through /bin/sh, capturing stdout and stderr.
CommandResult run_command(const std::vector<std::string>& argv);

// Fixed contexts for the rendered-template snapshots (mirrored by
// tests/snapshots/render_oracle.py).
RenderedPrompt snapshot_render(PromptTemplateKind kind);
RequirementCardSet snapshot_requirements();

}  // namespace designflow::testing
