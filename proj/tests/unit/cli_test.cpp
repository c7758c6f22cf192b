#include "designflow/mock_providers.hpp"

#include "support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace designflow;
using namespace designflow::testing;
using nlohmann::json;

namespace {

std::string brief_path(int i) {
    return (source_dir() / "tests" / "fixtures" / "briefs" / ("t" + std::to_string(i) + ".txt")).string();
}

CommandResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), cli_path().string());
    return run_command(args);
}

}  // namespace

TEST(Cli, AutoRunIsRepeatable) {
    TempDir dir;
    const auto a = cli({"run", "--brief", brief_path(1), "--auto", "--seed", "7", "--out", (dir / "a.tar").string()});
    const auto b = cli({"run", "--brief", brief_path(1), "--auto", "--seed", "7", "--out", (dir / "b.tar").string()});
    ASSERT_EQ(a.exit_code, 0) << a.err;
    ASSERT_EQ(b.exit_code, 0) << b.err;
    auto ja = json::parse(a.out);
    auto jb = json::parse(b.out);
    EXPECT_EQ(ja["artifacts"], 1);
    EXPECT_EQ(ja["element_cards"], 5);
    EXPECT_EQ(ja["image_hashes"].size(), 1u);
    ja.erase("bundle");
    jb.erase("bundle");
    EXPECT_EQ(ja, jb);

    const auto r = cli({"replay", (dir / "a.tar").string()});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["consistent"], true);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli({}).exit_code, 2);
    EXPECT_EQ(cli({"paint"}).exit_code, 2);
    const auto r = cli({"run", "--brief", brief_path(1)});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("--auto"), std::string::npos);
    EXPECT_EQ(cli({"run", "--brief", "/nonexistent/brief.txt", "--auto"}).exit_code, 2);
    EXPECT_EQ(cli({"run", "--brief", brief_path(1), "--auto", "--orientation", "tilted"}).exit_code, 3);
}

TEST(Cli, AnalyzeDirectories) {
    TempDir dir;
    write_file(dir / "p" / "a.txt", "Moody neon alley at night");
    auto r = cli({"analyze", "prompts", (dir / "p").string()});
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.err.find("error: too_few_items"), std::string::npos);

    write_file(dir / "p" / "b.txt", "Bright pastel spring garden");
    r = cli({"analyze", "prompts", (dir / "p").string(), "--out", (dir / "report.json").string()});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto report = json::parse(read_file(dir / "report.json"));
    EXPECT_EQ(report["item_count"], 2);
    EXPECT_EQ(report["per_pair"][0]["id_a"], "a.txt");

    const std::string red(12, '\0');
    write_file(dir / "i" / "one.png", encode_png_rgb(2, 2, std::string("\xff\x00\x00\xff\x00\x00\xff\x00\x00\xff\x00\x00", 12)));
    write_file(dir / "i" / "two.png", encode_png_rgb(2, 2, red));
    r = cli({"analyze", "images", (dir / "i").string()});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["pair_count"], 1);

    EXPECT_EQ(cli({"analyze", "prompts", (dir / "missing").string()}).exit_code, 4);
}
