#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "hyperspace/image.hpp"
#include "support.hpp"

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::map<std::string, std::string> fields;  // key=value lines
};

CliRun cli(const std::string& args) {
    const std::string cmd = std::string(HYPERSPACE_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    CliRun r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) r.out += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) r.fields[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return r;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "hyperspace_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

const std::string kDir = HYPERSPACE_TEST_DIR;

}  // namespace

TEST(Cli, SquareWalkSolvesTheClosingStep) {
    const CliRun r = cli("square-walk --solve-step");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NEAR(std::stod(r.fields.at("step")), oracle::closingStep(6, std::numbers::pi / 2), 1e-9);
    EXPECT_EQ(r.fields.at("movesToClose"), "6");
    EXPECT_EQ(r.fields.at("physicalSquaresAway"), "2");
    EXPECT_LT(std::stod(r.fields.at("closureResidual")), 1e-6);

    const CliRun e = cli("square-walk --space euclidean --step 0.8");
    ASSERT_EQ(e.code, 0) << e.out;
    EXPECT_EQ(e.fields.at("movesToClose"), "4");
    EXPECT_EQ(e.fields.at("physicalSquaresAway"), "0");
}

TEST(Cli, WalkScript) {
    const auto path = scratch("ruld.txt");
    std::ofstream(path) << "# right, up, left, down\nT right 0.5\nT up 0.5\nT left 0.5\nT down 0.5\n";
    const CliRun h3 = cli("walk --space h3 --script " + path.string());
    ASSERT_EQ(h3.code, 0) << h3.out;
    EXPECT_EQ(h3.fields.at("kind"), "rotation");
    EXPECT_EQ(h3.fields.at("closed"), "false");
    const CliRun h2e = cli("walk --space h2e --script " + path.string());
    EXPECT_EQ(h2e.fields.at("kind"), "identity");
    EXPECT_EQ(h2e.fields.at("closed"), "true");
}

TEST(Cli, VergenceAndFloorDrop) {
    const CliRun v = cli("vergence --ipd 62.21 --distance 1e9");
    ASSERT_EQ(v.code, 0) << v.out;
    EXPECT_NEAR(std::stod(v.fields.at("vergence")), std::atan(std::sinh(0.06221 / 2)), 1e-9);
    EXPECT_NEAR(std::stod(v.fields.at("limit")), std::atan(std::sinh(0.06221 / 2)), 1e-9);
    const CliRun near = cli("vergence --distance 2");
    EXPECT_GT(std::stod(near.fields.at("vergence")), std::stod(near.fields.at("euclidean")));

    const CliRun f = cli("floor-drop --height 0.5 --t 2");
    ASSERT_EQ(f.code, 0) << f.out;
    EXPECT_NEAR(std::stod(f.fields.at("distance")), std::asinh(std::sinh(0.5) * std::cosh(2.0)), 1e-9);
}

TEST(Cli, TilingStatsAndExport) {
    const CliRun r = cli("tiling --schlafli 4,3,4 --depth 1 --stats");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.fields.at("cellCount"), "7");
    EXPECT_EQ(r.fields.at("geometry"), "euclidean");
    const auto path = scratch("tiling.json");
    ASSERT_EQ(cli("tiling --schlafli {4,3,6} --depth 2 --export " + path.string()).code, 0);
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j.at("geometry"), "hyperbolic");
    EXPECT_EQ(j.at("cells").size(), j.at("cellCount").get<std::size_t>());
}

TEST(Cli, FigureAndRenderWriteFiles) {
    const auto svg = scratch("models.svg");
    ASSERT_EQ(cli("figure models2d --size 100 -o " + svg.string()).code, 0);
    EXPECT_GT(std::filesystem::file_size(svg), 1000u);
    const auto png = scratch("sphere.png");
    ASSERT_EQ(cli("figure sphereTransport --size 100 -o " + png.string()).code, 0);
    EXPECT_GT(std::filesystem::file_size(png), 100u);

    const auto ppm = scratch("room.ppm");
    const CliRun r = cli("render --scene " + kDir + "/fixtures/h3_room.json --width 64 --height 48 --stereo -o " + ppm.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const hyperspace::Image img = hyperspace::readPpm(ppm.string());
    EXPECT_EQ(img.width(), 128);
    EXPECT_EQ(img.height(), 48);
}

TEST(Cli, ConfigFileSuppliesDefaults) {
    const auto cfg = scratch("config.json");
    std::ofstream(cfg) << R"({"floor-drop": {"height": 0.5}, "t": 2})";
    const CliRun r = cli("--config " + cfg.string() + " floor-drop");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NEAR(std::stod(r.fields.at("distance")), std::asinh(std::sinh(0.5) * std::cosh(2.0)), 1e-9);
    // Flags win over the file.
    const CliRun f = cli("--config " + cfg.string() + " floor-drop --t 0");
    EXPECT_NEAR(std::stod(f.fields.at("distance")), 0.5, 1e-9);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("bogus").code, 2);
    EXPECT_EQ(cli("tiling --schlafli 4,3,x").code, 2);
    EXPECT_EQ(cli("walk --script /nonexistent/script.txt").code, 2);
    EXPECT_EQ(cli("square-walk --space euclidean --solve-step").code, 1);
    EXPECT_EQ(cli("tiling --schlafli 3,3,3 --depth 2").code, 1);
    EXPECT_EQ(cli("floor-drop --height 0 --t 1").code, 1);
    const CliRun help = cli("--help");
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("square-walk"), std::string::npos);
}
