#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "smlab/cli.hpp"

using namespace smlab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path write_config(const std::string& name, const std::string& text) {
    const auto dir = fs::temp_directory_path() / "smlab_cli_test";
    fs::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

const char* kProbe = R"([space]
kind = grid
dim = 1
side = 3

[operator]
kind = laplacian

[suite.spectrum_probe]
rho = 2
gap = 1
)";

}  // namespace

TEST_CASE("space summary of the path with three points") {
    const auto cfg = write_config("probe.ini", kProbe);
    const auto out = fs::temp_directory_path() / "smlab_cli_test" / "space_out";
    const auto r = run({"space", "--config", cfg.string(), "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("diameter       2\n") != std::string::npos);
    CHECK(r.out.find("total_mass     3\n") != std::string::npos);
    CHECK(fs::exists(out / "volume_profile.csv"));
}

TEST_CASE("ends model space summary fits two volume exponents") {
    const auto cfg = write_config("ends.ini", "[space]\nkind = ends\nside_small = 5\nside_big = 4\ntorus_side = 3\n"
                                              "radii = 1, 2, 3, 4, 5, 6, 7, 8\n");
    const auto out = fs::temp_directory_path() / "smlab_cli_test" / "ends_out";
    const auto r = run({"space", "--config", cfg.string(), "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("n_small") != std::string::npos);
    CHECK(r.out.find("n_large") != std::string::npos);
}

TEST_CASE("suite exit codes") {
    const auto cfg = write_config("probe.ini", kProbe);
    const auto out = (fs::temp_directory_path() / "smlab_cli_test" / "suite_out").string();
    CHECK(run({"suite", "spectrum_probe", "--config", cfg.string(), "--out", out}).code == 0);
    CHECK(fs::exists(fs::path(out) / "spectrum_probe.json"));
    CHECK(fs::exists(fs::path(out) / "spectrum_probe.csv"));

    const auto unknown = run({"suite", "nope", "--config", cfg.string(), "--out", out});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("unknown suite") != std::string::npos);

    const auto failing = write_config("fail.ini", std::string(kProbe) + "tol.psi = -1\n");
    CHECK(run({"suite", "spectrum_probe", "--config", failing.string(), "--out", out}).code == 1);

    const auto bad_key = write_config("badkey.ini", std::string(kProbe) + "colour = red\n");
    const auto bk = run({"suite", "spectrum_probe", "--config", bad_key.string(), "--out", out});
    CHECK(bk.code == 2);
    CHECK(bk.err.find("colour") != std::string::npos);

    const auto on_spectrum = write_config("domain.ini", "[space]\nkind = grid\nside = 3\n[suite.spectrum_probe]\n"
                                                        "rho = 1\ngap = 0.5\n");
    CHECK(run({"suite", "spectrum_probe", "--config", on_spectrum.string(), "--out", out}).code == 2);

    CHECK(run({"suite", "spectrum_probe", "--config", "/nonexistent.ini"}).code == 2);
    CHECK(run({"suite"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("budget errors exit with 3") {
    const auto big = write_config("big.ini", "[space]\nkind = grid\ndim = 2\nside = 30\npoint_budget = 100\n");
    CHECK(run({"space", "--config", big.string()}).code == 3);
    const auto cfg = write_config("weighted.ini", "[space]\nkind = grid\ndim = 1\nside = 20\n");
    // A path has reflection symmetry, so a small budget still works through the reduced blocks.
    CHECK(run({"op", "--config", cfg.string(), "--budget", "12"}).code == 0);
}

TEST_CASE("op summary of a Schrodinger operator") {
    const auto cfg = write_config("schr.ini", "[space]\nkind = grid\ndim = 3\nside = 7\nboundary = absorbing\n"
                                              "[operator]\nkind = schrodinger\ncoupling = 0.16\nmurata_dim = 3\n");
    const auto r = run({"op", "--config", cfg.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("subcritical      yes") != std::string::npos);
    const auto bad = write_config("schr_bad.ini", "[space]\nkind = grid\ndim = 3\nside = 7\nboundary = absorbing\n"
                                                  "[operator]\nkind = schrodinger\ncoupling = 0.5\nmurata_dim = 3\n");
    CHECK(run({"op", "--config", bad.string()}).code == 2);
}

TEST_CASE("report command") {
    const auto dir = fs::temp_directory_path() / "smlab_cli_test" / "report_dir";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto empty = run({"report", dir.string()});
    CHECK(empty.code == 0);
    CHECK(empty.err.find("warning") != std::string::npos);

    const auto cfg = write_config("probe.ini", kProbe);
    CHECK(run({"suite", "spectrum_probe", "--config", cfg.string(), "--out", dir.string()}).code == 0);
    std::ofstream(dir / "corrupt.json") << "{";
    const auto r = run({"report", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("unreadable") != std::string::npos);
    CHECK(r.out.find("spectrum_probe") != std::string::npos);
    CHECK(fs::exists(dir / "summary.json"));
}

TEST_CASE("same config and seed give byte-identical reports") {
    const auto cfg = write_config("probe.ini", kProbe);
    const auto base = fs::temp_directory_path() / "smlab_cli_test";
    for (const char* d : {"det_a", "det_b"})
        CHECK(run({"suite", "spectrum_probe", "--config", cfg.string(), "--out", (base / d).string(), "--seed", "9"})
                  .code == 0);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(base / "det_a" / "spectrum_probe.json") == slurp(base / "det_b" / "spectrum_probe.json"));
    CHECK(slurp(base / "det_a" / "spectrum_probe.json").find("\"seed\": 9") != std::string::npos);
}
