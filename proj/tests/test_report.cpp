#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "smlab/error.hpp"
#include "smlab/report.hpp"

using namespace smlab;
namespace fs = std::filesystem;

namespace {

SuiteReport sample() {
    SuiteReport r;
    r.suite = "locality";
    r.parameters = {{"slack", 0.1}, {"bandlimit", 1.0}};
    r.measurements = {{"speed", 2.0000000000000004}};
    r.tolerances = {{"leak", 1e-6}};
    r.labels = {{"space_hash", "00ff"}};
    r.columns = {"r", "leak"};
    r.table = {{5.0, 1.0 / 3.0}, {10.0, std::numeric_limits<double>::quiet_NaN()}};
    r.fits["x"] = {-1.5, 0.25, 1.0, 9.0, 1e-3, 12};
    r.constants = {{"c", 0.1}};
    r.summary = {{"max_leak", 0.0, 1e-9}};
    r.notes = {"a \"quoted\" note"};
    r.pass = true;
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("JSON is versioned, sorted and uses 17 digits") {
    const std::string j = report_to_json(sample(), 42);
    CHECK(j.find("\"report_version\": 1") != std::string::npos);
    CHECK(j.find("0.33333333333333331") != std::string::npos);
    CHECK(j.find("2.0000000000000004") != std::string::npos);
    CHECK(j.find("null") != std::string::npos);
    CHECK(j.find("\"seed\": 42") != std::string::npos);
    CHECK(j.find("\"columns\"") < j.find("\"constants\""));
    CHECK(j.find("\"constants\"") < j.find("\"fits\""));
}

TEST_CASE("JSON round trip preserves every field") {
    const auto r = sample();
    std::uint64_t seed = 0;
    const auto back = report_from_json(report_to_json(r, 42), &seed);
    CHECK(seed == 42);
    CHECK(back.suite == r.suite);
    CHECK(back.pass == r.pass);
    CHECK(back.parameters == r.parameters);
    CHECK(back.measurements == r.measurements);
    CHECK(back.labels == r.labels);
    CHECK(back.table[0][1] == r.table[0][1]);
    CHECK(std::isnan(back.table[1][1]));
    CHECK(back.fits.at("x").n_points == 12);
    CHECK(back.fits.at("x").window_hi == 9.0);
    CHECK(back.notes == r.notes);
    CHECK(report_to_json(back, 42) == report_to_json(r, 42));
}

TEST_CASE("malformed reports") {
    CHECK_THROWS_AS(report_from_json("{"), IoError);
    CHECK_THROWS_AS(report_from_json("{\"report_version\": 2}"), IoError);
    CHECK_THROWS_AS(report_from_json("[]"), IoError);
}

TEST_CASE("CSV and fit curves") {
    const auto csv = report_to_csv(sample());
    CHECK(csv.rfind("r,leak\n5,0.33333333333333331\n", 0) == 0);
    CHECK(csv.find("nan") != std::string::npos);
    const ExponentFit fit{-2.0, std::log(3.0), 1.0, 100.0, 0.0, 5};
    const auto dat = fit_curve_dat(fit, 3);
    CHECK(dat.find("\n1 ") != std::string::npos);
    CHECK(std::count(dat.begin(), dat.end(), '\n') == 4);
    CHECK(dat.find("\n100 ") != std::string::npos);
}

TEST_CASE("report files and aggregation") {
    const auto dir = fresh_dir("smlab_report_test");
    const auto written = write_report_files(sample(), dir, 1);
    CHECK(written.size() == 3);
    for (const auto& p : written) CHECK(fs::exists(p));
    {
        std::ofstream bad(dir / "broken.json");
        bad << "{ not json";
    }
    const auto agg = aggregate_reports(dir);
    REQUIRE(agg.rows.size() == 2);
    CHECK_FALSE(agg.rows[0].readable);
    CHECK(agg.rows[0].file == "broken.json");
    CHECK(agg.rows[1].readable);
    CHECK(agg.rows[1].suite == "locality");
    CHECK_FALSE(agg.all_pass());
    CHECK(aggregate_to_table(agg).find("unreadable") != std::string::npos);
    CHECK(aggregate_to_json(agg).find("\"readable\": false") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("empty run directory") {
    const auto dir = fresh_dir("smlab_report_empty");
    const auto agg = aggregate_reports(dir);
    CHECK(agg.rows.empty());
    CHECK(agg.warnings.size() == 1);
    fs::remove_all(dir);
}

TEST_CASE("atomic writes leave no temporary files") {
    const auto dir = fresh_dir("smlab_atomic");
    write_atomic(dir / "a.txt", "one");
    write_atomic(dir / "a.txt", "two");
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        (void)e;
        ++files;
    }
    CHECK(files == 1);
    std::ifstream in(dir / "a.txt");
    std::string s;
    in >> s;
    CHECK(s == "two");
    fs::remove_all(dir);
}
