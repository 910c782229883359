#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "smlab/estimates.hpp"

namespace smlab {

inline constexpr int kReportVersion = 1;

// JSON with sorted keys, 17 significant digits, null for non-finite values.
std::string report_to_json(const SuiteReport& report, std::uint64_t seed);
// Throws IoError on malformed input or an unknown report_version.
SuiteReport report_from_json(const std::string& text, std::uint64_t* seed = nullptr);
// Header line of column names, then one row per sample.
std::string report_to_csv(const SuiteReport& report);
// "x y" pairs of exp(intercept) x^slope, log-spaced over the fit window.
std::string fit_curve_dat(const ExponentFit& fit, std::size_t points = 50);

// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// SUITE.json, SUITE.csv and SUITE.FIT.dat in `dir`; returns the paths written.
std::vector<std::filesystem::path> write_report_files(const SuiteReport& report,
                                                      const std::filesystem::path& dir,
                                                      std::uint64_t seed);

struct AggregateRow {
    std::string file;
    bool readable = false;
    std::string error;
    std::string suite;
    bool pass = false;
    std::vector<KeyResult> summary;
};

struct Aggregate {
    std::vector<AggregateRow> rows;
    std::vector<std::string> warnings;
    bool all_pass() const;
};

// Reads every *.json report in `dir` except summary.json.
Aggregate aggregate_reports(const std::filesystem::path& dir);
std::string aggregate_to_json(const Aggregate& agg);
std::string aggregate_to_table(const Aggregate& agg);

}  // namespace smlab
