#include "smlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "json.hpp"
#include "smlab/error.hpp"

namespace smlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string number_text(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_scalar(const json& j) { return !j.is_object() && !j.is_array(); }

// nlohmann::json keeps objects in a std::map, so keys come out sorted.
void dump(const json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + json(it.key()).dump() + ": ";
            dump(it.value(), out, indent + 2);
        }
        out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
    } else if (j.is_array()) {
        if (std::all_of(j.begin(), j.end(), is_scalar)) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                dump(j[i], out, indent);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            dump(j[i], out, indent + 2);
        }
        out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "]";
    } else if (j.is_number_float()) {
        out += number_text(j.get<double>());
    } else {
        out += j.dump();
    }
}

json number_map(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

double as_double(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!j.is_number()) throw IoError("expected a number, found " + j.dump());
    return j.get<double>();
}

std::map<std::string, double> read_number_map(const json& j) {
    std::map<std::string, double> m;
    for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = as_double(it.value());
    return m;
}

std::string sanitize(const std::string& name) {
    std::string s = name;
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) c = '_';
    return s;
}

}  // namespace

std::string report_to_json(const SuiteReport& r, std::uint64_t seed) {
    json j = json::object();
    j["report_version"] = kReportVersion;
    j["suite"] = r.suite;
    j["pass"] = r.pass;
    j["seed"] = seed;
    j["parameters"] = number_map(r.parameters);
    j["measurements"] = number_map(r.measurements);
    j["tolerances"] = number_map(r.tolerances);
    j["labels"] = json(r.labels);
    j["columns"] = json(r.columns);
    json table = json::array();
    for (const auto& row : r.table) {
        json jr = json::array();
        for (double v : row) jr.push_back(v);
        table.push_back(std::move(jr));
    }
    j["table"] = std::move(table);
    json fits = json::object();
    for (const auto& [name, f] : r.fits)
        fits[name] = {{"slope", f.slope},
                      {"intercept", f.intercept},
                      {"window", json::array({f.window_lo, f.window_hi})},
                      {"residual_rms", f.residual_rms},
                      {"n_points", f.n_points}};
    j["fits"] = std::move(fits);
    j["constants"] = number_map(r.constants);
    json summary = json::array();
    for (const auto& k : r.summary)
        summary.push_back({{"name", k.name}, {"predicted", k.predicted}, {"fitted", k.fitted}});
    j["summary"] = std::move(summary);
    j["notes"] = json(r.notes);
    std::string out;
    dump(j, out, 0);
    out += "\n";
    return out;
}

SuiteReport report_from_json(const std::string& text, std::uint64_t* seed) {
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw IoError("report is not a JSON object");
        if (j.value("report_version", 0) != kReportVersion)
            throw IoError("unsupported report_version " + j.value("report_version", json()).dump());
        SuiteReport r;
        r.suite = j.at("suite").get<std::string>();
        r.pass = j.at("pass").get<bool>();
        if (seed) *seed = j.at("seed").get<std::uint64_t>();
        r.parameters = read_number_map(j.at("parameters"));
        r.measurements = read_number_map(j.at("measurements"));
        r.tolerances = read_number_map(j.at("tolerances"));
        r.labels = j.at("labels").get<std::map<std::string, std::string>>();
        r.columns = j.at("columns").get<std::vector<std::string>>();
        for (const auto& row : j.at("table")) {
            std::vector<double> v;
            for (const auto& x : row) v.push_back(as_double(x));
            if (v.size() != r.columns.size()) throw IoError("table row width differs from columns");
            r.table.push_back(std::move(v));
        }
        for (auto it = j.at("fits").begin(); it != j.at("fits").end(); ++it) {
            const json& f = it.value();
            ExponentFit fit;
            fit.slope = as_double(f.at("slope"));
            fit.intercept = as_double(f.at("intercept"));
            fit.window_lo = as_double(f.at("window").at(0));
            fit.window_hi = as_double(f.at("window").at(1));
            fit.residual_rms = as_double(f.at("residual_rms"));
            fit.n_points = f.at("n_points").get<std::size_t>();
            r.fits[it.key()] = fit;
        }
        r.constants = read_number_map(j.at("constants"));
        for (const auto& k : j.at("summary"))
            r.summary.push_back({k.at("name").get<std::string>(), as_double(k.at("predicted")),
                                 as_double(k.at("fitted"))});
        r.notes = j.at("notes").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed report: ") + e.what());
    }
}

std::string report_to_csv(const SuiteReport& r) {
    std::string out;
    for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + r.columns[i];
    out += "\n";
    for (const auto& row : r.table) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += std::isfinite(row[i]) ? number_text(row[i]) : (std::isnan(row[i]) ? "nan" : row[i] > 0 ? "inf" : "-inf");
        }
        out += "\n";
    }
    return out;
}

std::string fit_curve_dat(const ExponentFit& fit, std::size_t points) {
    std::string out = "# y = exp(" + number_text(fit.intercept) + ") * x^" + number_text(fit.slope) + "\n";
    if (!(fit.window_lo > 0.0 && fit.window_hi > fit.window_lo) || points < 2) return out;
    const double ratio = std::log(fit.window_hi / fit.window_lo);
    for (std::size_t i = 0; i < points; ++i) {
        const double x =
            i + 1 == points ? fit.window_hi : fit.window_lo * std::exp(ratio * double(i) / double(points - 1));
        out += number_text(x) + " " + number_text(std::exp(fit.intercept) * std::pow(x, fit.slope)) + "\n";
    }
    return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::vector<fs::path> write_report_files(const SuiteReport& r, const fs::path& dir, std::uint64_t seed) {
    std::vector<fs::path> written;
    const std::string base = sanitize(r.suite);
    written.push_back(dir / (base + ".json"));
    write_atomic(written.back(), report_to_json(r, seed));
    written.push_back(dir / (base + ".csv"));
    write_atomic(written.back(), report_to_csv(r));
    for (const auto& [name, fit] : r.fits) {
        written.push_back(dir / (base + "." + sanitize(name) + ".dat"));
        write_atomic(written.back(), fit_curve_dat(fit));
    }
    return written;
}

bool Aggregate::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const AggregateRow& r) { return r.readable && r.pass; });
}

Aggregate aggregate_reports(const fs::path& dir) {
    Aggregate agg;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "summary.json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) agg.warnings.push_back("no reports in " + dir.string());
    for (const auto& p : files) {
        AggregateRow row;
        row.file = p.filename().string();
        try {
            std::ifstream f(p, std::ios::binary);
            std::stringstream ss;
            ss << f.rdbuf();
            if (!f) throw IoError("cannot read file");
            const SuiteReport r = report_from_json(ss.str());
            row.readable = true;
            row.suite = r.suite;
            row.pass = r.pass;
            row.summary = r.summary;
        } catch (const Error& e) {
            row.error = e.what();
            agg.warnings.push_back(row.file + ": unreadable (" + row.error + ")");
        }
        agg.rows.push_back(std::move(row));
    }
    return agg;
}

std::string aggregate_to_json(const Aggregate& agg) {
    json rows = json::array();
    for (const auto& r : agg.rows) {
        json jr = {{"file", r.file}, {"readable", r.readable}};
        if (r.readable) {
            jr["suite"] = r.suite;
            jr["pass"] = r.pass;
            json s = json::array();
            for (const auto& k : r.summary)
                s.push_back({{"name", k.name}, {"predicted", k.predicted}, {"fitted", k.fitted}});
            jr["summary"] = std::move(s);
        } else {
            jr["error"] = r.error;
        }
        rows.push_back(std::move(jr));
    }
    json j = {{"report_version", kReportVersion}, {"all_pass", agg.all_pass()}, {"reports", rows},
              {"warnings", agg.warnings}};
    std::string out;
    dump(j, out, 0);
    return out + "\n";
}

std::string aggregate_to_table(const Aggregate& agg) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-18s %-28s %12s %12s  %s\n", "suite", "key", "predicted", "fitted", "pass");
    os << buf;
    for (const auto& r : agg.rows) {
        if (!r.readable) {
            std::snprintf(buf, sizeof buf, "%-18s %-28s %12s %12s  %s\n", r.file.c_str(), "-", "-", "-", "unreadable");
            os << buf;
            continue;
        }
        if (r.summary.empty()) {
            std::snprintf(buf, sizeof buf, "%-18s %-28s %12s %12s  %s\n", r.suite.c_str(), "-", "-", "-",
                          r.pass ? "PASS" : "FAIL");
            os << buf;
        }
        for (std::size_t i = 0; i < r.summary.size(); ++i) {
            const auto& k = r.summary[i];
            std::snprintf(buf, sizeof buf, "%-18s %-28s %12.5g %12.5g  %s\n", i ? "" : r.suite.c_str(),
                          k.name.c_str(), k.predicted, k.fitted, i ? "" : (r.pass ? "PASS" : "FAIL"));
            os << buf;
        }
    }
    return os.str();
}

}  // namespace smlab
