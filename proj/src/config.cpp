#include "smlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "smlab/error.hpp"

namespace smlab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_number(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

std::vector<std::string> split_commas(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
    const std::string t = trim(text);
    for (const char* fn : {"geom", "lin"}) {
        const std::string head = std::string(fn) + "(";
        if (t.rfind(head, 0) != 0) continue;
        if (t.back() != ')') throw ConfigError("grid '" + t + "': missing ')'");
        const auto args = split_commas(std::string_view(t).substr(head.size(), t.size() - head.size() - 1));
        if (args.size() != 3) throw ConfigError("grid '" + t + "': expected 3 arguments");
        const auto a = to_number(args[0]), b = to_number(args[1]), n = to_number(args[2]);
        if (!a || !b || !n || *n != std::floor(*n) || *n < 2)
            throw ConfigError("grid '" + t + "': expected (start, stop, count >= 2)");
        const int count = static_cast<int>(*n);
        std::vector<double> g;
        const bool geometric = std::string(fn) == "geom";
        if (geometric && !(*a > 0.0 && *b > 0.0)) throw ConfigError("grid '" + t + "': geom needs positive ends");
        for (int i = 0; i < count; ++i) {
            const double u = double(i) / double(count - 1);
            g.push_back(geometric ? *a * std::pow(*b / *a, u) : *a + (*b - *a) * u);
        }
        g.back() = *b;
        return g;
    }
    std::vector<double> g;
    for (const auto& item : split_commas(t)) {
        const auto v = to_number(item);
        if (!v) throw ConfigError("grid '" + t + "': '" + item + "' is not a number");
        g.push_back(*v);
    }
    return g;
}

void ConfigSection::allow(const std::set<std::string>& allowed, bool allow_tolerances) const {
    for (const auto& [key, e] : entries_) {
        if (allowed.count(key)) continue;
        if (allow_tolerances && key.rfind("tol.", 0) == 0 && key.size() > 4) continue;
        fail(key, "unknown key '" + key + "' in section [" + name_ + "]");
    }
}

void ConfigSection::fail(const std::string& key, const std::string& message) const {
    const auto it = entries_.find(key);
    const int line = it == entries_.end() ? line_ : it->second.line;
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + message);
}

const ConfigSection::Entry& ConfigSection::entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) fail(key, "section [" + name_ + "] needs key '" + key + "'");
    return it->second;
}

std::string ConfigSection::text(const std::string& key) const { return entry(key).value; }

std::string ConfigSection::text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
}

double ConfigSection::number(const std::string& key) const {
    const auto v = to_number(entry(key).value);
    if (!v || !std::isfinite(*v)) fail(key, "key '" + key + "' needs a finite number");
    return *v;
}

double ConfigSection::number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

std::optional<double> ConfigSection::optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
}

int ConfigSection::integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != std::floor(v) || std::fabs(v) > 1e9) fail(key, "key '" + key + "' needs an integer");
    return static_cast<int>(v);
}

bool ConfigSection::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = text(key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(key, "key '" + key + "' needs true or false");
}

std::vector<double> ConfigSection::grid(const std::string& key, bool allow_zero) const {
    std::vector<double> g;
    try {
        g = parse_grid(entry(key).value);
    } catch (const ConfigError& e) {
        fail(key, e.what());
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) fail(key, "grid '" + key + "' has a non-finite value");
        if (allow_zero ? g[i] < 0.0 : g[i] <= 0.0)
            fail(key, "grid '" + key + "' needs " + (allow_zero ? "nonnegative" : "positive") + " values");
        if (i > 0 && !(g[i] > g[i - 1])) fail(key, "grid '" + key + "' must be strictly increasing");
    }
    return g;
}

std::vector<double> ConfigSection::grid(const std::string& key, const std::vector<double>& fallback,
                                        bool allow_zero) const {
    return has(key) ? grid(key, allow_zero) : fallback;
}

std::vector<std::size_t> ConfigSection::indices(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : split_commas(entry(key).value)) {
        const auto v = to_number(item);
        if (!v || *v < 0 || *v != std::floor(*v)) fail(key, "key '" + key + "' needs nonnegative integers");
        out.push_back(static_cast<std::size_t>(*v));
    }
    return out;
}

std::map<std::string, double> ConfigSection::tolerances() const {
    std::map<std::string, double> out;
    for (const auto& [key, e] : entries_)
        if (key.rfind("tol.", 0) == 0) out[key.substr(4)] = number(key);
    return out;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text, const std::string& source) {
    ExperimentConfig cfg;
    cfg.source_ = source;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    ConfigSection* current = nullptr;
    auto fail = [&](const std::string& msg) { throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg); };
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty() || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            if (name.empty() || name.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_.") != std::string::npos)
                fail("bad section name '" + name + "'");
            if (cfg.sections_.count(name)) fail("duplicate section [" + name + "]");
            current = &cfg.sections_.emplace(name, ConfigSection(name, source, lineno)).first->second;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty() || key.find_first_of(" \t") != std::string::npos) fail("malformed key '" + key + "'");
        if (!current) fail("key '" + key + "' outside of any section");
        if (current->has(key)) fail("duplicate key '" + key + "'");
        if (value.empty()) fail("key '" + key + "' has an empty value");
        current->set(key, {value, lineno});
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

const ConfigSection& ExperimentConfig::section(const std::string& name) const {
    const auto it = sections_.find(name);
    if (it == sections_.end()) throw ConfigError(source_ + ": missing section [" + name + "]");
    return it->second;
}

const ConfigSection& ExperimentConfig::section_or_empty(const std::string& name) const {
    static const ConfigSection empty;
    const auto it = sections_.find(name);
    return it == sections_.end() ? empty : it->second;
}

}  // namespace smlab
