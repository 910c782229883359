#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace smlab {

// One [section] of an experiment file. Values keep their line numbers so
// errors can point at the source.
class ConfigSection {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    ConfigSection() = default;
    ConfigSection(std::string name, std::string source, int line)
        : name_(std::move(name)), source_(std::move(source)), line_(line) {}

    const std::string& name() const { return name_; }
    int line() const { return line_; }
    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const std::map<std::string, Entry>& entries() const { return entries_; }
    void set(const std::string& key, Entry e) { entries_[key] = std::move(e); }

    // ConfigError naming the first key outside `allowed`. Keys starting with
    // "tol." are accepted when allow_tolerances is set.
    void allow(const std::set<std::string>& allowed, bool allow_tolerances = false) const;

    std::string text(const std::string& key) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    std::optional<double> optional_number(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    // Comma-separated list, geom(a, b, n) or lin(a, b, n). Values must be
    // finite and sorted; positive unless allow_zero (then nonnegative).
    std::vector<double> grid(const std::string& key, bool allow_zero = false) const;
    std::vector<double> grid(const std::string& key, const std::vector<double>& fallback,
                             bool allow_zero = false) const;
    std::vector<std::size_t> indices(const std::string& key) const;
    // Values of all "tol.NAME" keys, by NAME.
    std::map<std::string, double> tolerances() const;

    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    const Entry& entry(const std::string& key) const;
    std::string name_;
    std::string source_;
    int line_ = 0;
    std::map<std::string, Entry> entries_;
};

class ExperimentConfig {
public:
    static ExperimentConfig parse(std::string_view text, const std::string& source = "<config>");
    static ExperimentConfig load(const std::string& path);

    bool has(const std::string& section) const { return sections_.count(section) > 0; }
    // ConfigError when absent.
    const ConfigSection& section(const std::string& name) const;
    // An empty section when absent.
    const ConfigSection& section_or_empty(const std::string& name) const;
    const std::map<std::string, ConfigSection>& sections() const { return sections_; }
    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::map<std::string, ConfigSection> sections_;
};

// Parses "1, 2, 4", "geom(0.1, 10, 7)" or "lin(0, 16, 9)".
std::vector<double> parse_grid(std::string_view text);

}  // namespace smlab
