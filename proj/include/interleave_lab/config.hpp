#pragma once

// INI-style key = value settings. "[section]" headers prefix the keys that
// follow them ("[dataset]" + "path" -> "dataset.path"); '#' and ';' start
// comments.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ilab {

class Settings {
public:
    using Map = std::map<std::string, std::string>;

    Settings() = default;
    explicit Settings(Map values) : values_(std::move(values)) {}

    static Settings parse(std::istream& in, const std::string& source = "<config>");
    static Settings load(const std::string& path);

    // Writes flat "key = value" lines in key order.
    void write(std::ostream& out) const;

    bool contains(const std::string& key) const { return values_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    // Later layers win.
    void overlay(const Settings& other);

    std::string get_string(const std::string& key, const std::string& fallback = {}) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

    const Map& values() const noexcept { return values_; }

private:
    Map values_;
};

// Typed parsers shared with flag handling. Throw ConfigError naming `what`.
std::uint64_t parse_uint(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);
std::vector<double> parse_double_list(const std::string& text, const std::string& what);
std::vector<int> parse_int_list(const std::string& text, const std::string& what);

}  // namespace ilab
