#include "interleave_lab/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "interleave_lab/core.hpp"

namespace ilab {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void bad(const std::string& what, const std::string& text, const char* expected) {
    throw Error(ErrorCode::ConfigError, what + ": expected " + expected + ", got '" + text + "'");
}

}  // namespace

std::uint64_t parse_uint(const std::string& text, const std::string& what) {
    const auto t = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) bad(what, text, "a non-negative integer");
    return v;
}

double parse_double(const std::string& text, const std::string& what) {
    const auto t = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) bad(what, text, "a number");
    return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
    const auto t = trim(text);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    bad(what, text, "a boolean");
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split_commas(text)) out.push_back(parse_double(item, what));
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (const auto& item : split_commas(text)) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) bad(what, text, "a list of integers");
        out.push_back(v);
    }
    return out;
}

Settings Settings::parse(std::istream& in, const std::string& source) {
    Settings s;
    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw Error(ErrorCode::ConfigError, source + ":" + std::to_string(line_no) + ": bad section header",
                            line_no);
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ConfigError, source + ":" + std::to_string(line_no) + ": expected key = value",
                        line_no);
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw Error(ErrorCode::ConfigError, source + ":" + std::to_string(line_no) + ": empty key", line_no);
        }
        s.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
    }
    return s;
}

Settings Settings::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, path + ": cannot open config file");
    return parse(in, path);
}

void Settings::write(std::ostream& out) const {
    for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

std::optional<std::string> Settings::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void Settings::overlay(const Settings& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string Settings::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

std::uint64_t Settings::get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto v = get(key);
    return v ? parse_uint(*v, key) : fallback;
}

double Settings::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_double(*v, key) : fallback;
}

bool Settings::get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    return v ? parse_bool(*v, key) : fallback;
}

std::vector<double> Settings::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    const auto v = get(key);
    return v ? parse_double_list(*v, key) : fallback;
}

std::vector<int> Settings::get_ints(const std::string& key, const std::vector<int>& fallback) const {
    const auto v = get(key);
    return v ? parse_int_list(*v, key) : fallback;
}

}  // namespace ilab
