#pragma once
/**
 * @file config.hpp
 * @brief Reader for the run configuration files.
 *
 * Accepted syntax is a small TOML subset:
 *
 *     # comment
 *     [section]
 *     key = 1.5            # number
 *     key = "text"         # string
 *     key = true           # bool
 *     key = [0.0, [1, 2]]  # arrays, nestable
 *
 * Every value remembers its line so that errors can point at it.
 */

#include <cctype>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace wk::config {

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<double, std::string, bool, Array> data;
    int line = 0;

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
};

class Section {
public:
    std::string name;
    int line = 0;
    std::map<std::string, Value> values;

    bool has(const std::string& key) const {
        used_.insert(key);
        return values.count(key) != 0;
    }

    const Value& get(const std::string& key) const {
        used_.insert(key);
        auto it = values.find(key);
        if (it == values.end()) fail(line, "missing key '", key, "' in [", name, "]");
        return it->second;
    }

    double number(const std::string& key) const {
        const Value& v = get(key);
        if (!v.is_number()) fail(v.line, "[", name, "] ", key, ": expected a number");
        return std::get<double>(v.data);
    }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key) const {
        double d = number(key);
        if (d != static_cast<double>(static_cast<long long>(d)) || std::abs(d) > 1e9)
            fail(get(key).line, "[", name, "] ", key, ": expected an integer, got ", d);
        return static_cast<int>(d);
    }
    int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

    std::string string(const std::string& key) const {
        const Value& v = get(key);
        if (!v.is_string()) fail(v.line, "[", name, "] ", key, ": expected a string");
        return std::get<std::string>(v.data);
    }
    std::string string(const std::string& key, std::string fallback) const {
        return has(key) ? string(key) : fallback;
    }

    bool boolean(const std::string& key) const {
        const Value& v = get(key);
        if (!v.is_bool()) fail(v.line, "[", name, "] ", key, ": expected true or false");
        return std::get<bool>(v.data);
    }
    bool boolean(const std::string& key, bool fallback) const { return has(key) ? boolean(key) : fallback; }

    std::vector<double> numbers(const Value& v, const std::string& what) const {
        if (!v.is_array()) fail(v.line, "[", name, "] ", what, ": expected an array of numbers");
        std::vector<double> out;
        for (const Value& e : std::get<Array>(v.data)) {
            if (!e.is_number()) fail(e.line, "[", name, "] ", what, ": expected an array of numbers");
            out.push_back(std::get<double>(e.data));
        }
        return out;
    }

    Vec3 vec3(const std::string& key) const {
        const Value& v = get(key);
        std::vector<double> n = numbers(v, key);
        if (n.size() != 3) fail(v.line, "[", name, "] ", key, ": expected 3 components, got ", n.size());
        return {n[0], n[1], n[2]};
    }
    Vec3 vec3(const std::string& key, Vec3 fallback) const { return has(key) ? vec3(key) : fallback; }

    /// Rejects keys nobody asked for.
    void check_all_used() const {
        for (const auto& [k, v] : values)
            if (!used_.count(k)) fail(v.line, "unknown key '", k, "' in [", name, "]");
    }

    template <class... Args>
    [[noreturn]] static void fail(int line, Args&&... args) {
        throw ConfigError(detail::cat("line ", line, ": ", std::forward<Args>(args)...));
    }

private:
    mutable std::set<std::string> used_;
};

class Document {
public:
    std::string origin = "<string>";
    std::map<std::string, Section> sections;

    bool has(const std::string& s) const { return sections.count(s) != 0; }
    const Section& section(const std::string& s) const {
        auto it = sections.find(s);
        if (it == sections.end()) {
            empty_.name = s;
            return empty_;
        }
        return it->second;
    }

    void check_sections(const std::set<std::string>& known) const {
        for (const auto& [name, s] : sections)
            if (!known.count(name)) Section::fail(s.line, "unknown section [", name, "]");
    }
    void check_all_used() const {
        for (const auto& [name, s] : sections) s.check_all_used();
    }

private:
    mutable Section empty_;
};

namespace detail {

class Parser {
public:
    Parser(std::string_view line, int lineno) : s_(line), line_(lineno) {}

    Value value() {
        skip_ws();
        if (pos_ >= s_.size()) error("missing value");
        char c = s_[pos_];
        Value v;
        v.line = line_;
        if (c == '"') {
            v.data = quoted();
        } else if (c == '[') {
            ++pos_;
            Array a;
            skip_ws();
            if (peek() == ']') {
                ++pos_;
            } else {
                for (;;) {
                    a.push_back(value());
                    skip_ws();
                    if (peek() == ',') {
                        ++pos_;
                        skip_ws();
                        if (peek() == ']') {
                            ++pos_;
                            break;
                        }
                        continue;
                    }
                    if (peek() == ']') {
                        ++pos_;
                        break;
                    }
                    error("expected ',' or ']' in array");
                }
            }
            v.data = std::move(a);
        } else if (s_.substr(pos_, 4) == "true") {
            pos_ += 4;
            v.data = true;
        } else if (s_.substr(pos_, 5) == "false") {
            pos_ += 5;
            v.data = false;
        } else {
            std::size_t end = pos_;
            while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                                       s_[end] == '-' || s_[end] == '+' || s_[end] == '_'))
                ++end;
            std::string tok(s_.substr(pos_, end - pos_));
            std::erase(tok, '_');
            double d = 0;
            const char* b = tok.data();
            if (!tok.empty() && tok[0] == '+') ++b;
            auto [p, ec] = std::from_chars(b, tok.data() + tok.size(), d);
            if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size())
                error("cannot parse value '", std::string(s_.substr(pos_, std::max<std::size_t>(end - pos_, 1))),
                      "'");
            pos_ = end;
            v.data = d;
        }
        return v;
    }

    void finish() {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] != '#') error("unexpected trailing text '", std::string(s_.substr(pos_)), "'");
    }

    template <class... Args>
    [[noreturn]] void error(Args&&... args) const {
        Section::fail(line_, std::forward<Args>(args)...);
    }

private:
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    std::string quoted() {
        ++pos_;
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                char e = s_[++pos_];
                out.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
            } else {
                out.push_back(s_[pos_]);
            }
            ++pos_;
        }
        if (pos_ >= s_.size()) error("unterminated string");
        ++pos_;
        return out;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_;
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

}  // namespace detail

inline Document parse(std::string_view text, std::string origin = "<string>") {
    Document doc;
    doc.origin = std::move(origin);
    Section* cur = nullptr;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            auto close = line.find(']');
            if (close == std::string_view::npos) Section::fail(lineno, "unterminated section header");
            std::string_view name = detail::trim(line.substr(1, close - 1));
            std::string_view rest = detail::trim(line.substr(close + 1));
            if (!rest.empty() && rest.front() != '#') Section::fail(lineno, "unexpected text after section header");
            if (!detail::valid_name(name)) Section::fail(lineno, "invalid section name '", std::string(name), "'");
            std::string key(name);
            if (doc.sections.count(key)) Section::fail(lineno, "duplicate section [", key, "]");
            cur = &doc.sections[key];
            cur->name = key;
            cur->line = lineno;
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) Section::fail(lineno, "expected 'key = value'");
        std::string key(detail::trim(line.substr(0, eq)));
        if (!detail::valid_name(key)) Section::fail(lineno, "invalid key '", key, "'");
        if (!cur) Section::fail(lineno, "key '", key, "' outside any section");
        if (cur->values.count(key)) Section::fail(lineno, "duplicate key '", key, "' in [", cur->name, "]");
        detail::Parser p(line.substr(eq + 1), lineno);
        Value v = p.value();
        p.finish();
        cur->values.emplace(key, std::move(v));
    }
    return doc;
}

/// "line N: msg" becomes "path:N: msg".
inline ConfigError located(const std::string& path, const ConfigError& e) {
    std::string w = e.what();
    if (w.rfind("line ", 0) == 0) return ConfigError(path + ":" + w.substr(5));
    return ConfigError(path + ": " + w);
}

inline Document parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse(ss.str(), path);
    } catch (const ConfigError& e) {
        throw located(path, e);
    }
}

}  // namespace wk::config
