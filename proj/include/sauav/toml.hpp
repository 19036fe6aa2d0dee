#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sauav::toml {

/// Minimal TOML subset sufficient for scenario files: [section] headers,
/// bare keys, strings, integers, floats, booleans, one-line arrays of
/// scalars, and # comments. Keys are flattened to "section.key".

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Value;
using Array = std::vector<Value>;

class Value {
public:
    Value() : v_(std::int64_t{0}) {}
    explicit Value(std::int64_t i) : v_(i) {}
    explicit Value(double d) : v_(d) {}
    explicit Value(bool b) : v_(b) {}
    explicit Value(std::string s) : v_(std::move(s)) {}
    explicit Value(Array a) : v_(std::move(a)) {}

    bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_float() const { return std::holds_alternative<double>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_string() const { return std::holds_alternative<std::string>(v_); }
    bool is_array() const { return std::holds_alternative<Array>(v_); }

    std::int64_t as_int() const {
        if (!is_int()) throw ParseError("value is not an integer");
        return std::get<std::int64_t>(v_);
    }
    double as_double() const {
        if (is_int()) return static_cast<double>(std::get<std::int64_t>(v_));
        if (!is_float()) throw ParseError("value is not a number");
        return std::get<double>(v_);
    }
    bool as_bool() const {
        if (!is_bool()) throw ParseError("value is not a boolean");
        return std::get<bool>(v_);
    }
    const std::string& as_string() const {
        if (!is_string()) throw ParseError("value is not a string");
        return std::get<std::string>(v_);
    }
    const Array& as_array() const {
        if (!is_array()) throw ParseError("value is not an array");
        return std::get<Array>(v_);
    }

private:
    std::variant<std::int64_t, double, bool, std::string, Array> v_;
};

class Document {
public:
    bool has(const std::string& key) const { return values_.contains(key); }

    const Value& at(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ParseError("missing key: " + key);
        return it->second;
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second.as_int();
    }
    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second.as_double();
    }
    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second.as_bool();
    }
    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second.as_string();
    }

    void set(const std::string& key, Value v) { values_.insert_or_assign(key, std::move(v)); }

    const std::map<std::string, Value>& entries() const { return values_; }

private:
    std::map<std::string, Value> values_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Strips a trailing comment that is not inside a quoted string.
inline std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

inline Value parse_scalar(std::string_view tok, int line);

inline Value parse_value(std::string_view tok, int line) {
    tok = trim(tok);
    if (tok.empty()) throw ParseError("line " + std::to_string(line) + ": empty value");
    if (tok.front() == '[') {
        if (tok.back() != ']') {
            throw ParseError("line " + std::to_string(line) + ": unterminated array");
        }
        Array arr;
        std::string_view body = tok.substr(1, tok.size() - 2);
        std::size_t start = 0;
        bool in_string = false;
        for (std::size_t i = 0; i <= body.size(); ++i) {
            if (i < body.size() && body[i] == '"') in_string = !in_string;
            if (i == body.size() || (body[i] == ',' && !in_string)) {
                std::string_view item = trim(body.substr(start, i - start));
                if (!item.empty()) arr.push_back(parse_scalar(item, line));
                start = i + 1;
            }
        }
        return Value(std::move(arr));
    }
    return parse_scalar(tok, line);
}

inline Value parse_scalar(std::string_view tok, int line) {
    tok = trim(tok);
    if (tok.empty()) throw ParseError("line " + std::to_string(line) + ": empty value");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"') {
            throw ParseError("line " + std::to_string(line) + ": unterminated string");
        }
        return Value(std::string(tok.substr(1, tok.size() - 2)));
    }
    if (tok == "true") return Value(true);
    if (tok == "false") return Value(false);

    const std::string text(tok);
    const bool looks_float = text.find_first_of(".eE") != std::string::npos &&
                             text.find_first_not_of("+-0123456789.eE") == std::string::npos;
    try {
        std::size_t used = 0;
        if (looks_float) {
            const double d = std::stod(text, &used);
            if (used == text.size()) return Value(d);
        } else {
            const std::int64_t i = std::stoll(text, &used, 10);
            if (used == text.size()) return Value(i);
        }
    } catch (const std::exception&) {
        // fall through to error below
    }
    throw ParseError("line " + std::to_string(line) + ": cannot parse value '" + text + "'");
}

} // namespace detail

inline Document parse(std::string_view text) {
    Document doc;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        line = detail::trim(detail::strip_comment(line));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError("line " + std::to_string(line_no) + ": malformed section header");
            }
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (section.empty()) {
                throw ParseError("line " + std::to_string(line_no) + ": empty section name");
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        if (key.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty key");
        }
        const std::string full_key = section.empty() ? key : section + "." + key;
        doc.set(full_key, detail::parse_value(line.substr(eq + 1), line_no));
    }
    return doc;
}

inline Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

} // namespace sauav::toml
