#ifndef WSMED_DETAIL_TOMLMINI_HPP
#define WSMED_DETAIL_TOMLMINI_HPP

// Minimal TOML-subset reader covering what the knowledge-base and scenario
// documents use: [table] / [[array-of-tables]] headers with dotted paths,
// bare and quoted keys, string/bool/integer/float scalars, flat arrays
// (single- or multi-line), and # comments.

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "wsmed/errors.hpp"

namespace wsmed::detail::toml {

class Value;
using Array = std::vector<Value>;

class Value {
public:
    using Storage = std::variant<bool, std::int64_t, double, std::string, Array>;

    Value() : v_(std::string{}) {}
    explicit Value(Storage v) : v_(std::move(v)) {}

    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_float() const { return std::holds_alternative<double>(v_); }
    bool is_string() const { return std::holds_alternative<std::string>(v_); }
    bool is_array() const { return std::holds_alternative<Array>(v_); }

    bool as_bool(const std::string& what) const {
        if (!is_bool()) throw ParseError(fmt::format("{}: expected a boolean", what));
        return std::get<bool>(v_);
    }
    std::int64_t as_int(const std::string& what) const {
        if (!is_int()) throw ParseError(fmt::format("{}: expected an integer", what));
        return std::get<std::int64_t>(v_);
    }
    // integers coerce to double here; TOML authors rarely write "1.0" for "1"
    double as_number(const std::string& what) const {
        if (is_int()) return static_cast<double>(std::get<std::int64_t>(v_));
        if (is_float()) return std::get<double>(v_);
        throw ParseError(fmt::format("{}: expected a number", what));
    }
    const std::string& as_string(const std::string& what) const {
        if (!is_string()) throw ParseError(fmt::format("{}: expected a string", what));
        return std::get<std::string>(v_);
    }
    const Array& as_array(const std::string& what) const {
        if (!is_array()) throw ParseError(fmt::format("{}: expected an array", what));
        return std::get<Array>(v_);
    }

    const Storage& storage() const { return v_; }

private:
    Storage v_;
};

struct Table {
    std::map<std::string, Value> values;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> arrays;

    const Value* find(const std::string& key) const {
        auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    }
    const Table* find_table(const std::string& key) const {
        auto it = tables.find(key);
        return it == tables.end() ? nullptr : &it->second;
    }
    const std::vector<Table>* find_array(const std::string& key) const {
        auto it = arrays.find(key);
        return it == arrays.end() ? nullptr : &it->second;
    }

    const Value& require(const std::string& key, const std::string& what) const {
        const Value* v = find(key);
        if (!v) throw ParseError(fmt::format("{}: missing key '{}'", what, key));
        return *v;
    }
    std::string get_string(const std::string& key, const std::string& what) const {
        return require(key, what).as_string(fmt::format("{}.{}", what, key));
    }
    double get_number(const std::string& key, const std::string& what) const {
        return require(key, what).as_number(fmt::format("{}.{}", what, key));
    }
    std::int64_t get_int(const std::string& key, const std::string& what) const {
        return require(key, what).as_int(fmt::format("{}.{}", what, key));
    }
    bool get_bool(const std::string& key, const std::string& what) const {
        return require(key, what).as_bool(fmt::format("{}.{}", what, key));
    }
    std::vector<std::string> get_string_array(const std::string& key, const std::string& what) const {
        std::vector<std::string> out;
        const auto& arr = require(key, what).as_array(fmt::format("{}.{}", what, key));
        for (const auto& v : arr) out.push_back(v.as_string(fmt::format("{}.{}[]", what, key)));
        return out;
    }
};

namespace impl {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// cut a trailing comment, honouring double-quoted strings
inline std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_string) {
            if (c == '\\') { ++i; continue; }
            if (c == '"') in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

inline bool is_bare_key_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    int line;

    bool eol() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void skip_ws() {
        while (!eol() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(fmt::format("line {}: {}", line, msg));
    }
};

inline std::string parse_basic_string(Cursor& c) {
    if (c.eol() || c.peek() != '"') c.fail("expected '\"'");
    ++c.pos;
    std::string out;
    while (!c.eol()) {
        char ch = c.text[c.pos++];
        if (ch == '"') return out;
        if (ch == '\\') {
            if (c.eol()) c.fail("dangling escape");
            char esc = c.text[c.pos++];
            switch (esc) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                default: c.fail(fmt::format("unsupported escape '\\{}'", esc));
            }
        } else {
            out.push_back(ch);
        }
    }
    c.fail("unterminated string");
}

inline std::string parse_key_segment(Cursor& c) {
    c.skip_ws();
    if (c.eol()) c.fail("expected a key");
    if (c.peek() == '"') return parse_basic_string(c);
    std::size_t start = c.pos;
    while (!c.eol() && is_bare_key_char(c.peek())) ++c.pos;
    if (c.pos == start) c.fail("expected a key");
    return std::string(c.text.substr(start, c.pos - start));
}

inline std::vector<std::string> parse_key_path(Cursor& c) {
    std::vector<std::string> path;
    path.push_back(parse_key_segment(c));
    c.skip_ws();
    while (!c.eol() && c.peek() == '.') {
        ++c.pos;
        path.push_back(parse_key_segment(c));
        c.skip_ws();
    }
    return path;
}

inline Value parse_value(Cursor& c);

inline Value parse_array(Cursor& c) {
    // caller consumed '['
    Array items;
    for (;;) {
        c.skip_ws();
        if (c.eol()) c.fail("unterminated array");
        if (c.peek() == ']') { ++c.pos; break; }
        items.push_back(parse_value(c));
        c.skip_ws();
        if (c.eol()) c.fail("unterminated array");
        if (c.peek() == ',') { ++c.pos; continue; }
        if (c.peek() == ']') { ++c.pos; break; }
        c.fail("expected ',' or ']' in array");
    }
    return Value(std::move(items));
}

inline Value parse_scalar_token(Cursor& c) {
    std::size_t start = c.pos;
    while (!c.eol()) {
        char ch = c.peek();
        if (ch == ',' || ch == ']' || ch == ' ' || ch == '\t') break;
        ++c.pos;
    }
    std::string token(c.text.substr(start, c.pos - start));
    if (token.empty()) c.fail("expected a value");
    if (token == "true") return Value(true);
    if (token == "false") return Value(false);

    bool int_like = true;
    for (std::size_t i = 0; i < token.size(); ++i) {
        char ch = token[i];
        if (i == 0 && (ch == '+' || ch == '-')) continue;
        if (ch < '0' || ch > '9') { int_like = false; break; }
    }
    if (int_like && token != "+" && token != "-") {
        errno = 0;
        char* end = nullptr;
        long long v = std::strtoll(token.c_str(), &end, 10);
        if (errno == 0 && end && *end == '\0') return Value(static_cast<std::int64_t>(v));
    }
    errno = 0;
    char* end = nullptr;
    double d = std::strtod(token.c_str(), &end);
    if (errno == 0 && end && *end == '\0' && end != token.c_str()) return Value(d);
    c.fail(fmt::format("cannot parse value '{}'", token));
}

inline Value parse_value(Cursor& c) {
    c.skip_ws();
    if (c.eol()) c.fail("expected a value");
    char ch = c.peek();
    if (ch == '"') return Value(parse_basic_string(c));
    if (ch == '[') { ++c.pos; return parse_array(c); }
    return parse_scalar_token(c);
}

// true when the line still has an unclosed '[' outside of strings
inline bool array_open(std::string_view text) {
    bool in_string = false;
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') { ++i; continue; }
            if (c == '"') in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '[') {
            ++depth;
        } else if (c == ']') {
            --depth;
        }
    }
    return depth > 0;
}

inline Table* navigate(Table& root, const std::vector<std::string>& path, std::size_t upto, int line) {
    Table* cur = &root;
    for (std::size_t i = 0; i < upto; ++i) {
        const std::string& seg = path[i];
        if (cur->values.count(seg))
            throw ParseError(fmt::format("line {}: '{}' is already a value", line, seg));
        if (auto it = cur->arrays.find(seg); it != cur->arrays.end()) {
            cur = &it->second.back();
        } else {
            cur = &cur->tables[seg];
        }
    }
    return cur;
}

} // namespace impl

inline Table parse(std::string_view text) {
    Table root;
    Table* current = &root;

    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }

    for (std::size_t li = 0; li < lines.size(); ++li) {
        int line_no = static_cast<int>(li) + 1;
        std::string_view stripped = impl::trim(impl::strip_comment(lines[li]));
        if (stripped.empty()) continue;

        if (stripped.front() == '[') {
            bool is_array = stripped.size() > 1 && stripped[1] == '[';
            std::string_view inner = stripped;
            inner.remove_prefix(is_array ? 2 : 1);
            std::size_t close = inner.find(is_array ? "]]" : "]");
            if (close == std::string_view::npos)
                throw ParseError(fmt::format("line {}: unterminated table header", line_no));
            if (!impl::trim(inner.substr(close + (is_array ? 2 : 1))).empty())
                throw ParseError(fmt::format("line {}: trailing characters after table header", line_no));
            impl::Cursor c{inner.substr(0, close), 0, line_no};
            auto path = impl::parse_key_path(c);
            c.skip_ws();
            if (!c.eol()) c.fail("bad table header");
            Table* parent = impl::navigate(root, path, path.size() - 1, line_no);
            const std::string& leaf = path.back();
            if (is_array) {
                if (parent->tables.count(leaf) || parent->values.count(leaf))
                    throw ParseError(fmt::format("line {}: '{}' redefined as array of tables", line_no, leaf));
                parent->arrays[leaf].emplace_back();
                current = &parent->arrays[leaf].back();
            } else {
                if (parent->arrays.count(leaf) || parent->values.count(leaf))
                    throw ParseError(fmt::format("line {}: '{}' redefined as table", line_no, leaf));
                current = &parent->tables[leaf];
            }
            continue;
        }

        // key = value, joining continuation lines of an open array
        std::string joined(stripped);
        while (impl::array_open(joined) && li + 1 < lines.size()) {
            ++li;
            line_no = static_cast<int>(li) + 1;
            std::string_view cont = impl::trim(impl::strip_comment(lines[li]));
            joined.push_back(' ');
            joined.append(cont);
        }

        impl::Cursor c{joined, 0, line_no};
        auto path = impl::parse_key_path(c);
        c.skip_ws();
        if (c.eol() || c.peek() != '=') c.fail("expected '='");
        ++c.pos;
        Value v = impl::parse_value(c);
        c.skip_ws();
        if (!c.eol()) c.fail("trailing characters after value");

        Table* target = impl::navigate(*current, path, path.size() - 1, line_no);
        const std::string& leaf = path.back();
        if (target->values.count(leaf) || target->tables.count(leaf) || target->arrays.count(leaf))
            c.fail(fmt::format("duplicate key '{}'", leaf));
        target->values.emplace(leaf, std::move(v));
    }
    return root;
}

} // namespace wsmed::detail::toml

#endif
