#ifndef WSMED_DESCRIPTOR_HPP
#define WSMED_DESCRIPTOR_HPP

// Context-annotated service descriptors. A descriptor document is a small
// XML-shaped format: one <service> element, one or more <operation> elements
// each holding an <input> and an <output> section of self-closing <part/>
// elements. Every part carries a context attribute of the form
//   ctxt1:Concept ctxt2:Term ctxt2:Term ...
// with exactly one concept term and any number of modifier terms, separated
// by single spaces. Parsing and serialization round-trip byte-for-byte at the
// annotation level.

#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "wsmed/errors.hpp"

namespace wsmed {

enum class LexicalType { Double, String, Int, DateString };

inline const char* to_string(LexicalType t) {
    switch (t) {
        case LexicalType::Double: return "double";
        case LexicalType::String: return "string";
        case LexicalType::Int: return "int";
        case LexicalType::DateString: return "date-string";
    }
    return "?";
}

inline LexicalType lexical_type_from(std::string_view s) {
    if (s == "double") return LexicalType::Double;
    if (s == "string") return LexicalType::String;
    if (s == "int") return LexicalType::Int;
    if (s == "date-string") return LexicalType::DateString;
    throw ParseError(fmt::format("unknown part type '{}'", s));
}

enum class Direction { Input, Output };

inline const char* to_string(Direction d) { return d == Direction::Input ? "input" : "output"; }

struct QualifiedTerm {
    std::string prefix; // "ctxt1" (concept) or "ctxt2" (modifier term)
    std::string local;

    bool operator==(const QualifiedTerm&) const = default;
};

inline bool valid_local_name(std::string_view s) {
    if (s.empty()) return false;
    char c0 = s.front();
    if (!((c0 >= 'A' && c0 <= 'Z') || (c0 >= 'a' && c0 <= 'z'))) return false;
    for (char c : s)
        if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'))
            return false;
    return true;
}

struct ContextAnnotation {
    QualifiedTerm concept_term;                   // prefix ctxt1
    std::vector<QualifiedTerm> static_terms; // prefix ctxt2, textual order preserved

    bool operator==(const ContextAnnotation&) const = default;
};

struct MessagePart {
    std::string name;
    LexicalType lexical_type = LexicalType::String;
    ContextAnnotation annotation;
    Direction direction = Direction::Input;

    bool operator==(const MessagePart&) const = default;
};

struct ServiceOperation {
    std::string name;
    std::vector<MessagePart> inputs;
    std::vector<MessagePart> outputs;

    bool operator==(const ServiceOperation&) const = default;
};

struct AnnotatedDescriptor {
    std::string service_name;
    std::string functionality; // community-matching key
    std::vector<ServiceOperation> operations;

    bool operator==(const AnnotatedDescriptor&) const = default;
};

// --- context annotation text form ------------------------------------------

inline ContextAnnotation parse_context_annotation(std::string_view text, const std::string& where) {
    ContextAnnotation ann;
    bool have_concept = false;
    std::size_t pos = 0;
    int index = 0;
    while (pos <= text.size()) {
        std::size_t sp = text.find(' ', pos);
        std::string_view token = text.substr(pos, sp == std::string_view::npos ? std::string_view::npos : sp - pos);
        pos = sp == std::string_view::npos ? text.size() + 1 : sp + 1;
        if (token.empty())
            throw AnnotationError(fmt::format("{}: malformed context annotation (empty term)", where));
        std::size_t colon = token.find(':');
        if (colon == std::string_view::npos)
            throw AnnotationError(fmt::format("{}: term '{}' has no prefix", where, token));
        std::string prefix(token.substr(0, colon));
        std::string local(token.substr(colon + 1));
        if (prefix != "ctxt1" && prefix != "ctxt2")
            throw AnnotationError(fmt::format("{}: unknown prefix '{}'", where, prefix));
        if (!valid_local_name(local))
            throw AnnotationError(fmt::format("{}: invalid term name '{}'", where, local));
        if (prefix == "ctxt1") {
            if (have_concept)
                throw AnnotationError(fmt::format("{}: duplicate concept term '{}'", where, local));
            if (index != 0)
                throw AnnotationError(fmt::format("{}: concept term must come first", where));
            ann.concept_term = {prefix, local};
            have_concept = true;
        } else {
            for (const auto& t : ann.static_terms)
                if (t.local == local)
                    throw AnnotationError(fmt::format("{}: duplicate term '{}'", where, local));
            ann.static_terms.push_back({prefix, local});
        }
        ++index;
    }
    if (!have_concept)
        throw AnnotationError(fmt::format("{}: missing concept term", where));
    return ann;
}

inline std::string serialize_context_annotation(const ContextAnnotation& ann) {
    std::string out = fmt::format("{}:{}", ann.concept_term.prefix, ann.concept_term.local);
    for (const auto& t : ann.static_terms) out += fmt::format(" {}:{}", t.prefix, t.local);
    return out;
}

// --- document parsing -------------------------------------------------------

namespace detail {

struct DocCursor {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(fmt::format("line {}: {}", line, msg));
    }
    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') ++line;
        ++pos;
    }
    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) advance();
    }
};

struct RawTag {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    bool closing = false;      // </name>
    bool self_closing = false; // <name .../>
    int line = 0;
};

inline std::string read_name(DocCursor& c) {
    std::size_t start = c.pos;
    while (!c.eof()) {
        char ch = c.peek();
        if ((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_')
            c.advance();
        else
            break;
    }
    if (c.pos == start) c.fail("expected a name");
    return std::string(c.text.substr(start, c.pos - start));
}

inline RawTag read_tag(DocCursor& c) {
    c.skip_ws();
    if (c.eof()) c.fail("unexpected end of document");
    if (c.peek() != '<') c.fail(fmt::format("expected '<', found '{}'", c.peek()));
    RawTag tag;
    tag.line = c.line;
    c.advance();
    if (!c.eof() && c.peek() == '/') {
        tag.closing = true;
        c.advance();
    }
    tag.name = read_name(c);
    for (;;) {
        c.skip_ws();
        if (c.eof()) c.fail("unterminated tag");
        char ch = c.peek();
        if (ch == '>') {
            c.advance();
            break;
        }
        if (ch == '/') {
            c.advance();
            if (c.eof() || c.peek() != '>') c.fail("expected '>' after '/'");
            c.advance();
            tag.self_closing = true;
            break;
        }
        if (tag.closing) c.fail("closing tag cannot carry attributes");
        std::string key = read_name(c);
        c.skip_ws();
        if (c.eof() || c.peek() != '=') c.fail(fmt::format("expected '=' after attribute '{}'", key));
        c.advance();
        c.skip_ws();
        if (c.eof() || c.peek() != '"') c.fail(fmt::format("attribute '{}' must be double-quoted", key));
        c.advance();
        std::size_t start = c.pos;
        while (!c.eof() && c.peek() != '"') c.advance();
        if (c.eof()) c.fail("unterminated attribute value");
        std::string value(c.text.substr(start, c.pos - start));
        c.advance();
        for (const auto& [k, v] : tag.attrs)
            if (k == key) c.fail(fmt::format("duplicate attribute '{}'", key));
        tag.attrs.emplace_back(std::move(key), std::move(value));
    }
    return tag;
}

inline const std::string& attr(const RawTag& tag, const std::string& key) {
    for (const auto& [k, v] : tag.attrs)
        if (k == key) return v;
    throw ParseError(fmt::format("line {}: <{}> missing attribute '{}'", tag.line, tag.name, key));
}

inline void check_attrs(const RawTag& tag, std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : tag.attrs) {
        bool ok = false;
        for (const char* a : allowed)
            if (k == a) ok = true;
        if (!ok) throw ParseError(fmt::format("line {}: <{}> has unknown attribute '{}'", tag.line, tag.name, k));
    }
}

inline MessagePart read_part(const RawTag& tag, Direction dir, const std::string& op_name) {
    if (!tag.self_closing) throw ParseError(fmt::format("line {}: <part> must be self-closing", tag.line));
    check_attrs(tag, {"name", "type", "context"});
    MessagePart part;
    part.name = attr(tag, "name");
    if (part.name.empty()) throw ParseError(fmt::format("line {}: empty part name", tag.line));
    part.lexical_type = lexical_type_from(attr(tag, "type"));
    part.direction = dir;
    part.annotation = parse_context_annotation(
        attr(tag, "context"), fmt::format("operation '{}' part '{}'", op_name, part.name));
    return part;
}

} // namespace detail

inline AnnotatedDescriptor parse_descriptor(std::string_view text) {
    detail::DocCursor c{text};
    detail::RawTag service = detail::read_tag(c);
    if (service.closing || service.self_closing || service.name != "service")
        c.fail("document must start with <service>");
    detail::check_attrs(service, {"name", "functionality"});

    AnnotatedDescriptor d;
    d.service_name = detail::attr(service, "name");
    d.functionality = detail::attr(service, "functionality");
    if (d.service_name.empty()) c.fail("empty service name");
    if (d.functionality.empty()) c.fail("empty functionality");

    for (;;) {
        detail::RawTag tag = detail::read_tag(c);
        if (tag.closing && tag.name == "service") break;
        if (tag.closing || tag.self_closing || tag.name != "operation")
            throw ParseError(fmt::format("line {}: expected <operation> or </service>", tag.line));
        detail::check_attrs(tag, {"name"});

        ServiceOperation op;
        op.name = detail::attr(tag, "name");
        if (op.name.empty()) throw ParseError(fmt::format("line {}: empty operation name", tag.line));
        for (const auto& existing : d.operations)
            if (existing.name == op.name)
                throw ParseError(fmt::format("line {}: duplicate operation '{}'", tag.line, op.name));

        for (Direction dir : {Direction::Input, Direction::Output}) {
            const char* section = dir == Direction::Input ? "input" : "output";
            detail::RawTag open = detail::read_tag(c);
            if (open.closing || open.self_closing || open.name != section)
                throw ParseError(fmt::format("line {}: expected <{}>", open.line, section));
            detail::check_attrs(open, {});
            auto& parts = dir == Direction::Input ? op.inputs : op.outputs;
            for (;;) {
                detail::RawTag inner = detail::read_tag(c);
                if (inner.closing && inner.name == section) break;
                if (inner.name != "part")
                    throw ParseError(fmt::format("line {}: expected <part/> or </{}>", inner.line, section));
                MessagePart part = detail::read_part(inner, dir, op.name);
                for (const auto& p : parts)
                    if (p.name == part.name)
                        throw ParseError(
                            fmt::format("line {}: duplicate {} part '{}'", inner.line, section, part.name));
                parts.push_back(std::move(part));
            }
        }

        detail::RawTag close = detail::read_tag(c);
        if (!close.closing || close.name != "operation")
            throw ParseError(fmt::format("line {}: expected </operation>", close.line));
        d.operations.push_back(std::move(op));
    }

    c.skip_ws();
    if (!c.eof()) c.fail("trailing content after </service>");
    if (d.operations.empty()) throw ParseError("descriptor has no operations");
    return d;
}

inline std::string serialize_descriptor(const AnnotatedDescriptor& d) {
    std::string out;
    out += fmt::format("<service name=\"{}\" functionality=\"{}\">\n", d.service_name, d.functionality);
    for (const auto& op : d.operations) {
        out += fmt::format("  <operation name=\"{}\">\n", op.name);
        for (Direction dir : {Direction::Input, Direction::Output}) {
            const char* section = dir == Direction::Input ? "input" : "output";
            out += fmt::format("    <{}>\n", section);
            for (const auto& part : (dir == Direction::Input ? op.inputs : op.outputs))
                out += fmt::format("      <part name=\"{}\" type=\"{}\" context=\"{}\"/>\n", part.name,
                                   to_string(part.lexical_type), serialize_context_annotation(part.annotation));
            out += fmt::format("    </{}>\n", section);
        }
        out += "  </operation>\n";
    }
    out += "</service>\n";
    return out;
}

inline const ServiceOperation& find_operation(const AnnotatedDescriptor& d, const std::string& op_name) {
    for (const auto& op : d.operations)
        if (op.name == op_name) return op;
    throw NotFoundError(fmt::format("service '{}' has no operation '{}'", d.service_name, op_name));
}

inline const MessagePart& find_part(const AnnotatedDescriptor& d, const std::string& op_name,
                                    const std::string& part_name) {
    const ServiceOperation& op = find_operation(d, op_name);
    for (const auto& p : op.inputs)
        if (p.name == part_name) return p;
    for (const auto& p : op.outputs)
        if (p.name == part_name) return p;
    throw NotFoundError(fmt::format("operation '{}' has no part '{}'", op_name, part_name));
}

inline const MessagePart& find_part(const AnnotatedDescriptor& d, const std::string& op_name,
                                    const std::string& part_name, Direction dir) {
    const ServiceOperation& op = find_operation(d, op_name);
    for (const auto& p : (dir == Direction::Input ? op.inputs : op.outputs))
        if (p.name == part_name) return p;
    throw NotFoundError(
        fmt::format("operation '{}' has no {} part '{}'", op_name, to_string(dir), part_name));
}

inline ContextAnnotation context_of_part(const AnnotatedDescriptor& d, const std::string& op_name,
                                         const std::string& part_name) {
    return find_part(d, op_name, part_name).annotation;
}

} // namespace wsmed

#endif
