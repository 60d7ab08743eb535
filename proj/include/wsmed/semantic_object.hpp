#ifndef WSMED_SEMANTIC_OBJECT_HPP
#define WSMED_SEMANTIC_OBJECT_HPP

// Semantic objects: a raw value tied to a domain concept, a lexical type and
// an explicit context of named modifiers. The context is what mediation
// compares and converts; values never travel without one.

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include <fmt/format.h>

#include "wsmed/descriptor.hpp"
#include "wsmed/errors.hpp"

namespace wsmed {

struct Concept {
    std::string name;

    auto operator<=>(const Concept&) const = default;
};

enum class ModifierKind { Static, Dynamic };

using ModifierValue = std::variant<bool, std::int64_t, double, std::string>;

inline std::string render_value(const ModifierValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return x;
            else return fmt::format("{}", x);
        },
        v);
}

// doubles compare with 1e-9 relative tolerance; other alternatives exactly
inline bool value_equal(const ModifierValue& a, const ModifierValue& b) {
    if (a.index() != b.index()) return false;
    if (std::holds_alternative<double>(a)) {
        double x = std::get<double>(a), y = std::get<double>(b);
        double scale = std::max({std::fabs(x), std::fabs(y), 1.0});
        return std::fabs(x - y) <= 1e-9 * scale;
    }
    return a == b;
}

struct Modifier {
    std::string name;
    ModifierValue value;
    ModifierKind kind = ModifierKind::Static;
};

class Context {
public:
    Context() = default;
    explicit Context(Concept domain) : domain_(std::move(domain)) {}

    const Concept& domain() const { return domain_; }
    const std::map<std::string, Modifier>& modifiers() const { return modifiers_; }
    bool empty() const { return modifiers_.empty(); }

    void add(Modifier m) {
        auto [it, inserted] = modifiers_.emplace(m.name, std::move(m));
        if (!inserted)
            throw AnnotationError(fmt::format("duplicate modifier '{}' in {} context", it->first, domain_.name));
    }

    const Modifier* find(const std::string& name) const {
        auto it = modifiers_.find(name);
        return it == modifiers_.end() ? nullptr : &it->second;
    }

    const ModifierValue& require(const std::string& name) const {
        const Modifier* m = find(name);
        if (!m)
            throw IncompleteContextError(
                fmt::format("{} context is missing modifier '{}'", domain_.name, name));
        return m->value;
    }

private:
    Concept domain_;
    std::map<std::string, Modifier> modifiers_;
};

inline bool context_equal(const Context& a, const Context& b) {
    if (a.domain() != b.domain())
        throw ConceptMismatchError(
            fmt::format("cannot compare contexts of '{}' and '{}'", a.domain().name, b.domain().name));
    if (a.modifiers().size() != b.modifiers().size()) return false;
    auto ia = a.modifiers().begin();
    auto ib = b.modifiers().begin();
    for (; ia != a.modifiers().end(); ++ia, ++ib) {
        if (ia->first != ib->first) return false;
        if (!value_equal(ia->second.value, ib->second.value)) return false;
    }
    return true;
}

using LexicalValue = std::variant<double, std::int64_t, std::string>;

struct SemanticObject {
    Concept domain;
    LexicalValue value;
    LexicalType type = LexicalType::String;
    Context context;
};

// wire form of a value as service stubs exchange it; monetary doubles carry
// two decimals
inline std::string render_raw(const LexicalValue& v, LexicalType type) {
    switch (type) {
        case LexicalType::Double: return fmt::format("{:.2f}", std::get<double>(v));
        case LexicalType::Int: return fmt::format("{}", std::get<std::int64_t>(v));
        case LexicalType::String:
        case LexicalType::DateString: return std::get<std::string>(v);
    }
    return {};
}

} // namespace wsmed

#endif
