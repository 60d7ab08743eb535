#ifndef WSMED_ONTOLOGY_HPP
#define WSMED_ONTOLOGY_HPP

// Domain concepts, per-concept modifier schemas and the knowledge base of
// inference rules and conversion tables.
//
// The knowledge-base document is TOML. Layout:
//
//   [concepts]                       # concept -> carrier lexical type
//   Price = "double"
//
//   [modifiers.<Concept>.<Name>]     # one table per modifier schema
//   kind = "static" | "dynamic"
//   terms = ["France", ...]          # enumerated terms, value == term
//   [modifiers.<Concept>.<Name>.terms]  # or: term -> typed value
//   VATincluded = true
//   # or: domain = "scale_factors" | "date_formats"  (shared term table)
//   # or: numeric = true                              (rule-supplied numbers)
//
//   [scale_factors]                  # term -> positive integer
//   [date_formats]                   # term -> DD/MM/YYYY | MM/DD/YYYY | YYYY/MM/DD
//   [rates.currency]                 # FROM-TO = positive rate
//   [rates.vat]                      # Country = percent (>= 0)
//
//   [[rules]]                        # static premises -> one dynamic value
//   concept = "Price"
//   when = ["Country=France"]
//   then = "Currency=EUR"
//
// Rule premises are written against modifier *values*, conclusions against
// the target schema's terms. Missing reverse currency rates are completed as
// reciprocals, missing cross rates transitively; a VATRate rule is derived
// from [rates.vat] for every concept that declares a static Country and a
// dynamic VATRate schema.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "wsmed/descriptor.hpp"
#include "wsmed/detail/dates.hpp"
#include "wsmed/detail/tomlmini.hpp"
#include "wsmed/errors.hpp"
#include "wsmed/semantic_object.hpp"

namespace wsmed {

struct ConceptInfo {
    Concept concept_id;
    LexicalType carrier = LexicalType::String;
};

struct ModifierSchema {
    std::string concept_name;
    std::string name;
    ModifierKind kind = ModifierKind::Static;
    std::vector<std::pair<std::string, ModifierValue>> terms; // enumerated domain
    bool numeric = false;                                     // values supplied by rules
};

struct InferenceRule {
    std::string concept_name;
    std::vector<std::pair<std::string, ModifierValue>> premises; // sorted by modifier name
    std::string conclusion_name;
    ModifierValue conclusion_value;
};

class KnowledgeBase {
public:
    const std::vector<ConceptInfo>& concepts() const { return concepts_; }
    const std::vector<ModifierSchema>& schemas() const { return schemas_; }
    const std::vector<InferenceRule>& rules() const { return rules_; }
    const std::map<std::string, double>& vat_rates() const { return vat_rates_; }
    const std::map<std::string, std::int64_t>& scale_factors() const { return scale_factors_; }
    const std::map<std::string, std::string>& date_formats() const { return date_formats_; }
    const std::map<std::pair<std::string, std::string>, double>& currency_rates() const { return rates_; }

    const ConceptInfo* find_concept(const std::string& name) const {
        for (const auto& c : concepts_)
            if (c.concept_id.name == name) return &c;
        return nullptr;
    }

    const ModifierSchema* find_schema(const std::string& concept_name, const std::string& modifier) const {
        for (const auto& s : schemas_)
            if (s.concept_name == concept_name && s.name == modifier) return &s;
        return nullptr;
    }

    std::vector<const ModifierSchema*> schemas_of(const std::string& concept_name, ModifierKind kind) const {
        std::vector<const ModifierSchema*> out;
        for (const auto& s : schemas_)
            if (s.concept_name == concept_name && s.kind == kind) out.push_back(&s);
        return out;
    }

    // (schema, value) of an annotation term, or nullptr when unknown
    const std::pair<std::size_t, ModifierValue>* find_term(const std::string& concept_name,
                                                           const std::string& term) const {
        auto it = term_index_.find({concept_name, term});
        return it == term_index_.end() ? nullptr : &it->second;
    }

    bool has_rate(const std::string& from, const std::string& to) const {
        return from == to || rates_.count({from, to}) > 0;
    }

    double currency_rate(const std::string& from, const std::string& to) const {
        if (from == to) return 1.0;
        auto it = rates_.find({from, to});
        if (it == rates_.end())
            throw MissingRateError(fmt::format("no exchange rate for {} -> {}", from, to));
        return it->second;
    }

    friend KnowledgeBase load_knowledge_base(std::string_view text);

private:
    std::vector<ConceptInfo> concepts_;
    std::vector<ModifierSchema> schemas_;
    std::vector<InferenceRule> rules_;
    std::map<std::pair<std::string, std::string>, double> rates_;
    std::map<std::string, double> vat_rates_;
    std::map<std::string, std::int64_t> scale_factors_;
    std::map<std::string, std::string> date_formats_;
    // (concept, term) -> (schema index, modifier value)
    std::map<std::pair<std::string, std::string>, std::pair<std::size_t, ModifierValue>> term_index_;
};

namespace detail {

inline ModifierValue toml_modifier_value(const toml::Value& v, const std::string& what) {
    if (v.is_bool()) return v.as_bool(what);
    if (v.is_int()) return v.as_int(what);
    if (v.is_float()) return v.as_number(what);
    return v.as_string(what);
}

// literal from a rule string: bool, integer, float, else bare string
inline ModifierValue parse_value_literal(std::string_view text) {
    std::string s(text);
    if (s == "true") return true;
    if (s == "false") return false;
    bool int_like = !s.empty();
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (i == 0 && (c == '+' || c == '-')) continue;
        if (c < '0' || c > '9') { int_like = false; break; }
    }
    if (int_like) {
        errno = 0;
        char* end = nullptr;
        long long n = std::strtoll(s.c_str(), &end, 10);
        if (errno == 0 && end && *end == '\0') return static_cast<std::int64_t>(n);
    }
    errno = 0;
    char* end = nullptr;
    double d = std::strtod(s.c_str(), &end);
    if (errno == 0 && end && *end == '\0' && end != s.c_str() &&
        s.find_first_not_of("+-.0123456789eE") == std::string::npos)
        return d;
    return s;
}

inline std::pair<std::string, std::string> split_assignment(std::string_view text, const std::string& what) {
    std::size_t eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 >= text.size())
        throw ParseError(fmt::format("{}: expected 'Name=value', got '{}'", what, text));
    return {std::string(text.substr(0, eq)), std::string(text.substr(eq + 1))};
}

} // namespace detail

inline KnowledgeBase load_knowledge_base(std::string_view text) {
    using detail::toml::Table;
    Table doc = detail::toml::parse(text);
    KnowledgeBase kb;

    const Table* concepts = doc.find_table("concepts");
    if (!concepts || concepts->values.empty()) throw ParseError("knowledge base: missing [concepts]");
    for (const auto& [name, carrier] : concepts->values)
        kb.concepts_.push_back({Concept{name}, lexical_type_from(carrier.as_string("concepts." + name))});

    if (const Table* factors = doc.find_table("scale_factors")) {
        for (const auto& [term, v] : factors->values) {
            std::int64_t factor = v.as_int("scale_factors." + term);
            if (factor <= 0)
                throw ConsistencyError(fmt::format("scale factor '{}' must be positive", term));
            kb.scale_factors_[term] = factor;
        }
    }

    if (const Table* formats = doc.find_table("date_formats")) {
        for (const auto& [term, v] : formats->values) {
            std::string pattern = v.as_string("date_formats." + term);
            if (!detail::known_date_pattern(pattern))
                throw ConsistencyError(fmt::format("unknown date format pattern '{}'", pattern));
            kb.date_formats_[term] = pattern;
        }
    }

    if (const Table* rates = doc.find_table("rates")) {
        if (const Table* vat = rates->find_table("vat")) {
            for (const auto& [country, v] : vat->values) {
                double rate = v.as_number("rates.vat." + country);
                if (rate < 0)
                    throw ConsistencyError(fmt::format("VAT rate for {} must be >= 0", country));
                kb.vat_rates_[country] = rate;
            }
        }
        if (const Table* currency = rates->find_table("currency")) {
            for (const auto& [pair, v] : currency->values) {
                std::size_t dash = pair.find('-');
                if (dash == std::string::npos || dash == 0 || dash + 1 >= pair.size())
                    throw ParseError(fmt::format("rates.currency: bad pair key '{}'", pair));
                double rate = v.as_number("rates.currency." + pair);
                if (!(rate > 0))
                    throw ConsistencyError(fmt::format("exchange rate {} must be positive", pair));
                kb.rates_[{pair.substr(0, dash), pair.substr(dash + 1)}] = rate;
            }
        }
    }

    // modifier schemas
    if (const Table* modifiers = doc.find_table("modifiers")) {
        for (const auto& [concept_name, per_concept] : modifiers->tables) {
            if (!kb.find_concept(concept_name))
                throw ConsistencyError(fmt::format("modifiers declared for unknown concept '{}'", concept_name));
            for (const auto& [mod_name, decl] : per_concept.tables) {
                std::string what = fmt::format("modifiers.{}.{}", concept_name, mod_name);
                ModifierSchema schema;
                schema.concept_name = concept_name;
                schema.name = mod_name;
                std::string kind = decl.get_string("kind", what);
                if (kind == "static") schema.kind = ModifierKind::Static;
                else if (kind == "dynamic") schema.kind = ModifierKind::Dynamic;
                else throw ParseError(fmt::format("{}: kind must be 'static' or 'dynamic'", what));

                int domain_forms = 0;
                if (const detail::toml::Value* terms = decl.find("terms")) {
                    ++domain_forms;
                    for (const auto& t : terms->as_array(what + ".terms")) {
                        std::string term = t.as_string(what + ".terms[]");
                        schema.terms.emplace_back(term, ModifierValue{term});
                    }
                }
                if (const Table* terms = decl.find_table("terms")) {
                    ++domain_forms;
                    for (const auto& [term, v] : terms->values)
                        schema.terms.emplace_back(term, detail::toml_modifier_value(v, what + ".terms." + term));
                }
                if (const detail::toml::Value* domain = decl.find("domain")) {
                    ++domain_forms;
                    std::string ref = domain->as_string(what + ".domain");
                    if (ref == "scale_factors") {
                        for (const auto& [term, factor] : kb.scale_factors_)
                            schema.terms.emplace_back(term, ModifierValue{factor});
                    } else if (ref == "date_formats") {
                        for (const auto& [term, pattern] : kb.date_formats_)
                            schema.terms.emplace_back(term, ModifierValue{pattern});
                    } else {
                        throw ParseError(fmt::format("{}: unknown domain reference '{}'", what, ref));
                    }
                    if (schema.terms.empty())
                        throw ConsistencyError(fmt::format("{}: referenced table [{}] is empty", what, ref));
                }
                if (const detail::toml::Value* numeric = decl.find("numeric")) {
                    if (numeric->as_bool(what + ".numeric")) {
                        ++domain_forms;
                        schema.numeric = true;
                    }
                }
                if (domain_forms != 1)
                    throw ParseError(fmt::format(
                        "{}: declare exactly one of terms, domain or numeric = true", what));
                kb.schemas_.push_back(std::move(schema));
            }
        }
    }

    auto find_schema_checked = [&](const std::string& concept_name, const std::string& modifier,
                                   const std::string& what) -> const ModifierSchema& {
        const ModifierSchema* s = kb.find_schema(concept_name, modifier);
        if (!s)
            throw ConsistencyError(
                fmt::format("{}: no schema for modifier '{}' of concept '{}'", what, modifier, concept_name));
        return *s;
    };

    // premises name modifier values, conclusions name domain terms
    auto check_premise_value = [](const ModifierSchema& schema, const ModifierValue& value,
                                  const std::string& what) {
        if (schema.numeric) {
            if (!std::holds_alternative<double>(value) && !std::holds_alternative<std::int64_t>(value))
                throw ConsistencyError(fmt::format("{}: '{}' expects a numeric value", what, schema.name));
            return;
        }
        for (const auto& [term, v] : schema.terms)
            if (value_equal(v, value)) return;
        throw ConsistencyError(
            fmt::format("{}: value '{}' is outside the domain of '{}'", what, render_value(value), schema.name));
    };
    auto conclusion_value_for = [](const ModifierSchema& schema, const std::string& literal,
                                   const std::string& what) -> ModifierValue {
        if (schema.numeric) {
            ModifierValue v = detail::parse_value_literal(literal);
            if (std::holds_alternative<std::int64_t>(v)) return static_cast<double>(std::get<std::int64_t>(v));
            if (!std::holds_alternative<double>(v))
                throw ConsistencyError(fmt::format("{}: '{}' expects a numeric value", what, schema.name));
            return v;
        }
        for (const auto& [term, v] : schema.terms)
            if (term == literal) return v;
        throw ConsistencyError(
            fmt::format("{}: '{}' is not a term of '{}'", what, literal, schema.name));
    };

    if (const auto* rules = doc.find_array("rules")) {
        int idx = 0;
        for (const Table& entry : *rules) {
            std::string what = fmt::format("rules[{}]", idx++);
            InferenceRule rule;
            rule.concept_name = entry.get_string("concept", what);
            if (!kb.find_concept(rule.concept_name))
                throw ConsistencyError(fmt::format("{}: unknown concept '{}'", what, rule.concept_name));
            for (const std::string& premise : entry.get_string_array("when", what)) {
                auto [name, literal] = detail::split_assignment(premise, what);
                const ModifierSchema& schema = find_schema_checked(rule.concept_name, name, what);
                if (schema.kind != ModifierKind::Static)
                    throw ConsistencyError(fmt::format("{}: premise '{}' is not a static modifier", what, name));
                ModifierValue value = detail::parse_value_literal(literal);
                check_premise_value(schema, value, what);
                rule.premises.emplace_back(name, std::move(value));
            }
            auto [name, literal] = detail::split_assignment(entry.get_string("then", what), what);
            const ModifierSchema& schema = find_schema_checked(rule.concept_name, name, what);
            if (schema.kind != ModifierKind::Dynamic)
                throw ConsistencyError(fmt::format("{}: conclusion '{}' is not a dynamic modifier", what, name));
            rule.conclusion_name = name;
            rule.conclusion_value = conclusion_value_for(schema, literal, what);
            std::sort(rule.premises.begin(), rule.premises.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            kb.rules_.push_back(std::move(rule));
        }
    }

    // derive {Country=c} -> VATRate rules from [rates.vat]
    for (const auto& concept_info : kb.concepts_) {
        const std::string& cname = concept_info.concept_id.name;
        const ModifierSchema* country = kb.find_schema(cname, "Country");
        const ModifierSchema* vat_rate = kb.find_schema(cname, "VATRate");
        if (!country || country->kind != ModifierKind::Static) continue;
        if (!vat_rate || vat_rate->kind != ModifierKind::Dynamic) continue;
        for (const auto& [term, value] : country->terms) {
            auto it = kb.vat_rates_.find(std::get<std::string>(value));
            if (it == kb.vat_rates_.end()) continue;
            InferenceRule rule;
            rule.concept_name = cname;
            rule.premises.emplace_back("Country", value);
            rule.conclusion_name = "VATRate";
            rule.conclusion_value = it->second;
            kb.rules_.push_back(std::move(rule));
        }
    }

    // the rule set must be functional: identical premises may not conclude
    // different values for the same modifier
    for (std::size_t i = 0; i < kb.rules_.size(); ++i) {
        for (std::size_t j = i + 1; j < kb.rules_.size(); ++j) {
            const InferenceRule& a = kb.rules_[i];
            const InferenceRule& b = kb.rules_[j];
            if (a.concept_name != b.concept_name || a.conclusion_name != b.conclusion_name) continue;
            if (a.premises.size() != b.premises.size()) continue;
            bool same = true;
            for (std::size_t k = 0; k < a.premises.size(); ++k)
                if (a.premises[k].first != b.premises[k].first ||
                    !value_equal(a.premises[k].second, b.premises[k].second)) {
                    same = false;
                    break;
                }
            if (same && !value_equal(a.conclusion_value, b.conclusion_value))
                throw ConsistencyError(fmt::format(
                    "conflicting rules for {}.{}: '{}' vs '{}'", a.concept_name, a.conclusion_name,
                    render_value(a.conclusion_value), render_value(b.conclusion_value)));
        }
    }
    // drop exact duplicates (an explicit rule may restate a derived one)
    {
        std::vector<InferenceRule> unique;
        for (auto& rule : kb.rules_) {
            bool dup = false;
            for (const auto& seen : unique) {
                if (seen.concept_name != rule.concept_name || seen.conclusion_name != rule.conclusion_name ||
                    seen.premises.size() != rule.premises.size())
                    continue;
                bool same = true;
                for (std::size_t k = 0; k < seen.premises.size(); ++k)
                    if (seen.premises[k].first != rule.premises[k].first ||
                        !value_equal(seen.premises[k].second, rule.premises[k].second)) {
                        same = false;
                        break;
                    }
                if (same) { dup = true; break; }
            }
            if (!dup) unique.push_back(std::move(rule));
        }
        kb.rules_ = std::move(unique);
    }

    for (const auto& schema : kb.schemas_) {
        if (schema.kind != ModifierKind::Dynamic) continue;
        bool targeted = false;
        for (const auto& rule : kb.rules_)
            if (rule.concept_name == schema.concept_name && rule.conclusion_name == schema.name) {
                targeted = true;
                break;
            }
        if (!targeted)
            throw ConsistencyError(fmt::format(
                "dynamic modifier {}.{} has no inference rule", schema.concept_name, schema.name));
    }

    // term index; a term must resolve to exactly one schema per concept
    for (std::size_t si = 0; si < kb.schemas_.size(); ++si) {
        const ModifierSchema& schema = kb.schemas_[si];
        for (const auto& [term, value] : schema.terms) {
            auto key = std::make_pair(schema.concept_name, term);
            auto [it, inserted] = kb.term_index_.emplace(key, std::make_pair(si, value));
            if (!inserted)
                throw ConsistencyError(fmt::format(
                    "term '{}' is ambiguous for concept '{}' ({} vs {})", term, schema.concept_name,
                    kb.schemas_[it->second.first].name, schema.name));
        }
    }

    // complete the currency-rate graph: reciprocals, then transitive closure;
    // both directions of a configured pair must agree within 1e-9
    {
        std::set<std::string> currencies;
        for (const auto& [pair, rate] : kb.rates_) {
            currencies.insert(pair.first);
            currencies.insert(pair.second);
        }
        for (const auto& schema : kb.schemas_)
            if (schema.name == "Currency")
                for (const auto& [term, value] : schema.terms) currencies.insert(std::get<std::string>(value));

        auto rates = kb.rates_;
        for (const auto& [pair, rate] : rates) {
            auto reverse = std::make_pair(pair.second, pair.first);
            auto it = kb.rates_.find(reverse);
            if (it == kb.rates_.end()) {
                kb.rates_[reverse] = 1.0 / rate;
            } else if (std::fabs(rate * it->second - 1.0) > 1e-9) {
                throw ConsistencyError(fmt::format("rates {}-{} and {}-{} are not reciprocal", pair.first,
                                                   pair.second, pair.second, pair.first));
            }
        }
        for (const std::string& c : currencies) kb.rates_[{c, c}] = 1.0;

        // deterministic closure: repeatedly extend via known pairs
        bool grew = true;
        while (grew) {
            grew = false;
            for (const std::string& a : currencies) {
                for (const std::string& b : currencies) {
                    auto ab = kb.rates_.find({a, b});
                    if (ab == kb.rates_.end()) continue;
                    for (const std::string& d : currencies) {
                        auto bd = kb.rates_.find({b, d});
                        if (bd == kb.rates_.end()) continue;
                        double via = ab->second * bd->second;
                        auto ad = kb.rates_.find({a, d});
                        if (ad == kb.rates_.end()) {
                            kb.rates_[{a, d}] = via;
                            grew = true;
                        } else if (std::fabs(via / ad->second - 1.0) > 1e-9) {
                            throw ConsistencyError(fmt::format(
                                "inconsistent exchange rates along {} -> {} -> {}", a, b, d));
                        }
                    }
                }
            }
        }
    }

    return kb;
}

// --- annotation resolution ---------------------------------------------------

inline Concept resolve_concept(const KnowledgeBase& kb, const ContextAnnotation& ann) {
    const ConceptInfo* info = kb.find_concept(ann.concept_term.local);
    if (!info)
        throw UnknownConceptError(fmt::format("unknown concept '{}'", ann.concept_term.local));
    return info->concept_id;
}

inline std::vector<Modifier> resolve_static_modifiers(const KnowledgeBase& kb, const ContextAnnotation& ann) {
    Concept concept_id = resolve_concept(kb, ann);
    std::vector<Modifier> out;
    for (const auto& term : ann.static_terms) {
        const auto* hit = kb.find_term(concept_id.name, term.local);
        if (!hit)
            throw UnknownTermError(
                fmt::format("term '{}' matches no modifier value of concept '{}'", term.local, concept_id.name));
        const ModifierSchema& schema = kb.schemas()[hit->first];
        if (schema.kind != ModifierKind::Static)
            throw UnknownTermError(fmt::format(
                "term '{}' names a value of dynamic modifier '{}'", term.local, schema.name));
        for (const auto& m : out)
            if (m.name == schema.name)
                throw AnnotationError(fmt::format(
                    "terms resolve to duplicate modifier '{}' for concept '{}'", schema.name, concept_id.name));
        out.push_back({schema.name, hit->second, ModifierKind::Static});
    }
    return out;
}

inline std::vector<Modifier> infer_dynamic_modifiers(const KnowledgeBase& kb, const Concept& concept_id,
                                                     const std::vector<Modifier>& statics) {
    std::map<std::string, const ModifierValue*> given;
    for (const auto& m : statics) given[m.name] = &m.value;

    std::vector<Modifier> out;
    for (const ModifierSchema* schema : kb.schemas_of(concept_id.name, ModifierKind::Dynamic)) {
        const ModifierValue* concluded = nullptr;
        for (const auto& rule : kb.rules()) {
            if (rule.concept_name != concept_id.name || rule.conclusion_name != schema->name) continue;
            bool fires = true;
            for (const auto& [name, value] : rule.premises) {
                auto it = given.find(name);
                if (it == given.end() || !value_equal(*it->second, value)) {
                    fires = false;
                    break;
                }
            }
            if (!fires) continue;
            if (concluded && !value_equal(*concluded, rule.conclusion_value))
                throw ConsistencyError(fmt::format(
                    "rules disagree on {}.{} for the given statics", concept_id.name, schema->name));
            concluded = &rule.conclusion_value;
        }
        if (!concluded)
            throw IncompleteContextError(fmt::format(
                "no rule derives {}.{} from the annotated statics", concept_id.name, schema->name));
        out.push_back({schema->name, *concluded, ModifierKind::Dynamic});
    }
    return out;
}

// statics-only context, as used by the extraction phase
inline Context static_context(const KnowledgeBase& kb, const ContextAnnotation& ann) {
    Context ctx(resolve_concept(kb, ann));
    for (auto& m : resolve_static_modifiers(kb, ann)) ctx.add(std::move(m));
    return ctx;
}

// fully inferred context of an annotated part
inline Context part_context(const KnowledgeBase& kb, const MessagePart& part) {
    Concept concept_id = resolve_concept(kb, part.annotation);
    std::vector<Modifier> statics = resolve_static_modifiers(kb, part.annotation);
    std::vector<Modifier> dynamics = infer_dynamic_modifiers(kb, concept_id, statics);
    Context ctx(concept_id);
    for (auto& m : statics) ctx.add(std::move(m));
    for (auto& m : dynamics) ctx.add(std::move(m));
    return ctx;
}

inline LexicalValue parse_lexical(const std::string& raw, LexicalType type) {
    switch (type) {
        case LexicalType::Double: {
            errno = 0;
            char* end = nullptr;
            double v = std::strtod(raw.c_str(), &end);
            if (errno != 0 || !end || *end != '\0' || end == raw.c_str() || !std::isfinite(v))
                throw ValueError(fmt::format("'{}' is not a decimal value", raw));
            return v;
        }
        case LexicalType::Int: {
            errno = 0;
            char* end = nullptr;
            long long v = std::strtoll(raw.c_str(), &end, 10);
            if (errno != 0 || !end || *end != '\0' || end == raw.c_str())
                throw ValueError(fmt::format("'{}' is not an integer", raw));
            return static_cast<std::int64_t>(v);
        }
        case LexicalType::String:
        case LexicalType::DateString: return raw;
    }
    throw ValueError("unreachable lexical type");
}

inline SemanticObject build_semantic_object(const KnowledgeBase& kb, const MessagePart& part,
                                            const std::string& raw) {
    Context ctx = part_context(kb, part);
    const ConceptInfo* info = kb.find_concept(ctx.domain().name);
    if (info->carrier != part.lexical_type)
        throw ValueError(fmt::format("concept '{}' carries {} values, part '{}' declares {}",
                                     ctx.domain().name, to_string(info->carrier), part.name,
                                     to_string(part.lexical_type)));
    LexicalValue value = parse_lexical(raw, part.lexical_type);
    if (part.lexical_type == LexicalType::DateString) {
        const ModifierValue& format = ctx.require("DateFormat");
        detail::parse_date(raw, std::get<std::string>(format));
    }
    return SemanticObject{ctx.domain(), std::move(value), part.lexical_type, std::move(ctx)};
}

} // namespace wsmed

#endif
