#ifndef WSMED_MEDIATION_HPP
#define WSMED_MEDIATION_HPP

// Conversion of a semantic object from its source context into a target
// context. Monetary values run through a fixed pipeline: descale, strip
// source VAT, exchange, apply target VAT, rescale; rounding to two decimals
// happens once, at the output boundary. Dates are re-rendered in the target
// format. The conversion report lists every context modifier with its source
// and target value whenever the contexts differ at all.

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "wsmed/detail/dates.hpp"
#include "wsmed/errors.hpp"
#include "wsmed/ontology.hpp"
#include "wsmed/semantic_object.hpp"

namespace wsmed {

struct ConversionStep {
    std::string modifier;
    ModifierValue from;
    ModifierValue to;
};

struct ConversionReport {
    std::vector<ConversionStep> steps; // canonical (name-sorted) order; empty iff contexts equal
    SemanticObject input;
    SemanticObject output;
};

inline std::vector<std::string> report_lines(const ConversionReport& report) {
    std::vector<std::string> lines;
    lines.reserve(report.steps.size());
    for (const auto& step : report.steps)
        lines.push_back(fmt::format("conversion {} : de {} à {}", step.modifier, render_value(step.from),
                                    render_value(step.to)));
    return lines;
}

// half-up decimal rounding with a relative nudge so values sitting a few ulp
// below a half-point (e.g. 142.0249999...96 for 142.025) round as the exact
// decimal would
inline double round_half_up(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    double scaled = value * scale;
    double nudge = std::fabs(scaled) * 1e-12 + 1e-12;
    return std::floor(scaled + nudge + 0.5) / scale;
}

namespace detail {

inline double numeric_modifier(const Context& ctx, const std::string& name) {
    const ModifierValue& v = ctx.require(name);
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    if (std::holds_alternative<std::int64_t>(v)) return static_cast<double>(std::get<std::int64_t>(v));
    throw ValueError(fmt::format("modifier '{}' is not numeric", name));
}

inline bool bool_modifier(const Context& ctx, const std::string& name) {
    const ModifierValue& v = ctx.require(name);
    if (!std::holds_alternative<bool>(v)) throw ValueError(fmt::format("modifier '{}' is not boolean", name));
    return std::get<bool>(v);
}

inline const std::string& string_modifier(const Context& ctx, const std::string& name) {
    const ModifierValue& v = ctx.require(name);
    if (!std::holds_alternative<std::string>(v))
        throw ValueError(fmt::format("modifier '{}' is not a term", name));
    return std::get<std::string>(v);
}

} // namespace detail

// unrounded monetary pipeline; exposed so chained conversions can round once
inline double convert_price_exact(const KnowledgeBase& kb, double value, const Context& src,
                                  const Context& tgt) {
    if (src.domain() != tgt.domain())
        throw ConceptMismatchError(fmt::format("cannot convert {} value into a {} context",
                                               src.domain().name, tgt.domain().name));
    double actual = value * detail::numeric_modifier(src, "ScaleFactor");
    double net = detail::bool_modifier(src, "VATIncluded")
                     ? actual / (1.0 + detail::numeric_modifier(src, "VATRate") / 100.0)
                     : actual;
    double net_target = net * kb.currency_rate(detail::string_modifier(src, "Currency"),
                                               detail::string_modifier(tgt, "Currency"));
    double gross = detail::bool_modifier(tgt, "VATIncluded")
                       ? net_target * (1.0 + detail::numeric_modifier(tgt, "VATRate") / 100.0)
                       : net_target;
    return gross / detail::numeric_modifier(tgt, "ScaleFactor");
}

inline double convert_price(const KnowledgeBase& kb, double value, const Context& src, const Context& tgt) {
    return round_half_up(convert_price_exact(kb, value, src, tgt), 2);
}

inline std::string convert_date(const std::string& value, const std::string& src_format,
                                const std::string& tgt_format) {
    return detail::format_date(detail::parse_date(value, src_format), tgt_format);
}

inline bool needs_mediation(const Context& a, const Context& b) { return !context_equal(a, b); }

inline std::pair<SemanticObject, ConversionReport> convert(const KnowledgeBase& kb, const SemanticObject& src,
                                                           const Context& target) {
    if (src.domain != target.domain())
        throw ConceptMismatchError(fmt::format("cannot convert {} value into a {} context", src.domain.name,
                                               target.domain().name));
    ConversionReport report;
    report.input = src;

    if (context_equal(src.context, target)) {
        SemanticObject out = src;
        out.context = target;
        report.output = out;
        return {std::move(out), std::move(report)};
    }

    LexicalValue value = src.value;
    if (src.context.find("Currency") && target.find("Currency")) {
        if (!std::holds_alternative<double>(value))
            throw ValueError(fmt::format("{} value is not a decimal", src.domain.name));
        value = convert_price(kb, std::get<double>(value), src.context, target);
    } else if (src.context.find("DateFormat") && target.find("DateFormat")) {
        value = convert_date(std::get<std::string>(value),
                             detail::string_modifier(src.context, "DateFormat"),
                             detail::string_modifier(target, "DateFormat"));
    }

    std::set<std::string> names;
    for (const auto& [name, m] : src.context.modifiers()) names.insert(name);
    for (const auto& [name, m] : target.modifiers()) names.insert(name);
    for (const std::string& name : names) {
        const Modifier* from = src.context.find(name);
        const Modifier* to = target.find(name);
        report.steps.push_back({name, from ? from->value : ModifierValue{std::string{"-"}},
                                to ? to->value : ModifierValue{std::string{"-"}}});
    }

    SemanticObject out{src.domain, std::move(value), src.type, target};
    report.output = out;
    return {std::move(out), std::move(report)};
}

} // namespace wsmed

#endif
