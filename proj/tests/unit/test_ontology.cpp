#include <catch2/catch_amalgamated.hpp>

#include "wsmed/ontology.hpp"

#include "support.hpp"

using namespace wsmed;

namespace {

ContextAnnotation ann(const std::string& text) { return parse_context_annotation(text, "test"); }

const ModifierValue* value_of(const std::vector<Modifier>& mods, const std::string& name) {
    for (const auto& m : mods)
        if (m.name == name) return &m.value;
    return nullptr;
}

} // namespace

TEST_CASE("fixture knowledge base loads its tables") {
    const KnowledgeBase& kb = testsup::kb();
    CHECK(kb.find_concept("Price"));
    CHECK(kb.find_concept("Date"));
    CHECK(kb.vat_rates().at("France") == 19.6);
    CHECK(kb.vat_rates().at("Japan") == 9.3);
    CHECK(kb.vat_rates().at("UK") == 17.5);
    CHECK(kb.vat_rates().at("USA") == 0.0);
    CHECK(kb.scale_factors().at("ScaleFactorOne") == 1);
    CHECK(kb.scale_factors().at("ScaleFactorThousand") == 1000);
    CHECK(kb.currency_rate("GBP", "EUR") == 1.09755);
}

TEST_CASE("reciprocal rates complete from the configured direction") {
    const KnowledgeBase& kb = testsup::kb();
    CHECK(kb.currency_rate("EUR", "GBP") == Catch::Approx(1.0 / 1.09755).epsilon(1e-12));
    CHECK(kb.currency_rate("EUR", "JPY") == Catch::Approx(1.0 / 0.0095).epsilon(1e-12));
}

TEST_CASE("rate reciprocity holds for every configured pair") {
    const KnowledgeBase& kb = testsup::kb();
    for (const auto& [pair, rate] : kb.currency_rates()) {
        double reverse = kb.currency_rate(pair.second, pair.first);
        CHECK(std::fabs(rate * reverse - 1.0) <= 1e-9);
    }
}

TEST_CASE("cross rates complete transitively") {
    const KnowledgeBase& kb = testsup::kb();
    CHECK(kb.currency_rate("GBP", "JPY") == Catch::Approx(1.09755 / 0.0095).epsilon(1e-12));
    CHECK(kb.currency_rate("GBP", "USD") == Catch::Approx(1.09755 / 0.9).epsilon(1e-12));
    CHECK(kb.currency_rate("JPY", "USD") == Catch::Approx(0.0095 / 0.9).epsilon(1e-12));
}

TEST_CASE("identity rate exists for every currency") {
    const KnowledgeBase& kb = testsup::kb();
    for (const char* c : {"EUR", "JPY", "GBP", "USD"}) CHECK(kb.currency_rate(c, c) == 1.0);
}

TEST_CASE("inconsistent knowledge bases are rejected") {
    CHECK_THROWS_AS(load_knowledge_base(testsup::slurp("bad/conflicting_rules.toml")), ConsistencyError);

    std::string nonpositive_rate = R"(
[concepts]
Price = "double"
[modifiers.Price.Currency]
kind = "dynamic"
terms = ["EUR", "GBP"]
[modifiers.Price.Country]
kind = "static"
terms = ["France"]
[rates.currency]
GBP-EUR = -2.0
[[rules]]
concept = "Price"
when = ["Country=France"]
then = "Currency=EUR"
)";
    CHECK_THROWS_AS(load_knowledge_base(nonpositive_rate), ConsistencyError);

    std::string negative_vat = R"(
[concepts]
Price = "double"
[rates.vat]
France = -1.0
)";
    CHECK_THROWS_AS(load_knowledge_base(negative_vat), ConsistencyError);

    std::string unruled_dynamic = R"(
[concepts]
Price = "double"
[modifiers.Price.Currency]
kind = "dynamic"
terms = ["EUR"]
)";
    CHECK_THROWS_AS(load_knowledge_base(unruled_dynamic), ConsistencyError);

    std::string non_reciprocal = R"(
[concepts]
Price = "double"
[rates.currency]
GBP-EUR = 1.1
EUR-GBP = 1.1
)";
    CHECK_THROWS_AS(load_knowledge_base(non_reciprocal), ConsistencyError);

    std::string ambiguous_term = R"(
[concepts]
Price = "double"
[modifiers.Price.Country]
kind = "static"
terms = ["France"]
[modifiers.Price.Region]
kind = "static"
terms = ["France"]
)";
    CHECK_THROWS_AS(load_knowledge_base(ambiguous_term), ConsistencyError);

    CHECK_THROWS_AS(load_knowledge_base("not toml ="), ParseError);
    CHECK_THROWS_AS(load_knowledge_base("[scale_factors]\nX = 1\n"), ParseError); // no concepts
}

TEST_CASE("concept resolution") {
    const KnowledgeBase& kb = testsup::kb();
    CHECK(resolve_concept(kb, ann("ctxt1:Price")).name == "Price");
    CHECK(resolve_concept(kb, ann("ctxt1:Date ctxt2:France")).name == "Date");
    CHECK_THROWS_AS(resolve_concept(kb, ann("ctxt1:Weather")), UnknownConceptError);
}

TEST_CASE("static terms resolve to typed modifiers") {
    const KnowledgeBase& kb = testsup::kb();

    auto mods = resolve_static_modifiers(kb, ann("ctxt1:Price ctxt2:France ctxt2:VATincluded ctxt2:ScaleFactorOne"));
    REQUIRE(mods.size() == 3);
    CHECK(std::get<std::string>(*value_of(mods, "Country")) == "France");
    CHECK(std::get<bool>(*value_of(mods, "VATIncluded")) == true);
    CHECK(std::get<std::int64_t>(*value_of(mods, "ScaleFactor")) == 1);
    for (const auto& m : mods) CHECK(m.kind == ModifierKind::Static);

    auto master = resolve_static_modifiers(kb, ann("ctxt1:Price ctxt2:USA ctxt2:VATnotincluded ctxt2:ScaleFactorOne"));
    CHECK(std::get<std::string>(*value_of(master, "Country")) == "USA");
    CHECK(std::get<bool>(*value_of(master, "VATIncluded")) == false);

    auto date = resolve_static_modifiers(kb, ann("ctxt1:Date ctxt2:France"));
    REQUIRE(date.size() == 1);
    CHECK(date[0].name == "Country");

    CHECK_THROWS_AS(resolve_static_modifiers(kb, ann("ctxt1:Price ctxt2:Mars")), UnknownTermError);
    // a dynamic modifier's value term is not a static annotation term
    CHECK_THROWS_AS(resolve_static_modifiers(kb, ann("ctxt1:Price ctxt2:EUR")), UnknownTermError);
    // two terms of the same modifier
    CHECK_THROWS_AS(resolve_static_modifiers(kb, ann("ctxt1:Price ctxt2:France ctxt2:Japan")), AnnotationError);
}

TEST_CASE("dynamic modifiers infer from statics") {
    const KnowledgeBase& kb = testsup::kb();
    Concept price{"Price"};
    Concept date{"Date"};

    auto france = resolve_static_modifiers(kb, ann("ctxt1:Price ctxt2:France ctxt2:VATincluded ctxt2:ScaleFactorOne"));
    auto dyn = infer_dynamic_modifiers(kb, price, france);
    CHECK(std::get<std::string>(*value_of(dyn, "Currency")) == "EUR");
    CHECK(std::get<double>(*value_of(dyn, "VATRate")) == 19.6);
    for (const auto& m : dyn) CHECK(m.kind == ModifierKind::Dynamic);

    auto uk = resolve_static_modifiers(kb, ann("ctxt1:Price ctxt2:UK ctxt2:VATnotincluded ctxt2:ScaleFactorOne"));
    dyn = infer_dynamic_modifiers(kb, price, uk);
    CHECK(std::get<std::string>(*value_of(dyn, "Currency")) == "GBP");
    CHECK(std::get<double>(*value_of(dyn, "VATRate")) == 17.5);

    auto japan_date = resolve_static_modifiers(kb, ann("ctxt1:Date ctxt2:Japan"));
    dyn = infer_dynamic_modifiers(kb, date, japan_date);
    REQUIRE(dyn.size() == 1);
    CHECK(std::get<std::string>(dyn[0].value) == "YYYY/MM/DD");

    // deterministic: same inputs, same result
    auto again = infer_dynamic_modifiers(kb, date, japan_date);
    CHECK(std::get<std::string>(again[0].value) == "YYYY/MM/DD");

    CHECK_THROWS_AS(infer_dynamic_modifiers(kb, price, {}), IncompleteContextError);
}

TEST_CASE("every fixture descriptor resolves under the fixture knowledge base") {
    const KnowledgeBase& kb = testsup::kb();
    for (const char* name :
         {"flight_booking.desc", "hotel_booking.desc", "euro_banking.desc", "master_flight_booking.desc",
          "uk_flight_booking.desc", "us_flight_booking.desc", "ek_flight_booking.desc"}) {
        AnnotatedDescriptor d = testsup::descriptor(name);
        for (const auto& op : d.operations)
            for (const auto* parts : {&op.inputs, &op.outputs})
                for (const auto& part : *parts) CHECK_NOTHROW(part_context(kb, part));
    }
}

TEST_CASE("semantic objects build with full contexts and parsed values") {
    const KnowledgeBase& kb = testsup::kb();
    auto uk = testsup::descriptor("uk_flight_booking.desc");
    const MessagePart& price_part = find_part(uk, "reserve", "ReservationPrice");

    SemanticObject object = build_semantic_object(kb, price_part, "1200");
    CHECK(object.domain.name == "Price");
    CHECK(object.type == LexicalType::Double);
    CHECK(std::get<double>(object.value) == 1200.0);
    CHECK(std::get<std::string>(object.context.require("Country")) == "UK");
    CHECK(std::get<bool>(object.context.require("VATIncluded")) == false);
    CHECK(std::get<std::int64_t>(object.context.require("ScaleFactor")) == 1);
    CHECK(std::get<std::string>(object.context.require("Currency")) == "GBP");
    CHECK(std::get<double>(object.context.require("VATRate")) == 17.5);

    auto fb = testsup::descriptor("flight_booking.desc");
    const MessagePart& date_part = find_part(fb, "reserve", "Date_de_Reservation");
    SemanticObject date = build_semantic_object(kb, date_part, "25/12/2012");
    CHECK(std::get<std::string>(date.value) == "25/12/2012");
    CHECK(std::get<std::string>(date.context.require("DateFormat")) == "DD/MM/YYYY");

    CHECK_THROWS_AS(build_semantic_object(kb, date_part, "2012/12/25"), ValueError);
    CHECK_THROWS_AS(build_semantic_object(kb, price_part, "abc"), ValueError);

    // lexical carrier must match the concept's declared carrier
    MessagePart wrong = price_part;
    wrong.lexical_type = LexicalType::String;
    CHECK_THROWS_AS(build_semantic_object(kb, wrong, "1200"), ValueError);
}
