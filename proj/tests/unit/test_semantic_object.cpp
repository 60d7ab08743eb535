#include <catch2/catch_amalgamated.hpp>

#include "wsmed/semantic_object.hpp"

#include "support.hpp"

using namespace wsmed;

namespace {
const char* kFrancePrice = "ctxt1:Price ctxt2:France ctxt2:VATincluded ctxt2:ScaleFactorOne";
const char* kJapanPrice = "ctxt1:Price ctxt2:Japan ctxt2:VATnotincluded ctxt2:ScaleFactorThousand";
const char* kUkPrice = "ctxt1:Price ctxt2:UK ctxt2:VATnotincluded ctxt2:ScaleFactorOne";
const char* kUsaPrice = "ctxt1:Price ctxt2:USA ctxt2:VATnotincluded ctxt2:ScaleFactorOne";
} // namespace

TEST_CASE("value rendering") {
    CHECK(render_value(ModifierValue{true}) == "true");
    CHECK(render_value(ModifierValue{false}) == "false");
    CHECK(render_value(ModifierValue{std::int64_t{1000}}) == "1000");
    CHECK(render_value(ModifierValue{17.5}) == "17.5");
    CHECK(render_value(ModifierValue{std::string{"GBP"}}) == "GBP");
}

TEST_CASE("value equality tolerates float noise but not type changes") {
    CHECK(value_equal(ModifierValue{19.6}, ModifierValue{19.6}));
    CHECK(value_equal(ModifierValue{19.6}, ModifierValue{19.6 * (1.0 + 1e-12)}));
    CHECK_FALSE(value_equal(ModifierValue{19.6}, ModifierValue{19.7}));
    CHECK_FALSE(value_equal(ModifierValue{std::int64_t{1}}, ModifierValue{1.0}));
    CHECK_FALSE(value_equal(ModifierValue{std::string{"1"}}, ModifierValue{std::int64_t{1}}));
}

TEST_CASE("context equality is an equivalence on fully inferred contexts") {
    const KnowledgeBase& kb = testsup::kb();
    Context france_a = testsup::context_of(kb, kFrancePrice);
    Context france_b = testsup::context_of(kb, kFrancePrice);
    Context japan = testsup::context_of(kb, kJapanPrice);
    Context uk = testsup::context_of(kb, kUkPrice);
    Context usa = testsup::context_of(kb, kUsaPrice);

    CHECK(context_equal(france_a, france_a));
    CHECK(context_equal(france_a, france_b));
    CHECK(context_equal(france_b, france_a));
    CHECK_FALSE(context_equal(france_a, japan));
    CHECK_FALSE(context_equal(uk, usa)); // Country, Currency and VATRate differ

    // transitivity across three equal builds
    Context france_c = testsup::context_of(kb, kFrancePrice);
    CHECK((context_equal(france_a, france_b) && context_equal(france_b, france_c) &&
           context_equal(france_a, france_c)));
}

TEST_CASE("contexts of different concepts do not compare") {
    const KnowledgeBase& kb = testsup::kb();
    Context price = testsup::context_of(kb, kFrancePrice);
    Context date = testsup::context_of(kb, "ctxt1:Date ctxt2:France");
    CHECK_THROWS_AS(context_equal(price, date), ConceptMismatchError);
}

TEST_CASE("built contexts carry every conversion-relevant modifier") {
    const KnowledgeBase& kb = testsup::kb();
    Context price = testsup::context_of(kb, kUkPrice);
    for (const char* name : {"Country", "Currency", "VATIncluded", "VATRate", "ScaleFactor"})
        CHECK(price.find(name) != nullptr);
    Context date = testsup::context_of(kb, "ctxt1:Date ctxt2:Japan");
    for (const char* name : {"Country", "DateFormat"}) CHECK(date.find(name) != nullptr);
}

TEST_CASE("duplicate modifiers are rejected") {
    Context ctx(Concept{"Price"});
    ctx.add({"Country", ModifierValue{std::string{"France"}}, ModifierKind::Static});
    CHECK_THROWS_AS(ctx.add({"Country", ModifierValue{std::string{"Japan"}}, ModifierKind::Static}),
                    AnnotationError);
}

TEST_CASE("missing modifiers raise an incomplete-context error") {
    Context ctx(Concept{"Price"});
    CHECK_THROWS_AS(ctx.require("Currency"), IncompleteContextError);
}

TEST_CASE("raw rendering by lexical type") {
    CHECK(render_raw(LexicalValue{1575.203376}, LexicalType::Double) == "1575.20");
    CHECK(render_raw(LexicalValue{std::int64_t{42}}, LexicalType::Int) == "42");
    CHECK(render_raw(LexicalValue{std::string{"25/12/2012"}}, LexicalType::DateString) == "25/12/2012");
}
