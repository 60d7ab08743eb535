#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "wsmed/mediation.hpp"

#include "support.hpp"

using namespace wsmed;

namespace {

const char* kFrancePrice = "ctxt1:Price ctxt2:France ctxt2:VATincluded ctxt2:ScaleFactorOne";
const char* kJapanPrice = "ctxt1:Price ctxt2:Japan ctxt2:VATnotincluded ctxt2:ScaleFactorThousand";
const char* kUkPrice = "ctxt1:Price ctxt2:UK ctxt2:VATnotincluded ctxt2:ScaleFactorOne";
const char* kUsaPrice = "ctxt1:Price ctxt2:USA ctxt2:VATnotincluded ctxt2:ScaleFactorOne";

SemanticObject price_object(const KnowledgeBase& kb, double v, const char* annotation) {
    Context ctx = testsup::context_of(kb, annotation);
    return SemanticObject{ctx.domain(), LexicalValue{v}, LexicalType::Double, ctx};
}

SemanticObject date_object(const KnowledgeBase& kb, const std::string& v, const std::string& country) {
    Context ctx = testsup::context_of(kb, "ctxt1:Date ctxt2:" + country);
    return SemanticObject{ctx.domain(), LexicalValue{v}, LexicalType::DateString, ctx};
}

} // namespace

TEST_CASE("half-up rounding at two decimals") {
    CHECK(round_half_up(142.025, 2) == Catch::Approx(142.03).margin(1e-9));
    CHECK(round_half_up(118.75 * 1.196, 2) == Catch::Approx(142.03).margin(1e-9)); // binary 142.02499..
    CHECK(round_half_up(1575.203376, 2) == Catch::Approx(1575.20).margin(1e-9));
    CHECK(round_half_up(2.005, 2) == Catch::Approx(2.01).margin(1e-9));
    CHECK(round_half_up(2.004, 2) == Catch::Approx(2.00).margin(1e-9));
    CHECK(round_half_up(0.0, 2) == 0.0);
}

TEST_CASE("price from the UK context into the French context") {
    const KnowledgeBase& kb = testsup::kb();
    Context uk = testsup::context_of(kb, kUkPrice);
    Context france = testsup::context_of(kb, kFrancePrice);

    // 1200 GBP net -> EUR -> French VAT applied
    double oracle = 1200.0 * 1.09755 * (1.0 + 19.6 / 100.0);
    CHECK(oracle == Catch::Approx(1575.20376).epsilon(1e-12));
    CHECK(convert_price(kb, 1200.0, uk, france) == Catch::Approx(1575.20).margin(1e-9));
    CHECK(convert_price_exact(kb, 1200.0, uk, france) == Catch::Approx(oracle).epsilon(1e-12));

    // and back within a cent
    CHECK(convert_price(kb, 1575.20, france, uk) == Catch::Approx(1200.00).margin(0.01));
    CHECK(convert_price(kb, 0.0, uk, france) == 0.0);
}

TEST_CASE("price from the Japanese context into the French context") {
    const KnowledgeBase& kb = testsup::kb();
    Context japan = testsup::context_of(kb, kJapanPrice);
    Context france = testsup::context_of(kb, kFrancePrice);

    // 12.5 stored = 12500 JPY net; to EUR; French VAT on top
    double oracle = 12.5 * 1000.0 * 0.0095 * 1.196;
    CHECK(oracle == Catch::Approx(142.025).epsilon(1e-12));
    CHECK(convert_price(kb, 12.5, japan, france) == Catch::Approx(142.03).margin(1e-9));
}

TEST_CASE("conversion report lists every modifier of a changed context") {
    const KnowledgeBase& kb = testsup::kb();
    SemanticObject src = price_object(kb, 1200.0, kUkPrice);
    Context france = testsup::context_of(kb, kFrancePrice);

    auto [converted, report] = convert(kb, src, france);
    CHECK(std::get<double>(converted.value) == Catch::Approx(1575.20).margin(1e-9));
    CHECK(context_equal(converted.context, france));
    CHECK(converted.type == LexicalType::Double);

    REQUIRE(report.steps.size() == 5);
    CHECK(report.steps[0].modifier == "Country");
    CHECK(report.steps[1].modifier == "Currency");
    CHECK(report.steps[2].modifier == "ScaleFactor");
    CHECK(report.steps[3].modifier == "VATIncluded");
    CHECK(report.steps[4].modifier == "VATRate");

    auto lines = report_lines(report);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "conversion Country : de UK à France");
    CHECK(lines[1] == "conversion Currency : de GBP à EUR");
    CHECK(lines[2] == "conversion ScaleFactor : de 1 à 1");
    CHECK(lines[3] == "conversion VATIncluded : de false à true");
    CHECK(lines[4] == "conversion VATRate : de 17.5 à 19.6");
}

TEST_CASE("identity conversion returns the value with an empty report") {
    const KnowledgeBase& kb = testsup::kb();
    SemanticObject src = price_object(kb, 1200.0, kFrancePrice);
    Context france = testsup::context_of(kb, kFrancePrice);
    auto [converted, report] = convert(kb, src, france);
    CHECK(std::get<double>(converted.value) == 1200.0);
    CHECK(report.steps.empty());
}

TEST_CASE("date conversion between contexts") {
    const KnowledgeBase& kb = testsup::kb();
    SemanticObject src = date_object(kb, "25/12/2012", "France");
    Context japan = testsup::context_of(kb, "ctxt1:Date ctxt2:Japan");
    auto [converted, report] = convert(kb, src, japan);
    CHECK(std::get<std::string>(converted.value) == "2012/12/25");
    REQUIRE(report.steps.size() == 2);
    CHECK(report.steps[0].modifier == "Country");
    CHECK(report.steps[1].modifier == "DateFormat");
}

TEST_CASE("date reformatting") {
    CHECK(convert_date("25/12/2012", "DD/MM/YYYY", "YYYY/MM/DD") == "2012/12/25");
    CHECK(convert_date("25/12/2012", "DD/MM/YYYY", "MM/DD/YYYY") == "12/25/2012");
    CHECK(convert_date("01/02/2003", "DD/MM/YYYY", "YYYY/MM/DD") == "2003/02/01");
    CHECK(convert_date("29/02/2000", "DD/MM/YYYY", "MM/DD/YYYY") == "02/29/2000");
    CHECK_THROWS_AS(convert_date("31/02/2012", "DD/MM/YYYY", "YYYY/MM/DD"), ValueError);
    CHECK_THROWS_AS(convert_date("29/02/2001", "DD/MM/YYYY", "YYYY/MM/DD"), ValueError);
    CHECK_THROWS_AS(convert_date("2012/12/25", "DD/MM/YYYY", "YYYY/MM/DD"), ValueError);
    CHECK_THROWS_AS(convert_date("5/12/2012", "DD/MM/YYYY", "YYYY/MM/DD"), ValueError);
    CHECK_THROWS_AS(convert_date("25-12-2012", "DD/MM/YYYY", "YYYY/MM/DD"), ValueError);
}

TEST_CASE("mediation is needed exactly when contexts differ") {
    const KnowledgeBase& kb = testsup::kb();
    CHECK(needs_mediation(testsup::context_of(kb, "ctxt1:Date ctxt2:France"),
                          testsup::context_of(kb, "ctxt1:Date ctxt2:Japan")));
    CHECK(needs_mediation(testsup::context_of(kb, kJapanPrice), testsup::context_of(kb, kFrancePrice)));
    CHECK_FALSE(needs_mediation(testsup::context_of(kb, kFrancePrice), testsup::context_of(kb, kFrancePrice)));
    CHECK_THROWS_AS(needs_mediation(testsup::context_of(kb, kFrancePrice),
                                    testsup::context_of(kb, "ctxt1:Date ctxt2:France")),
                    ConceptMismatchError);
}

TEST_CASE("concept mismatch and missing rates are reported") {
    const KnowledgeBase& kb = testsup::kb();
    SemanticObject price = price_object(kb, 10.0, kFrancePrice);
    Context date_ctx = testsup::context_of(kb, "ctxt1:Date ctxt2:Japan");
    CHECK_THROWS_AS(convert(kb, price, date_ctx), ConceptMismatchError);

    KnowledgeBase sparse = load_knowledge_base(testsup::slurp("kb_sparse.toml"));
    Context uk = testsup::context_of(sparse, kUkPrice);
    Context usa = testsup::context_of(sparse, kUsaPrice);
    CHECK_THROWS_AS(convert_price(sparse, 100.0, uk, usa), MissingRateError);
}

TEST_CASE("price round trips stay within rounding slack") {
    const KnowledgeBase& kb = testsup::kb();
    const char* annotations[] = {kFrancePrice, kJapanPrice, kUkPrice, kUsaPrice};
    std::vector<Context> contexts;
    for (const char* a : annotations) contexts.push_back(testsup::context_of(kb, a));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> exponent(std::log10(0.01), std::log10(1e9));
    std::uniform_int_distribution<int> pick(0, 3);
    for (int i = 0; i < 200; ++i) {
        double v = round_half_up(std::pow(10.0, exponent(rng)), 2);
        const Context& a = contexts[pick(rng)];
        const Context& b = contexts[pick(rng)];
        double chained = convert_price_exact(kb, convert_price_exact(kb, v, a, b), b, a);
        CHECK(std::fabs(chained - v) <= 1e-9 * std::max(1.0, std::fabs(v)));
        double rounded = round_half_up(chained, 2);
        CHECK(std::fabs(rounded - v) <= 0.01);
    }
}

TEST_CASE("net value in a reference currency is conserved along chains") {
    const KnowledgeBase& kb = testsup::kb();
    Context france = testsup::context_of(kb, kFrancePrice);
    Context japan = testsup::context_of(kb, kJapanPrice);
    Context uk = testsup::context_of(kb, kUkPrice);
    Context usa = testsup::context_of(kb, kUsaPrice);

    double v = 1575.20;
    double net_eur_start = v / 1.196; // French VAT stripped, already in EUR
    double chained = convert_price_exact(kb, v, france, uk);
    chained = convert_price_exact(kb, chained, uk, japan);
    chained = convert_price_exact(kb, chained, japan, usa);
    double net_eur_end = chained * kb.currency_rate("USD", "EUR"); // USA context carries net values
    CHECK(std::fabs(net_eur_end - net_eur_start) <= 1e-9 * net_eur_start);
}

TEST_CASE("date conversion is a bijection over sampled days") {
    const char* formats[] = {"DD/MM/YYYY", "MM/DD/YYYY", "YYYY/MM/DD"};
    for (int year : {2000, 2004, 2012}) {
        for (int month = 1; month <= 12; ++month) {
            for (int day : {1, 15, 28}) {
                std::string base = fmt::format("{:02}/{:02}/{:04}", day, month, year);
                for (const char* f : formats) {
                    for (const char* g : formats) {
                        std::string there = convert_date(base, "DD/MM/YYYY", f);
                        std::string again = convert_date(convert_date(there, f, g), g, f);
                        REQUIRE(again == there);
                    }
                }
            }
        }
    }
}
