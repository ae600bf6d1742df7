#include "../oracles.hpp"

#include <doctest.h>

#include <random>

using namespace rddl;
using kg::KnowledgeGraph;
using kg::Literal;
using kg::LiteralKind;

TEST_CASE("canonical literal forms") {
    CHECK(kg::canonical_integer("007") == "7");
    CHECK(kg::canonical_integer("-0") == "0");
    CHECK(kg::canonical_integer("+15") == "15");
    CHECK_THROWS_AS(kg::canonical_integer("1.5"), kg::GraphError);
    CHECK(kg::canonical_decimal("7") == "7.0");
    CHECK(kg::canonical_decimal("7.2500") == "7.25");
    CHECK(kg::canonical_decimal("-0.0") == "0.0");
    CHECK(kg::canonical_decimal(0.1 + 0.2) == "0.3");
    CHECK_THROWS_AS(kg::canonical_decimal("abc"), kg::GraphError);
    CHECK(kg::canonical_boolean("TRUE") == "true");
    CHECK(kg::canonical_boolean("0") == "false");
    CHECK_THROWS_AS(kg::canonical_boolean("maybe"), kg::GraphError);

    for (auto kind : {LiteralKind::integer, LiteralKind::decimal, LiteralKind::boolean}) {
        for (const char* raw : {"1", "0", "12"}) {
            std::string once;
            try {
                once = Literal::parse(kind, raw).lexical;
            } catch (const kg::GraphError&) {
                continue;
            }
            CHECK(Literal::parse(kind, once).lexical == once);
        }
    }
}

TEST_CASE("add_triple has set semantics and checks nodes") {
    KnowledgeGraph g;
    auto a = g.add_node("urn:a");
    auto b = g.add_node("urn:b");
    auto r = g.add_relation("hasColumn");
    CHECK(g.add_triple(a, r, b));
    CHECK(g.triple_count() == 1);
    CHECK_FALSE(g.add_triple(a, r, b));
    CHECK(g.triple_count() == 1);
    CHECK_THROWS_WITH_AS(g.add_triple(kg::NodeId{7}, r, b), doctest::Contains("unknown node"), kg::GraphError);
    CHECK(g.add_node("urn:a") == a);
    CHECK(a.value == 0);
    CHECK(b.value == 1);
}

namespace {

KnowledgeGraph random_graph(std::mt19937_64& rng, std::size_t triples, std::size_t nodes, std::size_t literals) {
    KnowledgeGraph g(std::vector<std::string>{"rdf:type", "hasCellValue", "exactValue", "belongsToColumn", "hasColumn"});
    for (std::size_t i = 0; i < nodes; ++i) g.add_node("urn:n" + std::to_string(i));
    std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(nodes - 1));
    std::uniform_int_distribution<std::uint32_t> rel(0, 4);
    std::uniform_int_distribution<std::size_t> lit(0, literals - 1);
    std::bernoulli_distribution literal_object(0.3);
    for (std::size_t i = 0; i < triples; ++i) {
        if (literal_object(rng)) {
            g.add_triple(kg::NodeId{node(rng)}, kg::RelationId{rel(rng)}, Literal::integer(static_cast<std::int64_t>(lit(rng))));
        } else {
            g.add_triple(kg::NodeId{node(rng)}, kg::RelationId{rel(rng)}, kg::NodeId{node(rng)});
        }
    }
    return g;
}

}  // namespace

TEST_CASE("indexes agree with a full scan") {
    std::mt19937_64 rng(3);
    auto g = random_graph(rng, 400, 40, 10);
    for (std::uint32_t i = 0; i < g.triple_count(); ++i) {
        const auto& t = g.triple(i);
        auto bs = g.by_subject(t.subject);
        CHECK(std::find(bs.begin(), bs.end(), i) != bs.end());
        if (auto* n = std::get_if<kg::NodeId>(&t.object)) {
            auto bo = g.by_object(*n);
            CHECK(std::find(bo.begin(), bo.end(), i) != bo.end());
        } else {
            auto l = std::get<kg::LiteralId>(t.object);
            auto bo = g.by_object(l);
            CHECK(std::find(bo.begin(), bo.end(), i) != bo.end());
            auto brl = g.by_relation_literal(t.relation, l);
            CHECK(std::find(brl.begin(), brl.end(), i) != brl.end());
        }
    }
    for (std::uint32_t n = 0; n < g.node_count(); ++n) {
        std::size_t scan = 0;
        for (const auto& t : g.triples()) scan += t.subject == kg::NodeId{n};
        CHECK(g.by_subject(kg::NodeId{n}).size() == scan);
    }
}

TEST_CASE("match_pattern examples") {
    KnowledgeGraph g(std::vector<std::string>{"hasCellValue", "exactValue"});
    auto r1 = g.add_node("urn:r1");
    auto x1 = g.add_node("urn:x1");
    g.add_triple(r1, g.relation("hasCellValue"), x1);
    g.add_triple(x1, g.relation("exactValue"), Literal::string("42"));
    const std::vector<kg::TriplePattern> conj{
        {kg::Var{"r"}, g.relation("hasCellValue"), kg::Var{"x"}},
        {kg::Var{"x"}, g.relation("exactValue"), Literal::string("42")},
    };
    auto res = kg::match_pattern(g, conj);
    REQUIRE(res.size() == 1);
    CHECK(std::get<kg::NodeId>(res.begin()->at("r")) == r1);
    CHECK(std::get<kg::NodeId>(res.begin()->at("x")) == x1);

    KnowledgeGraph empty(std::vector<std::string>{"hasCellValue", "exactValue"});
    CHECK(kg::match_pattern(empty, conj).empty());

    // Ground pattern: 0 or 1 matches.
    const std::vector<kg::TriplePattern> ground{{r1, g.relation("hasCellValue"), x1}};
    CHECK(kg::match_pattern(g, ground).size() == 1);
    const std::vector<kg::TriplePattern> absent{{x1, g.relation("hasCellValue"), r1}};
    CHECK(kg::match_pattern(g, absent).empty());
}

TEST_CASE("match_pattern equals brute force and ignores pattern order") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
        auto g = random_graph(rng, 60 + round * 5, 12, 4);
        const kg::RelationId cell{1}, exact{2}, belongs{3}, has_col{4};
        std::vector<kg::TriplePattern> conj{
            {kg::Var{"x"}, exact, Literal::integer(round % 4)},
            {kg::Var{"x"}, belongs, kg::Var{"c"}},
            {kg::Var{"r"}, cell, kg::Var{"x"}},
            {kg::NodeId{static_cast<std::uint32_t>(round % 12)}, has_col, kg::Var{"c"}},
        };
        const auto fast = kg::match_pattern(g, conj);
        CHECK(fast == oracle::brute_match(g, conj));
        std::reverse(conj.begin(), conj.end());
        CHECK(kg::match_pattern(g, conj) == fast);

        const std::vector<kg::TriplePattern> rel_var{{kg::Var{"s"}, kg::Var{"p"}, kg::Var{"o"}},
                                                     {kg::Var{"o"}, cell, kg::Var{"z"}}};
        CHECK(kg::match_pattern(g, rel_var) == oracle::brute_match(g, rel_var));
    }
}

TEST_CASE("N-Triples serialization") {
    KnowledgeGraph empty;
    CHECK(kg::serialize_ntriples(empty).empty());
    CHECK(kg::parse_ntriples("").triple_count() == 0);

    KnowledgeGraph g;
    g.add_triple(g.add_node("urn:a"), g.add_relation("hasColumn"), g.add_node("urn:b"));
    const auto one = kg::serialize_ntriples(g);
    CHECK(std::count(one.begin(), one.end(), '\n') == 1);
    CHECK(one.ends_with(" .\n"));

    SUBCASE("escapes and literal kinds survive") {
        KnowledgeGraph h;
        auto n = h.add_node("urn:x");
        auto r = h.add_relation("exactValue");
        h.add_triple(n, r, Literal::string("quote \" back \\ nl \n tab \t"));
        h.add_triple(n, r, Literal::integer(-12));
        h.add_triple(n, r, Literal::decimal(2.5));
        h.add_triple(n, r, Literal::boolean(true));
        h.add_triple(n, r, Literal::string("12"));
        const auto text = kg::serialize_ntriples(h);
        const auto back = kg::parse_ntriples(text);
        CHECK(back.triple_count() == 5);
        CHECK(kg::serialize_ntriples(back) == text);
        CHECK(back.find_literal(Literal::string("12")).has_value());
        CHECK(back.find_literal(Literal::integer(-12)).has_value());
    }

    SUBCASE("malformed line reports its number") {
        const std::string text = "<urn:a> <urn:p> <urn:b> .\n<urn:a> <urn:p> <urn:c>\n";
        try {
            kg::parse_ntriples(text);
            FAIL("expected a parse error");
        } catch (const kg::ParseError& e) {
            CHECK(e.line() == 2);
        }
    }

    SUBCASE("duplicate lines collapse") {
        const std::string line = "<urn:a> <http://rddl.example.org/ontology#hasRow> <urn:b> .\n";
        CHECK(kg::parse_ntriples(line + line).triple_count() == 1);
    }
}

TEST_CASE("serialize/parse round trip on a 1000-triple graph") {
    std::mt19937_64 rng(5);
    auto g = random_graph(rng, 1000, 120, 30);
    const auto text = kg::serialize_ntriples(g);
    const auto back = kg::parse_ntriples(text, g.relation_names());
    CHECK(back.triple_count() == g.triple_count());
    // Isomorphism by IRI.
    for (const auto& t : g.triples()) {
        auto s = back.find_node(g.iri(t.subject));
        REQUIRE(s);
        auto r = back.find_relation(g.relation_name(t.relation));
        REQUIRE(r);
        if (auto* n = std::get_if<kg::NodeId>(&t.object)) {
            auto o = back.find_node(g.iri(*n));
            REQUIRE(o);
            CHECK(back.contains({*s, *r, *o}));
        } else {
            auto o = back.find_literal(g.literal(std::get<kg::LiteralId>(t.object)));
            REQUIRE(o);
            CHECK(back.contains({*s, *r, *o}));
        }
    }
    CHECK(kg::serialize_ntriples(back) == text);
}
