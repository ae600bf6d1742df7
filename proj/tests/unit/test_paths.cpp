#include "rddl/convert.hpp"
#include "rddl/paths.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace rddl;
using paths::Path;

namespace {

// a -hasColumn-> b -hasRow-> c, and a -usesTable-> c, plus an isolated d.
struct Chain {
    kg::KnowledgeGraph g{std::vector<std::string>{"rdf:type", "hasColumn", "hasRow", "usesTable", "rowDerivedFrom"}};
    kg::NodeId a, b, c, d;
    Chain() {
        a = g.add_node("urn:a");
        b = g.add_node("urn:b");
        c = g.add_node("urn:c");
        d = g.add_node("urn:d");
        g.add_triple(a, g.relation("hasColumn"), b);
        g.add_triple(b, g.relation("hasRow"), c);
        g.add_triple(a, g.relation("usesTable"), c);
    }
};

std::size_t length(const Path& p) {
    std::size_t n = 0;
    while (n < p.size() && p[n] != paths::kPad) ++n;
    return n;
}

kg::KnowledgeGraph desk_graph(const std::string& ns, std::uint64_t seed) {
    const auto base = db::northwind_fixture({6, seed});
    const auto suite = scn::generate_suite(base, seed, {1, 2, {scn::Task{scn::Algebra::join, scn::MathFamily::linear}}});
    const auto m = scn::materialize(base, {&suite.scenarios[0]});
    conv::ConvertConfig cfg;
    cfg.ns = ns;
    auto g = conv::empty_graph(onto::ProfileName::rddl);
    conv::populate_kg(g, m, cfg);
    std::vector<scn::LineageTuple> tuples;
    for (const auto& st : suite.scenarios[0].steps) tuples.insert(tuples.end(), st.lineage.begin(), st.lineage.end());
    conv::resolve_lineage(g, cfg, tuples);
    return g;
}

}  // namespace

TEST_CASE("tokens") {
    CHECK(paths::forward_token(kg::RelationId{0}) == 2);
    CHECK(paths::inverse_token(kg::RelationId{0}) == 3);
    CHECK(paths::inverse_token(kg::RelationId{4}) == 11);
    CHECK(paths::vocab_size(5) == 12);
    const std::vector<std::string> names{"x", "hasRow"};
    CHECK(paths::token_name(names, 5) == "hasRow^-1");
    CHECK(paths::token_name(names, 1) == "NOPATH");
}

TEST_CASE("sampled paths replay and are padded") {
    Chain ch;
    paths::SamplerConfig cfg;
    cfg.num_paths = 3;
    cfg.max_length = 4;
    const auto ps = paths::sample_paths(ch.g, ch.a, ch.c, cfg);
    REQUIRE(ps.size() == 3);
    std::set<Path> distinct;
    for (const auto& p : ps) {
        CHECK(p.size() == 4);
        CHECK(paths::replay(ch.g, ch.a, ch.c, p));
        distinct.insert(p);
    }
    // Two routes exist; shortest first puts the direct edge first.
    CHECK(distinct.size() == 2);
    CHECK(length(ps[0]) == 1);

    SUBCASE("target edge is not traversed") {
        const auto blocked = paths::sample_paths(ch.g, ch.a, ch.c, cfg, ch.g.relation("usesTable"));
        for (const auto& p : blocked) {
            CHECK(length(p) == 2);
            CHECK(paths::replay(ch.g, ch.a, ch.c, p));
        }
    }
    SUBCASE("unreachable gives NOPATH") {
        for (const auto& p : paths::sample_paths(ch.g, ch.a, ch.d, cfg)) {
            CHECK(p[0] == paths::kNoPath);
            CHECK(p[1] == paths::kPad);
        }
    }
    SUBCASE("single route repeats") {
        cfg.max_length = 1;
        const auto one = paths::sample_paths(ch.g, ch.b, ch.c, cfg);
        CHECK(one[0] == one[1]);
        CHECK(one[1] == one[2]);
    }
    SUBCASE("length bound") {
        cfg.max_length = 1;
        for (const auto& p : paths::sample_paths(ch.g, ch.a, ch.c, cfg, ch.g.relation("usesTable"))) {
            CHECK(p[0] == paths::kNoPath);
        }
    }
    CHECK_THROWS_AS(paths::sample_paths(ch.g, ch.a, kg::NodeId{99}, cfg), kg::GraphError);
}

TEST_CASE("excluded relations are never walked") {
    Chain ch;
    ch.g.add_triple(ch.a, ch.g.relation("rdf:type"), ch.d);
    ch.g.add_triple(ch.d, ch.g.relation("rowDerivedFrom"), ch.c);
    paths::SamplerConfig cfg;
    for (const auto& p : paths::sample_paths(ch.g, ch.a, ch.d, cfg)) CHECK(p[0] == paths::kNoPath);
    cfg.excluded_relations.clear();
    for (const auto& p : paths::sample_paths(ch.g, ch.a, ch.d, cfg)) CHECK(p[0] != paths::kNoPath);
}

TEST_CASE("paths on a converted graph") {
    const auto g = desk_graph("train", 1);
    paths::SamplerConfig cfg;
    const auto samples = paths::build_training_set(g, cfg);
    std::size_t node_triples = 0;
    for (const auto& t : g.triples()) node_triples += std::holds_alternative<kg::NodeId>(t.object);
    CHECK(samples.size() == 2 * node_triples);
    std::size_t positives = 0;
    const auto vocab = static_cast<paths::Token>(paths::vocab_size(g.relation_count()));
    for (const auto& s : samples) {
        positives += s.label;
        REQUIRE(s.paths.size() == cfg.num_paths);
        CHECK(s.relation < g.relation_count());
        for (const auto& p : s.paths) {
            CHECK(p.size() == cfg.max_length);
            for (auto t : p) CHECK((t >= 0 && t < vocab));
        }
    }
    CHECK(positives == node_triples);
    CHECK(paths::build_training_set(g, cfg) == samples);
    cfg.seed = 1;
    CHECK_FALSE(paths::build_training_set(g, cfg) == samples);

    // Positives replay against their own triple.
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < g.triple_count() && idx < samples.size(); ++i) {
        const auto& t = g.triple(i);
        const auto* o = std::get_if<kg::NodeId>(&t.object);
        if (!o) continue;
        for (const auto& p : samples[idx].paths) {
            if (p[0] != paths::kNoPath) CHECK(paths::replay(g, t.subject, *o, p));
        }
        idx += 2;
    }

    const auto text = paths::samples_text(samples);
    CHECK(paths::parse_samples(text, cfg.num_paths, cfg.max_length) == samples);
}

TEST_CASE("eval set") {
    auto g = desk_graph("test", 2);
    const auto row_rel = g.relation("rowDerivedFrom");
    std::vector<std::pair<kg::NodeId, kg::NodeId>> gt;
    for (const auto& t : g.triples()) {
        if (t.relation == row_rel) gt.emplace_back(t.subject, std::get<kg::NodeId>(t.object));
    }
    REQUIRE_FALSE(gt.empty());
    paths::SamplerConfig cfg;
    const auto es = paths::build_eval_set(g, gt, cfg, 50);
    CHECK(es.positives.size() == gt.size());
    CHECK(es.negatives.size() == 50);
    const std::set<std::pair<kg::NodeId, kg::NodeId>> linked(gt.begin(), gt.end());
    const auto rows = paths::row_nodes(g);
    const std::set<kg::NodeId> row_set(rows.begin(), rows.end());
    std::set<std::pair<kg::NodeId, kg::NodeId>> distinct;
    for (const auto& [a, b] : es.negative_pairs) {
        CHECK_FALSE(linked.contains({a, b}));
        CHECK_FALSE(linked.contains({b, a}));
        CHECK(row_set.contains(a));
        CHECK(row_set.contains(b));
        distinct.emplace(a, b);
    }
    CHECK(distinct.size() == 50);
    for (const auto& s : es.positives) CHECK(s.label == 1);
    for (const auto& s : es.negatives) CHECK(s.label == 0);
    CHECK_THROWS_AS(paths::build_eval_set(g, gt, cfg, 1000000), std::invalid_argument);
    CHECK_THROWS_AS(paths::build_eval_set(g, {}, cfg, 5), std::invalid_argument);
}
