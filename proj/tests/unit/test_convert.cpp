#include "../oracles.hpp"

#include "rddl/convert.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace rddl;

namespace {

std::vector<std::string> sorted_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string toy_graph_text() {
    db::Database d;
    db::Relation r;
    r.def.name = "Items";
    r.def.columns = {{"ItemID", db::DataType::integer, std::nullopt, false, true, false},
                     {"Label", db::DataType::varchar, 10, true, false, false}};
    r.rows = {{"1", "a"}};
    d.tables["Items"] = r;
    conv::ConvertConfig cfg;
    cfg.use_data = false;
    auto g = conv::empty_graph(onto::ProfileName::rddl);
    conv::populate_kg(g, d, cfg);
    return kg::serialize_ntriples(g);
}

std::set<std::pair<std::string, std::string>> row_edges(const kg::KnowledgeGraph& g) {
    std::set<std::pair<std::string, std::string>> out;
    auto rel = g.find_relation("rowDerivedFrom");
    if (!rel) return out;
    for (const auto& t : g.triples()) {
        if (t.relation == *rel) out.emplace(g.iri(t.subject), g.iri(std::get<kg::NodeId>(t.object)));
    }
    return out;
}

}  // namespace

TEST_CASE("schema-only toy conversion matches the hand enumeration") {
    std::ifstream in(std::string(RDDL_TEST_DATA) + "/alg1_toy_rddl.nt");
    REQUIRE(in);
    std::stringstream golden;
    golden << in.rdbuf();
    const auto want = sorted_lines(golden.str());
    CHECK(want.size() == 16);
    const auto first = toy_graph_text();
    CHECK(sorted_lines(first) == want);
    CHECK(toy_graph_text() == first);
}

TEST_CASE("baseline toy conversion omits rddl-only structure") {
    db::Database d;
    db::Relation r;
    r.def.name = "Items";
    r.def.columns = {{"ItemID", db::DataType::integer, std::nullopt, false, true, false}};
    r.rows = {{"1"}, {"2"}};
    d.tables["Items"] = r;
    conv::ConvertConfig cfg;
    cfg.profile = onto::ProfileName::baseline;
    auto g = conv::empty_graph(onto::ProfileName::baseline);
    const auto rep = conv::populate_kg(g, d, cfg);
    CHECK(onto::validate_graph(onto::vocabulary(onto::ProfileName::baseline), g).empty());
    CHECK(rep.individuals_by_class.at("Row") == 2);
    CHECK(rep.individuals_by_class.at("CellValue") == 2);
    CHECK(rep.triples == g.triple_count());
    CHECK_FALSE(g.find_relation("hasDatatype").has_value());
}

TEST_CASE("converter output conforms to its profile") {
    const auto base = db::northwind_fixture({8, 2});
    const auto suite = scn::generate_suite(base, 3);
    for (auto t : scn::all_tasks()) {
        auto sc = suite.of_task(t);
        const auto m = scn::materialize(base, {sc.front()});
        for (auto p : {onto::ProfileName::baseline, onto::ProfileName::rddl}) {
            conv::ConvertConfig cfg;
            cfg.profile = p;
            auto g = conv::empty_graph(p);
            conv::populate_kg(g, m, cfg);
            const auto v = onto::validate_graph(onto::vocabulary(p), g);
            CHECK_MESSAGE(v.empty(), scn::task_name(t), " ", onto::to_string(p), " ", (v.empty() ? "" : v[0].message));
        }
    }
}

TEST_CASE("resolved row lineage equals the value-join oracle") {
    const auto base = db::northwind_fixture({6, 5});
    const auto suite = scn::generate_suite(base, 21, {2, 4, scn::all_tasks()});
    for (auto t : scn::all_tasks()) {
        auto sc = suite.of_task(t);
        const auto m = scn::materialize(base, {sc.front()});
        std::vector<scn::LineageTuple> tuples;
        for (const auto& st : sc.front()->steps) tuples.insert(tuples.end(), st.lineage.begin(), st.lineage.end());
        for (auto p : {onto::ProfileName::baseline, onto::ProfileName::rddl}) {
            conv::ConvertConfig cfg;
            cfg.profile = p;
            auto g = conv::empty_graph(p);
            conv::populate_kg(g, m, cfg);
            const auto counts = conv::resolve_lineage(g, cfg, tuples);
            const auto got = row_edges(g);
            CHECK(got == oracle::brute_lineage(m, cfg, tuples));
            CHECK(counts.row_edges == got.size());
            // Idempotent.
            const auto again = conv::resolve_lineage(g, cfg, tuples);
            CHECK(again.row_edges == 0);
        }
    }
}

TEST_CASE("train/test split is inductive") {
    const auto base = db::northwind_fixture({8, 0});
    const auto suite = scn::generate_suite(base, 0, {6, 4, scn::all_tasks()});
    conv::SplitConfig cfg;
    cfg.train_scenarios = 4;
    cfg.test_scenarios = 2;
    const auto split = conv::split_train_test(suite, scn::Task{scn::Algebra::join, scn::MathFamily::projection}, cfg);
    for (std::uint32_t i = 0; i < split.test.node_count(); ++i) {
        CHECK_FALSE(split.train.find_node(split.test.iri(kg::NodeId{i})).has_value());
    }
    CHECK_FALSE(split.ground_truth.empty());
    // Test graph carries no lineage; the resolved copy adds exactly `hidden`.
    auto row_rel = split.test.find_relation("rowDerivedFrom");
    REQUIRE(row_rel);
    for (const auto& tr : split.test.triples()) CHECK(tr.relation != *row_rel);
    CHECK(split.test_resolved.triple_count() == split.test.triple_count() + split.hidden.size());
    for (const auto& [dst, src] : split.ground_truth) {
        CHECK(split.test_resolved.contains({dst, *row_rel, src}));
        CHECK_FALSE(split.test.contains({dst, *row_rel, src}));
    }
    // Train graph is resolved.
    CHECK_FALSE(row_edges(split.train).empty());

    const auto csv_text = conv::ground_truth_csv(split.test, split.ground_truth);
    CHECK(std::count(csv_text.begin(), csv_text.end(), '\n') == static_cast<long>(split.ground_truth.size() + 1));
}
