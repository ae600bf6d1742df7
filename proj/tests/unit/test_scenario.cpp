#include "rddl/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

using namespace rddl;

namespace {

// Child(cid PK, pid FK -> Parent.pid, qty), Parent(pid PK, price).
db::Database two_tables(std::mt19937_64& rng, std::size_t children, std::size_t parents) {
    db::Database d;
    db::Relation p;
    p.def.name = "Parent";
    p.def.columns = {{"pid", db::DataType::integer, std::nullopt, false, true, false},
                     {"price", db::DataType::decimal, std::nullopt, true, false, false}};
    for (std::size_t i = 0; i < parents; ++i) {
        p.rows.push_back({std::to_string(i + 1), kg::canonical_decimal(static_cast<double>(i) + 0.5)});
    }
    db::Relation c;
    c.def.name = "Child";
    c.def.columns = {{"cid", db::DataType::integer, std::nullopt, false, true, false},
                     {"pid", db::DataType::integer, std::nullopt, true, false, true},
                     {"qty", db::DataType::integer, std::nullopt, true, false, false}};
    c.def.foreign_keys = {{"FK_Child_Parent", "pid", "Parent", "pid"}};
    std::uniform_int_distribution<std::size_t> pick(0, parents);  // parents+1 means null
    for (std::size_t i = 0; i < children; ++i) {
        auto k = pick(rng);
        db::Cell fk = k == parents ? db::Cell{} : db::Cell{std::to_string(k + 1)};
        c.rows.push_back({std::to_string(i + 1), fk, std::to_string(i % 7 + 1)});
    }
    d.tables["Parent"] = p;
    d.tables["Child"] = c;
    db::validate(d);
    return d;
}

}  // namespace

TEST_CASE("join equals a nested-loop oracle") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 10; ++round) {
        const auto d = two_tables(rng, 5 + round * 3, 2 + round % 4);
        scn::TransformationSpec spec;
        spec.algebra = scn::Algebra::join;
        spec.sources = {"Child", "Parent"};
        spec.join = scn::JoinCondition{"pid", "pid"};
        spec.columns = {{"cid", {"cid", ""}}, {"price", {"", "price"}}};
        spec.output = "J";
        const auto res = scn::execute_transformation(d, spec);

        std::set<std::pair<std::size_t, std::size_t>> oracle;
        const auto& ch = d.tables.at("Child").rows;
        const auto& pa = d.tables.at("Parent").rows;
        for (std::size_t i = 0; i < ch.size(); ++i) {
            for (std::size_t p = 0; p < pa.size(); ++p) {
                if (ch[i][1] && ch[i][1] == pa[p][0]) oracle.emplace(i, p);
            }
        }
        std::set<std::pair<std::size_t, std::size_t>> got;
        for (const auto& rs : res.row_sources) {
            REQUIRE(rs.size() == 2);
            CHECK(rs[0].table == "Child");
            got.emplace(rs[0].row, rs[1].row);
        }
        CHECK(got == oracle);
        CHECK(res.output.rows.size() == oracle.size());
        // Each output row copies price from its parent.
        for (std::size_t r = 0; r < res.output.rows.size(); ++r) {
            CHECK(res.output.rows[r][1] == pa[res.row_sources[r][1].row][1]);
        }
    }
}

TEST_CASE("selection filter and lineage tuples") {
    std::mt19937_64 rng(2);
    const auto d = two_tables(rng, 12, 3);
    scn::TransformationSpec spec;
    spec.sources = {"Child"};
    spec.columns = {{"cid", {"cid"}}, {"qty", {"qty"}}};
    spec.filters = {scn::Filter{"qty", '>', "3"}};
    spec.math = scn::MathKind::linear;
    spec.a = 2.0;
    spec.b = 1.0;
    spec.applied = {1};
    spec.output = "S";
    const auto res = scn::execute_transformation(d, spec);
    std::size_t expected = 0;
    for (const auto& row : d.tables.at("Child").rows) expected += std::stoi(*row[2]) > 3;
    CHECK(res.output.rows.size() == expected);
    for (std::size_t r = 0; r < res.output.rows.size(); ++r) {
        const auto& in = d.tables.at("Child").rows[res.row_sources[r][0].row];
        CHECK(*res.output.rows[r][1] == kg::canonical_decimal(2.0 * std::stod(*in[2]) + 1.0));
    }
    CHECK(res.lineage.size() == 2 * res.output.rows.size());
    for (const auto& t : res.lineage) {
        CHECK(t.t1 == "Child");
        CHECK(t.t2 == "S");
    }
    CHECK(res.output.def.columns[1].dtype == db::DataType::decimal);
    // Source left untouched.
    std::mt19937_64 again(2);
    CHECK(d == two_tables(again, 12, 3));
}

TEST_CASE("math functions") {
    CHECK(scn::apply_unary(scn::MathKind::projection, 3, 4, "12") == "12");
    CHECK(scn::apply_unary(scn::MathKind::linear, 2, 1, "3") == "7.0");
    CHECK(scn::apply_unary(scn::MathKind::power, 2, 0, "3") == "9.0");
    CHECK(scn::apply_unary(scn::MathKind::log, 0, 0, "1") == "0.0");
    CHECK(scn::apply_unary(scn::MathKind::exp, 0, 0, "5") == "1.0");
    CHECK(scn::apply_bilinear(0.5, "4", "3") == "6.0");
    CHECK_THROWS_AS(scn::apply_unary(scn::MathKind::log, 0, 0, "0"), scn::ScenarioError);
    CHECK_THROWS_AS(scn::apply_unary(scn::MathKind::power, 2, 0, "-1"), scn::ScenarioError);
    CHECK_THROWS_AS(scn::apply_unary(scn::MathKind::exp, 0, 1000, "1000"), scn::ScenarioError);
    CHECK(scn::family_of(scn::MathKind::bilinear) == scn::MathFamily::nonlinear);
    CHECK(scn::family_of(scn::MathKind::linear) == scn::MathFamily::linear);
}

TEST_CASE("task names") {
    const auto tasks = scn::all_tasks();
    REQUIRE(tasks.size() == 9);
    CHECK(scn::task_name(tasks.front()) == "selection-projection");
    CHECK(scn::task_name(tasks.back()) == "union-nonlinear");
    for (auto t : tasks) CHECK(scn::parse_task(scn::task_name(t)) == t);
    CHECK_FALSE(scn::parse_task("selection-quadratic").has_value());
}

TEST_CASE("suite shape and determinism") {
    const auto base = db::northwind_fixture({10, 0});
    const auto suite = scn::generate_suite(base, 4);
    CHECK(suite.scenarios.size() == 180);
    CHECK(suite.transformation_count() == 720);
    std::set<std::size_t> ids;
    std::set<std::string> outputs;
    for (const auto& s : suite.scenarios) {
        ids.insert(s.id);
        CHECK(s.steps.size() == 4);
        for (const auto& st : s.steps) {
            CHECK(st.spec.algebra == s.task.algebra);
            CHECK(scn::family_of(st.spec.math) == s.task.family);
            CHECK(outputs.insert(st.spec.output).second);
            CHECK_FALSE(base.contains(st.spec.output));
            CHECK(st.output.def.name == st.spec.output);
        }
    }
    CHECK(ids.size() == 180);
    CHECK(*ids.begin() == 1);
    for (auto t : scn::all_tasks()) CHECK(suite.of_task(t).size() == 20);
    CHECK(suite == scn::generate_suite(base, 4));
    CHECK(scn::manifest_text(suite) == scn::manifest_text(scn::generate_suite(base, 4)));
    CHECK_FALSE(scn::manifest_text(suite) == scn::manifest_text(scn::generate_suite(base, 5)));

    scn::SuiteConfig small{3, 2, {scn::Task{scn::Algebra::join, scn::MathFamily::linear}}};
    const auto s2 = scn::generate_suite(base, 1, small);
    CHECK(s2.transformation_count() == 6);
}

TEST_CASE("materialize records every step and stays valid") {
    const auto base = db::northwind_fixture({10, 1});
    const auto suite = scn::generate_suite(base, 9);
    for (auto t : scn::all_tasks()) {
        auto sc = suite.of_task(t);
        const auto m = scn::materialize(base, {sc.front(), sc.back()});
        CHECK(m.executions.size() == 8);
        for (const auto& e : m.executions) {
            CHECK(m.contains(e.output));
            for (const auto& s : e.sources) CHECK(m.contains(s));
        }
        CHECK_NOTHROW(db::validate(m));
    }
}

TEST_CASE("lineage csv round trip") {
    std::vector<scn::LineageTuple> t{{"A", "x", "1", "B", "y", "2.0"}, {"A b", "x,y", "q\"r", "C", "z", ""}};
    CHECK(scn::parse_lineage_csv(scn::lineage_csv(t)) == t);
}
