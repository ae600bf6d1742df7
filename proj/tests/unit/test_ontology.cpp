#include "rddl/convert.hpp"
#include "rddl/ontology.hpp"

#include <doctest.h>

using namespace rddl;
using onto::ProfileName;

TEST_CASE("profile contents") {
    const auto& rddl = onto::vocabulary(ProfileName::rddl);
    const auto& base = onto::vocabulary(ProfileName::baseline);
    CHECK(rddl.has_class("PrimaryKey"));
    CHECK_FALSE(base.has_class("QueryExecution"));
    for (const char* c : {"NamedDBObject", "TabularDataObject", "StoredCode", "Table", "View", "MaterializedView",
                          "TemporalTable", "ExternalTable", "Query", "Column", "Row", "CellValue", "DataType",
                          "NumericDataType", "BooleanDataType", "TemporalDataType", "CharacterDataType", "Constraint",
                          "PrimaryKey", "ForeignKey", "NotNullConstraint", "CheckConstraint", "QueryExecution",
                          "ProcExecution", "FuncExecution", "SourceDataCandidate", "TargetDataCandidate"}) {
        CHECK_MESSAGE(rddl.has_class(c), c);
    }
    CHECK(base.classes.size() == 4);
    for (const char* c : {"Table", "Column", "Row", "CellValue"}) CHECK(base.has_class(c));

    for (const char* p : {"hasColumn", "hasRow", "belongsToColumn", "hasCellValue", "exactValue", "rowDerivedFrom",
                          "columnDerivedFrom", "valueDerivedFrom", "tableDerivedFrom"}) {
        CHECK_MESSAGE(base.has_property(p), p);
        CHECK_MESSAGE(rddl.has_property(p), p);
    }
    for (const char* p : {"hasDatatype", "hasConstraint", "referencesTable", "usesTable", "generatesRow", "executesQuery",
                          "executesFunction", "executesProcedure", "isNullable", "datatypeName", "datatypeLength"}) {
        CHECK_MESSAGE(rddl.has_property(p), p);
        CHECK_FALSE_MESSAGE(base.has_property(p), p);
    }
    // Strict subset.
    for (const auto& p : base.properties) CHECK(rddl.has_property(p.name));
    for (const auto& c : base.classes) CHECK(rddl.has_class(c.name));
    CHECK(rddl.properties.size() > base.properties.size());

    CHECK(onto::vocabulary(ProfileName::rddl) == onto::vocabulary("rddl"));
    CHECK_THROWS_AS(onto::vocabulary("owl"), std::invalid_argument);
}

TEST_CASE("lineage properties share the derivedFrom marker") {
    for (auto p : {ProfileName::baseline, ProfileName::rddl}) {
        for (const char* name : conv::kLineageRelations) {
            const auto* prop = onto::vocabulary(p).find_property(name);
            REQUIRE(prop);
            CHECK(prop->super_property == std::string(onto::kLineageMarker));
        }
    }
}

TEST_CASE("subclass graph") {
    const auto& p = onto::vocabulary(ProfileName::rddl);
    CHECK(onto::is_subclass_of(p, "MaterializedView", "TabularDataObject"));
    CHECK(onto::is_subclass_of(p, "Table", "Table"));
    CHECK_FALSE(onto::is_subclass_of(p, "Column", "Constraint"));
    CHECK_THROWS_AS(onto::is_subclass_of(p, "Nope", "Table"), std::invalid_argument);
    // Forest: following parents always terminates at a root.
    for (const auto& c : p.classes) {
        std::size_t steps = 0;
        const onto::OntClass* cur = &c;
        while (cur->parent && steps <= p.classes.size()) {
            cur = p.find_class(*cur->parent);
            REQUIRE(cur);
            ++steps;
        }
        CHECK(steps <= p.classes.size());
    }
}

TEST_CASE("ColumnValue is an alias of CellValue") {
    const auto& p = onto::vocabulary(ProfileName::rddl);
    CHECK(p.canonical_class("ColumnValue") == std::optional<std::string>("CellValue"));
    CHECK(p.canonical_class("CellValue") == std::optional<std::string>("CellValue"));
    CHECK_FALSE(p.canonical_class("Spreadsheet").has_value());
}

TEST_CASE("validate_graph") {
    SUBCASE("unknown property under baseline") {
        const auto& base = onto::vocabulary(ProfileName::baseline);
        kg::KnowledgeGraph g(base.relation_names());
        auto col = g.add_node("urn:c");
        auto dt = g.add_node("urn:d");
        g.add_triple(col, g.add_relation("hasDatatype"), dt);
        const auto v = onto::validate_graph(base, g);
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == onto::Violation::Kind::unknown_property);
    }
    SUBCASE("declared domain mismatch") {
        const auto& p = onto::vocabulary(ProfileName::rddl);
        kg::KnowledgeGraph g(p.relation_names());
        auto row = g.add_node(onto::individual_iri("kg", "r"));
        auto col = g.add_node(onto::individual_iri("kg", "c"));
        g.add_triple(row, g.relation("rdf:type"), g.add_node(onto::class_iri("kg", "Row")));
        g.add_triple(col, g.relation("rdf:type"), g.add_node(onto::class_iri("kg", "Column")));
        g.add_triple(row, g.relation("hasColumn"), col);
        const auto v = onto::validate_graph(p, g);
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == onto::Violation::Kind::domain);
    }
    SUBCASE("unknown class") {
        const auto& p = onto::vocabulary(ProfileName::baseline);
        kg::KnowledgeGraph g(p.relation_names());
        auto n = g.add_node("urn:x");
        g.add_triple(n, g.relation("rdf:type"), g.add_node(onto::class_iri("kg", "View")));
        const auto v = onto::validate_graph(p, g);
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == onto::Violation::Kind::unknown_class);
    }
    SUBCASE("tableDerivedFrom needs its role classes") {
        const auto& p = onto::vocabulary(ProfileName::rddl);
        kg::KnowledgeGraph g(p.relation_names());
        auto a = g.add_node("urn:a");
        auto b = g.add_node("urn:b");
        g.add_triple(a, g.relation("tableDerivedFrom"), b);
        CHECK(onto::validate_graph(p, g).size() == 2);
        g.add_triple(a, g.relation("rdf:type"), g.add_node(onto::class_iri("kg", "SourceDataCandidate")));
        g.add_triple(b, g.relation("rdf:type"), g.add_node(onto::class_iri("kg", "TargetDataCandidate")));
        CHECK(onto::validate_graph(p, g).empty());
    }
}

TEST_CASE("IRI scheme") {
    CHECK(onto::sanitize("Order Details") == "Order_Details");
    CHECK(onto::individual_iri("train", "Orders") == "urn:rddl:train:Orders");
    CHECK(onto::class_iri("train", "Row") == "urn:rddl:train:class:Row");
    CHECK(onto::class_name_from_iri(onto::class_iri("x", "View")) == std::optional<std::string>("View"));
    CHECK_FALSE(onto::class_name_from_iri("urn:rddl:x:Orders").has_value());
}

TEST_CASE("schema export lists every class and property") {
    for (auto name : {ProfileName::baseline, ProfileName::rddl}) {
        const auto& p = onto::vocabulary(name);
        const auto text = onto::export_schema(p);
        const auto g = kg::parse_ntriples(text);
        for (const auto& c : p.classes) CHECK(text.find("#" + c.name + ">") != std::string::npos);
        for (const auto& prop : p.properties) CHECK(text.find("#" + prop.name + ">") != std::string::npos);
        CHECK(kg::serialize_ntriples(g) == text);
    }
}
