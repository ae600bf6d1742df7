#pragma once
// Database to knowledge graph population and row-level lineage resolution.

#include "rddl/kgstore.hpp"
#include "rddl/ontology.hpp"
#include "rddl/reldb.hpp"
#include "rddl/scenario.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rddl::conv {

class ConvertError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConvertConfig {
    onto::ProfileName profile = onto::ProfileName::rddl;
    bool use_data = true;
    std::string ns = "kg";
    // Name view columns "<view>_<col>" like table columns.
    bool prefix_view_columns = false;
    bool emit_not_null = true;
    // Query / QueryExecution individuals for recorded executions (rddl only).
    bool emit_executions = true;
    // Fail when a lineage value matches no source row or several.
    bool strict = false;
};

struct DataTypeRef {
    kg::NodeId node;
    std::string name;
    std::optional<int> length;
};

// Empty graph whose relation registry is the profile's property list.
kg::KnowledgeGraph empty_graph(onto::ProfileName profile);

DataTypeRef resolve_type(kg::KnowledgeGraph& g, const ConvertConfig& cfg, std::string_view dtype,
                         std::optional<int> length);

struct PopulationReport {
    std::size_t nodes = 0;
    std::size_t triples = 0;
    std::map<std::string, std::size_t> individuals_by_class;
    std::map<std::string, std::size_t> triples_by_relation;

    // key=value lines
    std::string text() const;
};

PopulationReport populate_kg(kg::KnowledgeGraph& g, const db::Database& database, const ConvertConfig& cfg);

// IRIs of the individuals created by populate_kg.
std::string table_iri(const ConvertConfig& cfg, std::string_view table);
std::string column_iri(const ConvertConfig& cfg, std::string_view table, std::string_view column, bool view);
std::string row_iri(const ConvertConfig& cfg, std::string_view table, std::size_t row);
std::string cell_iri(const ConvertConfig& cfg, std::string_view table, std::size_t row, std::size_t column);

struct LineageCounts {
    std::size_t row_edges = 0;  // newly added rowDerivedFrom triples
    std::size_t column_edges = 0;
    std::size_t value_edges = 0;
    std::size_t table_edges = 0;
};

LineageCounts resolve_lineage(kg::KnowledgeGraph& g, const ConvertConfig& cfg,
                              const std::vector<scn::LineageTuple>& tuples);

inline constexpr const char* kLineageRelations[] = {"rowDerivedFrom", "columnDerivedFrom", "valueDerivedFrom",
                                                    "tableDerivedFrom"};

struct SplitConfig {
    std::size_t train_scenarios = 17;
    std::size_t test_scenarios = 3;
    ConvertConfig convert;  // ns is replaced by "train" / "test"
};

struct Split {
    db::Database train_db;
    db::Database test_db;
    std::vector<scn::LineageTuple> train_lineage;
    std::vector<scn::LineageTuple> test_lineage;
    kg::KnowledgeGraph train;
    kg::KnowledgeGraph test;
    // `test` with lineage resolved. Node ids agree with `test` on every node
    // `test` has; `hidden` lists the triples only this graph contains.
    kg::KnowledgeGraph test_resolved;
    std::vector<kg::Triple> hidden;
    // (dst row, src row) pairs of the hidden rowDerivedFrom triples.
    std::vector<std::pair<kg::NodeId, kg::NodeId>> ground_truth;
};

// Train scenarios are the first `train_scenarios` of the task, test
// scenarios the last `test_scenarios`.
Split split_train_test(const scn::ScenarioSuite& suite, scn::Task task, const SplitConfig& cfg);

// Builds train/test from already materialized databases and lineage.
Split split_from_databases(db::Database train_db, std::vector<scn::LineageTuple> train_lineage, db::Database test_db,
                           std::vector<scn::LineageTuple> test_lineage, const SplitConfig& cfg);

// CSV "src_row,dst_row" of IRIs.
std::string ground_truth_csv(const kg::KnowledgeGraph& test, const std::vector<std::pair<kg::NodeId, kg::NodeId>>& gt);

}  // namespace rddl::conv
