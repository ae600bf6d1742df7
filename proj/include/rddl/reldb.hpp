#pragma once
// In-memory relational model: schemas, constraints and typed rows.
// Cells hold canonical lexical strings (see kgstore) or null.

#include "rddl/kgstore.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rddl::db {

class DatabaseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DataType { integer, decimal, varchar, boolean, date };

std::string_view to_string(DataType type);
DataType parse_data_type(std::string_view text);
kg::LiteralKind literal_kind(DataType type);
bool is_numeric(DataType type);

struct ColumnDef {
    std::string name;
    DataType dtype = DataType::varchar;
    std::optional<int> length;  // present iff dtype == varchar
    bool nullable = true;
    bool is_pk = false;
    bool is_fk = false;

    bool operator==(const ColumnDef&) const = default;
};

struct ForeignKey {
    std::string name;
    std::string column;
    std::string ref_table;
    std::string ref_column;

    bool operator==(const ForeignKey&) const = default;
};

struct TableDef {
    std::string name;
    std::vector<ColumnDef> columns;
    std::vector<ForeignKey> foreign_keys;

    std::optional<std::size_t> column_index(std::string_view column) const;
    const ColumnDef& column(std::string_view column) const;
    bool operator==(const TableDef&) const = default;
};

using Cell = std::optional<std::string>;
using Row = std::vector<Cell>;

struct Relation {
    TableDef def;
    std::vector<Row> rows;
    // Ontology class of the tabular object ("Table", "View", ...).
    std::string object_class = "Table";

    bool operator==(const Relation&) const = default;
};

// A recorded transformation run: `sources` were read to produce `output`.
struct Execution {
    std::string name;
    std::vector<std::string> sources;
    std::string output;

    bool operator==(const Execution&) const = default;
};

struct Database {
    std::map<std::string, Relation> tables;
    std::map<std::string, Relation> views;
    std::vector<Execution> executions;

    const Relation* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }
    std::size_t row_count() const;
    bool operator==(const Database&) const = default;
};

// Canonicalizes a raw field for `type`; nullopt stays null.
Cell canonical_cell(DataType type, const std::optional<std::string>& raw);

// Checks every type invariant (arity, PK uniqueness, nullability, FK
// resolution). Throws DatabaseError naming the table and row.
void validate(const Database& db);

// Directory layout:
//   schema.csv  table,column,dtype,length,nullable,is_pk,is_fk
//   fks.csv     fk_name,table,column,ref_table,ref_column
//   <table>.csv header row of column names, one row per record
//   objects.csv name,kind,class      (optional; kind is table|view)
//   executions.csv name,output,sources  (optional; sources '|'-separated)
Database load_database(const std::filesystem::path& dir);
void export_database(const Database& db, const std::filesystem::path& dir);

struct FixtureConfig {
    std::size_t rows_per_table = 50;
    std::uint64_t seed = 0;
};

// Northwind-style fixture: Customers, Employees, Products, Orders and
// Order Details with PK/FK constraints and synthetic deterministic rows.
Database northwind_fixture(const FixtureConfig& config = {});
std::vector<std::string> fixture_table_names();

}  // namespace rddl::db
