#pragma once
// Transformation scenarios over a relational database: generation,
// execution and ground-truth lineage capture.

#include "rddl/reldb.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rddl::scn {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Algebra { selection, join, union_ };
enum class MathKind { projection, linear, bilinear, power, log, exp };
enum class MathFamily { projection, linear, nonlinear };

std::string_view to_string(Algebra a);
std::string_view to_string(MathKind m);
std::string_view to_string(MathFamily f);
Algebra parse_algebra(std::string_view text);
MathKind parse_math(std::string_view text);
MathFamily family_of(MathKind m);

struct Task {
    Algebra algebra = Algebra::selection;
    MathFamily family = MathFamily::projection;
    auto operator<=>(const Task&) const = default;
};

// "selection-projection", ..., "union-nonlinear"
std::string task_name(Task task);
std::optional<Task> parse_task(std::string_view name);
// Row-major over algebra then family; 9 entries.
std::vector<Task> all_tasks();

struct Filter {
    std::string column;
    char op = '<';  // '<', '>' or '='
    std::string constant;  // canonical lexical form
    bool operator==(const Filter&) const = default;
};

// Join on child.fk_column = parent.ref_column; sources[0] is the child.
struct JoinCondition {
    std::string fk_column;
    std::string ref_column;
    bool operator==(const JoinCondition&) const = default;
};

struct OutputColumn {
    std::string name;
    // Column read from each source, or empty if this output column does not
    // draw from that source (join sides).
    std::vector<std::string> inputs;
    bool operator==(const OutputColumn&) const = default;
};

struct TransformationSpec {
    Algebra algebra = Algebra::selection;
    MathKind math = MathKind::projection;
    std::vector<std::string> sources;
    std::vector<OutputColumn> columns;
    std::vector<std::optional<Filter>> filters;  // one per source; unused by join
    std::optional<JoinCondition> join;
    double a = 1.0;
    double b = 0.0;
    // Output column indexes the math applies to. Unary kinds use one; bilinear
    // writes a*u*v into applied[0] and copies applied[1] unchanged.
    std::vector<std::size_t> applied;
    std::string output;
    std::string object_class = "Table";

    bool operator==(const TransformationSpec&) const = default;
};

struct LineageTuple {
    std::string t1, c1, v1, t2, c2, v2;
    auto operator<=>(const LineageTuple&) const = default;
};

struct RowSource {
    std::string table;
    std::size_t row = 0;
    auto operator<=>(const RowSource&) const = default;
};

struct ExecutionResult {
    db::Relation output;
    std::vector<LineageTuple> lineage;
    // Source rows of every output row.
    std::vector<std::vector<RowSource>> row_sources;
};

// Applies `spec` to `database` without modifying it. Views are keyed by the
// caller; the returned relation carries spec.object_class.
ExecutionResult execute_transformation(const db::Database& database, const TransformationSpec& spec);

// Numeric map used by the math kinds, rendered canonically.
std::string apply_unary(MathKind kind, double a, double b, std::string_view value);
std::string apply_bilinear(double a, std::string_view u, std::string_view v);

// True for classes stored with views (bare column names in the graph).
bool is_view_class(std::string_view object_class);

struct Step {
    TransformationSpec spec;
    db::Relation output;
    std::vector<LineageTuple> lineage;
    std::vector<std::vector<RowSource>> row_sources;
    bool operator==(const Step&) const = default;
};

struct Scenario {
    std::size_t id = 0;  // 1-based, unique across the suite
    Task task;
    std::size_t index_in_task = 0;  // 0-based
    std::vector<Step> steps;
    bool operator==(const Scenario&) const = default;
};

struct SuiteConfig {
    std::size_t scenarios_per_task = 20;
    std::size_t transformations = 4;
    std::vector<Task> tasks = all_tasks();
};

struct ScenarioSuite {
    std::uint64_t seed = 0;
    db::Database base;
    std::vector<Scenario> scenarios;

    std::size_t transformation_count() const;
    std::vector<const Scenario*> of_task(Task task) const;
    bool operator==(const ScenarioSuite&) const = default;
};

ScenarioSuite generate_suite(const db::Database& database, std::uint64_t seed, const SuiteConfig& config = {});

// Base tables plus every object produced by `scenarios`, with their
// executions recorded.
db::Database materialize(const db::Database& base, const std::vector<const Scenario*>& scenarios);

// Flat manifest (tab separated) and one lineage CSV per transformation.
void write_suite(const ScenarioSuite& suite, const std::filesystem::path& dir);
std::string manifest_text(const ScenarioSuite& suite);

// Lineage CSV with header t1,c1,v1,t2,c2,v2.
std::string lineage_csv(const std::vector<LineageTuple>& tuples);
std::vector<LineageTuple> parse_lineage_csv(std::string_view text);

}  // namespace rddl::scn
