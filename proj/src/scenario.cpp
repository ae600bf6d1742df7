#include "rddl/scenario.hpp"

#include "rddl/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>

namespace rddl::scn {

std::string_view to_string(Algebra a) {
    switch (a) {
        case Algebra::selection: return "selection";
        case Algebra::join: return "join";
        case Algebra::union_: return "union";
    }
    return "selection";
}

std::string_view to_string(MathKind m) {
    switch (m) {
        case MathKind::projection: return "projection";
        case MathKind::linear: return "linear";
        case MathKind::bilinear: return "bilinear";
        case MathKind::power: return "power";
        case MathKind::log: return "log";
        case MathKind::exp: return "exp";
    }
    return "projection";
}

std::string_view to_string(MathFamily f) {
    switch (f) {
        case MathFamily::projection: return "projection";
        case MathFamily::linear: return "linear";
        case MathFamily::nonlinear: return "nonlinear";
    }
    return "projection";
}

Algebra parse_algebra(std::string_view text) {
    for (auto a : {Algebra::selection, Algebra::join, Algebra::union_}) {
        if (to_string(a) == text) return a;
    }
    throw ScenarioError("unknown algebra '" + std::string(text) + "'");
}

MathKind parse_math(std::string_view text) {
    for (auto m : {MathKind::projection, MathKind::linear, MathKind::bilinear, MathKind::power, MathKind::log,
                   MathKind::exp}) {
        if (to_string(m) == text) return m;
    }
    throw ScenarioError("unknown math kind '" + std::string(text) + "'");
}

MathFamily family_of(MathKind m) {
    if (m == MathKind::projection) return MathFamily::projection;
    if (m == MathKind::linear) return MathFamily::linear;
    return MathFamily::nonlinear;
}

std::string task_name(Task task) { return std::string(to_string(task.algebra)) + "-" + std::string(to_string(task.family)); }

std::vector<Task> all_tasks() {
    std::vector<Task> out;
    for (auto a : {Algebra::selection, Algebra::join, Algebra::union_}) {
        for (auto f : {MathFamily::projection, MathFamily::linear, MathFamily::nonlinear}) out.push_back({a, f});
    }
    return out;
}

std::optional<Task> parse_task(std::string_view name) {
    for (auto t : all_tasks()) {
        if (task_name(t) == name) return t;
    }
    return std::nullopt;
}

bool is_view_class(std::string_view object_class) {
    return object_class == "View" || object_class == "MaterializedView";
}

namespace {

double as_number(std::string_view v) { return std::stod(std::string(v)); }

bool numeric(db::DataType t) { return db::is_numeric(t); }

}  // namespace

std::string apply_unary(MathKind kind, double a, double b, std::string_view value) {
    const double v = as_number(value);
    double out = 0.0;
    switch (kind) {
        case MathKind::projection: return std::string(value);
        case MathKind::linear: out = a * v + b; break;
        case MathKind::power:
            if (v <= 0) throw ScenarioError("power applied to non-positive value " + std::string(value));
            out = std::pow(v, a);
            break;
        case MathKind::log:
            if (v <= 0) throw ScenarioError("log applied to non-positive value " + std::string(value));
            out = std::log(v);
            break;
        case MathKind::exp: out = std::exp(b * v); break;
        case MathKind::bilinear: throw ScenarioError("bilinear is not unary");
    }
    if (!std::isfinite(out)) throw ScenarioError("non-finite result for value " + std::string(value));
    return kg::canonical_decimal(out);
}

std::string apply_bilinear(double a, std::string_view u, std::string_view v) {
    const double out = a * as_number(u) * as_number(v);
    if (!std::isfinite(out)) throw ScenarioError("non-finite bilinear result");
    return kg::canonical_decimal(out);
}

namespace {

const db::Relation& source(const db::Database& d, const std::string& name) {
    const db::Relation* r = d.find(name);
    if (!r) throw ScenarioError("source '" + name + "' absent");
    return *r;
}

std::size_t column_of(const db::Relation& r, const std::string& column, const char* what) {
    auto idx = r.def.column_index(column);
    if (!idx) throw ScenarioError(std::string(what) + " column '" + column + "' absent from '" + r.def.name + "'");
    return *idx;
}

bool passes(const db::Relation& r, std::size_t col, const Filter& f, const db::Row& row) {
    const auto& cell = row[col];
    if (!cell) return false;
    int cmp = 0;
    if (numeric(r.def.columns[col].dtype)) {
        double x = as_number(*cell), c = as_number(f.constant);
        cmp = x < c ? -1 : (x > c ? 1 : 0);
    } else {
        cmp = cell->compare(f.constant);
        cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    }
    switch (f.op) {
        case '<': return cmp < 0;
        case '>': return cmp > 0;
        case '=': return cmp == 0;
        default: throw ScenarioError(std::string("unknown comparator '") + f.op + "'");
    }
}

std::vector<std::size_t> filtered_rows(const db::Relation& r, const std::optional<Filter>& f) {
    std::vector<std::size_t> out;
    std::optional<std::size_t> col;
    if (f) col = column_of(r, f->column, "filter");
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        if (!f || passes(r, *col, *f, r.rows[i])) out.push_back(i);
    }
    return out;
}

bool is_applied(const TransformationSpec& spec, std::size_t j) {
    return std::find(spec.applied.begin(), spec.applied.end(), j) != spec.applied.end();
}

}  // namespace

ExecutionResult execute_transformation(const db::Database& database, const TransformationSpec& spec) {
    const std::size_t arity = spec.algebra == Algebra::selection ? 1 : 2;
    if (spec.sources.size() != arity) throw ScenarioError("transformation '" + spec.output + "' has wrong source count");
    if (database.contains(spec.output)) throw ScenarioError("output '" + spec.output + "' already exists");
    if (spec.math == MathKind::bilinear ? spec.applied.size() != 2
                                        : spec.applied.size() != (spec.math == MathKind::projection ? 0u : 1u)) {
        throw ScenarioError("transformation '" + spec.output + "' has wrong applied column count");
    }

    std::vector<const db::Relation*> src;
    for (const auto& s : spec.sources) src.push_back(&source(database, s));

    // Input column indexes per output column per source.
    std::vector<std::vector<std::optional<std::size_t>>> in(spec.columns.size());
    for (std::size_t j = 0; j < spec.columns.size(); ++j) {
        const auto& oc = spec.columns[j];
        if (oc.inputs.size() != arity) throw ScenarioError("output column '" + oc.name + "' has wrong input count");
        for (std::size_t k = 0; k < arity; ++k) {
            if (oc.inputs[k].empty()) {
                in[j].push_back(std::nullopt);
            } else {
                in[j].push_back(column_of(*src[k], oc.inputs[k], "projected"));
            }
        }
    }
    for (auto j : spec.applied) {
        if (j >= spec.columns.size()) throw ScenarioError("applied column index out of range");
    }

    ExecutionResult res;
    auto& out = res.output;
    out.def.name = spec.output;
    out.object_class = spec.object_class;
    for (std::size_t j = 0; j < spec.columns.size(); ++j) {
        db::ColumnDef def;
        def.name = spec.columns[j].name;
        bool first = true;
        for (std::size_t k = 0; k < arity; ++k) {
            if (!in[j][k]) continue;
            const auto& c = src[k]->def.columns[*in[j][k]];
            if (first) {
                def.dtype = c.dtype;
                def.length = c.length;
                def.nullable = c.nullable;
                first = false;
            } else {
                if (c.dtype != def.dtype) throw ScenarioError("union columns have different datatypes");
                if (def.length && c.length) def.length = std::max(*def.length, *c.length);
                def.nullable = def.nullable || c.nullable;
            }
        }
        if (first) throw ScenarioError("output column '" + def.name + "' has no input");
        bool transformed = spec.math != MathKind::projection &&
                           (spec.math == MathKind::bilinear ? j == spec.applied[0] : is_applied(spec, j));
        if (transformed) {
            def.dtype = db::DataType::decimal;
            def.length.reset();
        }
        if (is_applied(spec, j)) {
            for (std::size_t k = 0; k < arity; ++k) {
                if (in[j][k] && !numeric(src[k]->def.columns[*in[j][k]].dtype)) {
                    throw ScenarioError("math applied to non-numeric column '" + spec.columns[j].name + "'");
                }
            }
        }
        out.def.columns.push_back(std::move(def));
    }

    // Emits one output row from the given per-source rows (nullopt for
    // sources not contributing to this row).
    auto emit = [&](const std::vector<std::optional<std::size_t>>& rows) {
        db::Row row(spec.columns.size());
        std::vector<RowSource> sources;
        for (std::size_t k = 0; k < arity; ++k) {
            if (rows[k]) sources.push_back({spec.sources[k], *rows[k]});
        }
        auto input = [&](std::size_t j) -> std::pair<std::size_t, const db::Cell*> {
            for (std::size_t k = 0; k < arity; ++k) {
                if (rows[k] && in[j][k]) return {k, &src[k]->rows[*rows[k]][*in[j][k]]};
            }
            throw ScenarioError("output column '" + spec.columns[j].name + "' has no input for this row");
        };
        auto tuple = [&](std::size_t k, std::size_t j_in, const std::string& v1, std::size_t j_out, const std::string& v2) {
            res.lineage.push_back({spec.sources[k], spec.columns[j_in].inputs[k], v1, spec.output,
                                   spec.columns[j_out].name, v2});
        };
        for (std::size_t j = 0; j < spec.columns.size(); ++j) {
            auto [k, cell] = input(j);
            if (spec.math == MathKind::bilinear && j == spec.applied[0]) {
                auto [k2, other] = input(spec.applied[1]);
                if (!*cell || !*other) continue;
                row[j] = apply_bilinear(spec.a, **cell, **other);
                tuple(k, j, **cell, j, *row[j]);
                tuple(k2, spec.applied[1], **other, j, *row[j]);
                continue;
            }
            if (!*cell) continue;
            bool unary = spec.math != MathKind::projection && spec.math != MathKind::bilinear && is_applied(spec, j);
            row[j] = unary ? apply_unary(spec.math, spec.a, spec.b, **cell) : **cell;
            tuple(k, j, **cell, j, *row[j]);
        }
        out.rows.push_back(std::move(row));
        res.row_sources.push_back(std::move(sources));
    };

    switch (spec.algebra) {
        case Algebra::selection: {
            if (spec.filters.size() != 1) throw ScenarioError("selection needs one filter slot");
            for (auto r : filtered_rows(*src[0], spec.filters[0])) emit({r});
            break;
        }
        case Algebra::union_: {
            if (spec.filters.size() != 2) throw ScenarioError("union needs two filter slots");
            for (std::size_t j = 0; j < spec.columns.size(); ++j) {
                if (!in[j][0] || !in[j][1]) throw ScenarioError("union column '" + spec.columns[j].name + "' not aligned");
            }
            for (auto r : filtered_rows(*src[0], spec.filters[0])) emit({r, std::nullopt});
            for (auto r : filtered_rows(*src[1], spec.filters[1])) emit({std::nullopt, r});
            break;
        }
        case Algebra::join: {
            if (!spec.join) throw ScenarioError("join without condition");
            auto fk = column_of(*src[0], spec.join->fk_column, "join");
            auto ref = column_of(*src[1], spec.join->ref_column, "join");
            for (std::size_t i = 0; i < src[0]->rows.size(); ++i) {
                const auto& key = src[0]->rows[i][fk];
                if (!key) continue;
                for (std::size_t p = 0; p < src[1]->rows.size(); ++p) {
                    if (src[1]->rows[p][ref] == key) emit({i, p});
                }
            }
            break;
        }
    }
    return res;
}

std::size_t ScenarioSuite::transformation_count() const {
    std::size_t n = 0;
    for (const auto& s : scenarios) n += s.steps.size();
    return n;
}

std::vector<const Scenario*> ScenarioSuite::of_task(Task task) const {
    std::vector<const Scenario*> out;
    for (const auto& s : scenarios) {
        if (s.task == task) out.push_back(&s);
    }
    return out;
}

namespace {

constexpr const char* kObjectClasses[] = {"Table", "View", "MaterializedView", "TemporalTable", "ExternalTable"};

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
double round2(double x) { return std::round(x * 100.0) / 100.0; }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[below(rng, v.size())];
}

template <class T>
void shuffle(Rng& rng, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(rng, i)]);
}

struct ColumnInfo {
    std::string name;
    db::DataType dtype;
    bool numeric = false;
    bool positive = false;
    std::set<std::string> values;
};

// Columns whose values are non-null and distinct: safe to project because
// Alg.-2 style value matching then identifies the source row.
std::vector<ColumnInfo> projectable(const db::Relation& r) {
    std::vector<ColumnInfo> out;
    if (r.rows.empty()) return out;
    for (std::size_t c = 0; c < r.def.columns.size(); ++c) {
        ColumnInfo info{r.def.columns[c].name, r.def.columns[c].dtype, numeric(r.def.columns[c].dtype), true, {}};
        bool ok = true;
        for (const auto& row : r.rows) {
            if (!row[c] || !info.values.insert(*row[c]).second) {
                ok = false;
                break;
            }
            if (info.numeric && as_number(*row[c]) <= 0) info.positive = false;
        }
        if (ok) out.push_back(std::move(info));
    }
    return out;
}

std::optional<Filter> make_filter(Rng& rng, const db::Relation& r) {
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < r.def.columns.size(); ++c) {
        if (numeric(r.def.columns[c].dtype)) candidates.push_back(c);
    }
    if (candidates.empty() || r.rows.empty()) return std::nullopt;
    auto c = pick(rng, candidates);
    std::vector<std::pair<double, std::string>> values;
    for (const auto& row : r.rows) {
        if (row[c]) values.emplace_back(as_number(*row[c]), *row[c]);
    }
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    Filter f;
    f.column = r.def.columns[c].name;
    double roll = uniform(rng, 0.0, 1.0);
    if (n == 1 || roll < 0.1) {
        f.op = '=';
        f.constant = values[below(rng, n)].second;
    } else {
        // Keep between half and all-but-one... of the rows.
        std::size_t keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(n * uniform(rng, 0.5, 0.9))));
        keep = std::min(keep, n - 1);
        if (roll < 0.55) {
            f.op = '<';
            f.constant = values[keep].second;
        } else {
            f.op = '>';
            f.constant = values[n - 1 - keep].second;
        }
    }
    return f;
}

std::string base_name(const std::string& column, const db::Relation& r) {
    const std::string prefix = r.def.name + "_";
    if (is_view_class(r.object_class) && column.starts_with(prefix) && column.size() > prefix.size()) {
        return column.substr(prefix.size());
    }
    return column;
}

void assign_names(TransformationSpec& spec, const std::vector<const db::Relation*>& src) {
    std::set<std::string> used;
    for (auto& oc : spec.columns) {
        std::string name;
        for (std::size_t k = 0; k < oc.inputs.size(); ++k) {
            if (!oc.inputs[k].empty()) {
                name = base_name(oc.inputs[k], *src[k]);
                break;
            }
        }
        std::string candidate = name;
        for (int n = 2; used.contains(candidate); ++n) candidate = name + "_" + std::to_string(n);
        used.insert(candidate);
        oc.name = is_view_class(spec.object_class) ? spec.output + "_" + candidate : candidate;
    }
}

MathKind draw_math(Rng& rng, MathFamily family) {
    switch (family) {
        case MathFamily::projection: return MathKind::projection;
        case MathFamily::linear: return MathKind::linear;
        case MathFamily::nonlinear: {
            static constexpr MathKind kinds[] = {MathKind::bilinear, MathKind::power, MathKind::log, MathKind::exp};
            return kinds[below(rng, 4)];
        }
    }
    return MathKind::projection;
}

struct Candidate {
    ColumnInfo info;
    std::size_t side = 0;
};

// Picks the output column indexes the math applies to, or nullopt if the
// projection cannot host this math kind.
std::optional<std::vector<std::size_t>> choose_applied(Rng& rng, MathKind math, const std::vector<std::vector<Candidate>>& per_column,
                                                       Algebra algebra) {
    if (math == MathKind::projection) return std::vector<std::size_t>{};
    auto ok = [&](std::size_t j) {
        for (const auto& c : per_column[j]) {
            if (!c.info.numeric) return false;
            if ((math == MathKind::log || math == MathKind::power) && !c.info.positive) return false;
        }
        return true;
    };
    std::vector<std::size_t> eligible;
    for (std::size_t j = 0; j < per_column.size(); ++j) {
        if (ok(j)) eligible.push_back(j);
    }
    if (math != MathKind::bilinear) {
        if (eligible.empty()) return std::nullopt;
        return std::vector<std::size_t>{pick(rng, eligible)};
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (auto i : eligible) {
        for (auto j : eligible) {
            if (i == j) continue;
            // On a join the two factors come from different sides.
            if (algebra == Algebra::join && per_column[i][0].side == per_column[j][0].side) continue;
            pairs.emplace_back(i, j);
        }
    }
    if (pairs.empty()) return std::nullopt;
    auto [i, j] = pick(rng, pairs);
    return std::vector<std::size_t>{i, j};
}

void draw_params(Rng& rng, TransformationSpec& spec, const std::vector<const db::Relation*>& src) {
    switch (spec.math) {
        case MathKind::projection:
        case MathKind::log: spec.a = 1.0; spec.b = 0.0; break;
        case MathKind::linear: {
            double a = round2(uniform(rng, 0.5, 3.0));
            spec.a = uniform(rng, 0.0, 1.0) < 0.5 ? -a : a;
            spec.b = round2(uniform(rng, -50.0, 50.0));
            break;
        }
        case MathKind::power: {
            double a = 1.0;
            while (std::abs(a - 1.0) < 0.05) a = round2(uniform(rng, 0.5, 2.0));
            spec.a = a;
            spec.b = 0.0;
            break;
        }
        case MathKind::bilinear:
            spec.a = round2(uniform(rng, 0.5, 2.0));
            spec.b = 0.0;
            break;
        case MathKind::exp: {
            double max_abs = 0.0;
            const auto j = spec.applied[0];
            for (std::size_t k = 0; k < src.size(); ++k) {
                const auto& name = spec.columns[j].inputs[k];
                if (name.empty()) continue;
                auto c = *src[k]->def.column_index(name);
                for (const auto& row : src[k]->rows) {
                    if (row[c]) max_abs = std::max(max_abs, std::abs(as_number(*row[c])));
                }
            }
            spec.a = 1.0;
            spec.b = max_abs > 0 ? uniform(rng, 5.0, 7.5) / max_abs : 1.0;
            break;
        }
    }
}

// The transformed column must map distinct inputs to distinct outputs, and
// no output may equal another row's input value in the matched columns.
bool unambiguous(const TransformationSpec& spec, const std::vector<const db::Relation*>& src,
                 const ExecutionResult& res) {
    if (spec.math == MathKind::projection) return true;
    const auto j = spec.applied[0];
    std::vector<std::size_t> factors{j};
    if (spec.math == MathKind::bilinear) factors.push_back(spec.applied[1]);

    std::map<std::string, std::vector<std::string>> key_of_value;
    std::set<std::string> inputs;
    for (std::size_t r = 0; r < res.output.rows.size(); ++r) {
        const auto& value = res.output.rows[r][j];
        if (!value) continue;
        std::vector<std::string> key;
        for (auto f : factors) {
            for (const auto& rs : res.row_sources[r]) {
                auto k = static_cast<std::size_t>(
                    std::find(spec.sources.begin(), spec.sources.end(), rs.table) - spec.sources.begin());
                const auto& name = spec.columns[f].inputs[k];
                if (name.empty()) continue;
                const auto& cell = src[k]->rows[rs.row][*src[k]->def.column_index(name)];
                if (!cell) continue;
                key.push_back(*cell);
                inputs.insert(*cell);
            }
        }
        auto [it, inserted] = key_of_value.try_emplace(*value, key);
        if (!inserted && it->second != key) return false;
    }
    for (const auto& [value, key] : key_of_value) {
        if (inputs.contains(value) && std::find(key.begin(), key.end(), value) == key.end()) return false;
    }
    return true;
}

}  // namespace

namespace {

struct Proposal {
    TransformationSpec spec;
    std::vector<std::vector<Candidate>> per_column;
};

std::string choose_source(Rng& rng, const std::vector<std::string>& pool, const std::vector<std::string>& produced) {
    if (!produced.empty() && uniform(rng, 0.0, 1.0) < 0.6) return produced.back();
    return pick(rng, pool);
}

std::optional<Proposal> propose_selection(Rng& rng, const db::Database& work, const std::vector<std::string>& pool,
                                          const std::vector<std::string>& produced) {
    const auto name = choose_source(rng, pool, produced);
    const auto& rel = *work.find(name);
    auto cols = projectable(rel);
    if (cols.size() < 2) return std::nullopt;
    shuffle(rng, cols);
    const std::size_t k = 2 + below(rng, std::min<std::size_t>(cols.size(), 4) - 1);
    Proposal p;
    p.spec.algebra = Algebra::selection;
    p.spec.sources = {name};
    p.spec.filters = {make_filter(rng, rel)};
    for (std::size_t i = 0; i < k; ++i) {
        p.spec.columns.push_back({"", {cols[i].name}});
        p.per_column.push_back({{cols[i], 0}});
    }
    return p;
}

std::optional<Proposal> propose_join(Rng& rng, const db::Database& work, const db::Database& base) {
    struct Pair {
        std::string child, parent;
        JoinCondition cond;
    };
    std::vector<Pair> pairs;
    for (const auto& [name, rel] : base.tables) {
        for (const auto& fk : rel.def.foreign_keys) {
            if (base.tables.contains(fk.ref_table) && fk.ref_table != name) {
                pairs.push_back({name, fk.ref_table, {fk.column, fk.ref_column}});
            }
        }
    }
    if (pairs.empty()) throw ScenarioError("database has no foreign key pair for a join task");
    const auto& pr = pick(rng, pairs);
    auto child = projectable(*work.find(pr.child));
    auto parent = projectable(*work.find(pr.parent));
    if (child.empty() || parent.empty()) return std::nullopt;
    shuffle(rng, child);
    shuffle(rng, parent);
    Proposal p;
    p.spec.algebra = Algebra::join;
    p.spec.sources = {pr.child, pr.parent};
    p.spec.filters = {std::nullopt, std::nullopt};
    p.spec.join = pr.cond;
    const std::size_t kc = 1 + below(rng, std::min<std::size_t>(child.size(), 2));
    const std::size_t kp = 1 + below(rng, std::min<std::size_t>(parent.size(), 2));
    for (std::size_t i = 0; i < kc; ++i) {
        p.spec.columns.push_back({"", {child[i].name, ""}});
        p.per_column.push_back({{child[i], 0}});
    }
    for (std::size_t i = 0; i < kp; ++i) {
        p.spec.columns.push_back({"", {"", parent[i].name}});
        p.per_column.push_back({{parent[i], 1}});
    }
    return p;
}

std::optional<Proposal> propose_union(Rng& rng, const db::Database& work, const std::vector<std::string>& pool,
                                      const std::vector<std::string>& produced) {
    const auto a = choose_source(rng, pool, produced);
    const auto b = pick(rng, pool);
    if (a == b) return std::nullopt;
    auto ca = projectable(*work.find(a));
    auto cb = projectable(*work.find(b));
    shuffle(rng, ca);
    shuffle(rng, cb);
    Proposal p;
    std::set<std::size_t> used;
    for (const auto& x : ca) {
        if (p.per_column.size() == 3) break;
        for (std::size_t i = 0; i < cb.size(); ++i) {
            const auto& y = cb[i];
            if (used.contains(i) || y.dtype != x.dtype) continue;
            // Overlapping values would make the output rows' origin ambiguous.
            bool disjoint = std::none_of(y.values.begin(), y.values.end(),
                                         [&](const std::string& v) { return x.values.contains(v); });
            if (!disjoint) continue;
            used.insert(i);
            p.spec.columns.push_back({"", {x.name, y.name}});
            p.per_column.push_back({{x, 0}, {y, 1}});
            break;
        }
    }
    if (p.per_column.size() < 2) return std::nullopt;
    p.spec.algebra = Algebra::union_;
    p.spec.sources = {a, b};
    p.spec.filters = {make_filter(rng, *work.find(a)), make_filter(rng, *work.find(b))};
    return p;
}

std::string output_name(std::size_t scenario_id, std::size_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "S%03zuT%zu", scenario_id, step + 1);
    return buf;
}

Scenario generate_scenario(const db::Database& base, Task task, std::size_t id, std::size_t index_in_task,
                           std::size_t transformations, std::size_t& class_counter, std::uint64_t seed,
                           std::size_t task_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(task_index), static_cast<std::uint32_t>(index_in_task)};
    Rng rng(seq);

    Scenario sc;
    sc.id = id;
    sc.task = task;
    sc.index_in_task = index_in_task;

    db::Database work = base;
    std::vector<std::string> pool;
    for (const auto& [name, _] : base.tables) pool.push_back(name);
    std::vector<std::string> produced;

    for (std::size_t step = 0; step < transformations; ++step) {
        const std::string out_name = output_name(id, step);
        const std::string cls = kObjectClasses[class_counter % 5];
        bool done = false;
        for (int attempt = 0; attempt < 200 && !done; ++attempt) {
            const MathKind math = draw_math(rng, task.family);
            std::optional<Proposal> p;
            switch (task.algebra) {
                case Algebra::selection: p = propose_selection(rng, work, pool, produced); break;
                case Algebra::join: p = propose_join(rng, work, base); break;
                case Algebra::union_: p = propose_union(rng, work, pool, produced); break;
            }
            if (!p) continue;
            auto& spec = p->spec;
            spec.math = math;
            spec.output = out_name;
            spec.object_class = cls;
            auto applied = choose_applied(rng, math, p->per_column, task.algebra);
            if (!applied) continue;
            spec.applied = *applied;
            std::vector<const db::Relation*> src;
            for (const auto& s : spec.sources) src.push_back(work.find(s));
            assign_names(spec, src);

            for (int retry = 0; retry < 100; ++retry) {
                draw_params(rng, spec, src);
                ExecutionResult res;
                try {
                    res = execute_transformation(work, spec);
                } catch (const ScenarioError&) {
                    break;
                }
                if (res.output.rows.empty() || res.lineage.empty()) break;
                if (!unambiguous(spec, src, res)) continue;
                sc.steps.push_back({spec, res.output, std::move(res.lineage), std::move(res.row_sources)});
                done = true;
                break;
            }
        }
        if (!done) throw ScenarioError("could not generate step " + std::to_string(step + 1) + " of scenario " +
                                       std::to_string(id) + " (" + task_name(task) + ")");
        const auto& out = sc.steps.back().output;
        (is_view_class(cls) ? work.views : work.tables).emplace(out_name, out);
        pool.push_back(out_name);
        produced.push_back(out_name);
        ++class_counter;
    }
    return sc;
}

}  // namespace

ScenarioSuite generate_suite(const db::Database& database, std::uint64_t seed, const SuiteConfig& config) {
    db::validate(database);
    ScenarioSuite suite;
    suite.seed = seed;
    suite.base = database;
    std::size_t class_counter = 0;
    const auto every = all_tasks();
    for (const auto& task : config.tasks) {
        const auto task_index = static_cast<std::size_t>(std::find(every.begin(), every.end(), task) - every.begin());
        for (std::size_t k = 0; k < config.scenarios_per_task; ++k) {
            const std::size_t id = task_index * config.scenarios_per_task + k + 1;
            suite.scenarios.push_back(
                generate_scenario(database, task, id, k, config.transformations, class_counter, seed, task_index));
        }
    }
    return suite;
}

db::Database materialize(const db::Database& base, const std::vector<const Scenario*>& scenarios) {
    db::Database out = base;
    for (const auto* sc : scenarios) {
        for (const auto& step : sc->steps) {
            auto& target = is_view_class(step.output.object_class) ? out.views : out.tables;
            if (out.contains(step.spec.output)) throw ScenarioError("duplicate object '" + step.spec.output + "'");
            target.emplace(step.spec.output, step.output);
            out.executions.push_back({step.spec.output, step.spec.sources, step.spec.output});
        }
    }
    return out;
}

std::string manifest_text(const ScenarioSuite& suite) {
    std::string out = "scenario\ttask\tstep\talgebra\tmath\ta\tb\tsources\toutput\tclass\n";
    char num[64];
    for (const auto& sc : suite.scenarios) {
        for (std::size_t i = 0; i < sc.steps.size(); ++i) {
            const auto& s = sc.steps[i].spec;
            out += std::to_string(sc.id) + "\t" + task_name(sc.task) + "\t" + std::to_string(i + 1) + "\t" +
                   std::string(to_string(s.algebra)) + "\t" + std::string(to_string(s.math)) + "\t";
            std::snprintf(num, sizeof num, "%.17g\t", s.a);
            out += num;
            std::snprintf(num, sizeof num, "%.17g\t", s.b);
            out += num;
            for (std::size_t k = 0; k < s.sources.size(); ++k) out += (k ? "|" : "") + s.sources[k];
            out += "\t" + s.output + "\t" + s.object_class + "\n";
        }
    }
    return out;
}

std::string lineage_csv(const std::vector<LineageTuple>& tuples) {
    std::string out = "t1,c1,v1,t2,c2,v2\n";
    for (const auto& t : tuples) {
        std::vector<std::string> f{t.t1, t.c1, t.v1, t.t2, t.c2, t.v2};
        out += csv::format_record(std::span<const std::string>(f));
    }
    return out;
}

std::vector<LineageTuple> parse_lineage_csv(std::string_view text) {
    auto records = csv::parse(text);
    std::vector<LineageTuple> out;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.size() != 6) throw ScenarioError("lineage row " + std::to_string(i) + ": expected 6 fields");
        auto f = [&](std::size_t k) { return r[k].value_or(""); };
        out.push_back({f(0), f(1), f(2), f(3), f(4), f(5)});
    }
    return out;
}

void write_suite(const ScenarioSuite& suite, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "lineage");
    csv::write_file((dir / "manifest.tsv").string(), manifest_text(suite));
    for (const auto& sc : suite.scenarios) {
        for (const auto& step : sc.steps) {
            csv::write_file((dir / "lineage" / (step.spec.output + ".csv")).string(), lineage_csv(step.lineage));
        }
    }
}

}  // namespace rddl::scn
