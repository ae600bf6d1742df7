#include "rddl/convert.hpp"

#include "rddl/csv.hpp"

#include <algorithm>
#include <set>

namespace rddl::conv {

using onto::ProfileName;

kg::KnowledgeGraph empty_graph(ProfileName profile) {
    auto names = onto::vocabulary(profile).relation_names();
    return kg::KnowledgeGraph(names);
}

std::string table_iri(const ConvertConfig& cfg, std::string_view table) {
    return onto::individual_iri(cfg.ns, onto::sanitize(table));
}

std::string column_iri(const ConvertConfig& cfg, std::string_view table, std::string_view column, bool view) {
    if (view && !cfg.prefix_view_columns) return onto::individual_iri(cfg.ns, onto::sanitize(column));
    return onto::individual_iri(cfg.ns, onto::sanitize(std::string(table) + "_" + std::string(column)));
}

std::string row_iri(const ConvertConfig& cfg, std::string_view table, std::size_t row) {
    return onto::individual_iri(cfg.ns, onto::sanitize(table) + ".row." + std::to_string(row));
}

std::string cell_iri(const ConvertConfig& cfg, std::string_view table, std::size_t row, std::size_t column) {
    return onto::individual_iri(cfg.ns,
                                onto::sanitize(table) + ".row." + std::to_string(row) + "." + std::to_string(column));
}

namespace {

struct Emitter {
    kg::KnowledgeGraph& g;
    const ConvertConfig& cfg;
    const onto::OntologyProfile& profile;

    kg::NodeId node(const std::string& iri) { return g.add_node(iri); }

    void type(kg::NodeId n, std::string_view cls) {
        if (!profile.has_class(cls)) throw ConvertError("class '" + std::string(cls) + "' not in profile");
        g.add_triple(n, g.relation(kg::kRdfType), node(onto::class_iri(cfg.ns, cls)));
    }
    void link(kg::NodeId s, std::string_view rel, kg::NodeId o) { g.add_triple(s, g.relation(rel), o); }
    void data(kg::NodeId s, std::string_view rel, const kg::Literal& o) { g.add_triple(s, g.relation(rel), o); }
};

std::string_view datatype_class(db::DataType t) {
    switch (t) {
        case db::DataType::integer:
        case db::DataType::decimal: return "NumericDataType";
        case db::DataType::boolean: return "BooleanDataType";
        case db::DataType::date: return "TemporalDataType";
        case db::DataType::varchar: return "CharacterDataType";
    }
    return "DataType";
}

void emit_rows(Emitter& e, const db::Relation& rel, kg::NodeId table, const std::vector<kg::NodeId>& columns) {
    for (std::size_t r = 0; r < rel.rows.size(); ++r) {
        auto row = e.node(row_iri(e.cfg, rel.def.name, r));
        e.type(row, "Row");
        e.link(table, "hasRow", row);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            auto cell = e.node(cell_iri(e.cfg, rel.def.name, r, c));
            e.type(cell, "CellValue");
            e.link(row, "hasCellValue", cell);
            e.link(cell, "belongsToColumn", columns[c]);
            const auto& v = rel.rows[r][c];
            if (v) e.data(cell, "exactValue", kg::Literal::parse(db::literal_kind(rel.def.columns[c].dtype), *v));
        }
    }
}

}  // namespace

DataTypeRef resolve_type(kg::KnowledgeGraph& g, const ConvertConfig& cfg, std::string_view dtype,
                         std::optional<int> length) {
    if (cfg.profile != ProfileName::rddl) throw ConvertError("resolve_type requires the rddl profile");
    const auto type = db::parse_data_type(dtype);
    const std::string name(db::to_string(type));
    std::string local = "DataType." + name;
    if (length) local += "." + std::to_string(*length);
    const auto iri = onto::individual_iri(cfg.ns, local);
    if (auto existing = g.find_node(iri)) return {*existing, name, length};

    Emitter e{g, cfg, onto::vocabulary(cfg.profile)};
    auto n = e.node(iri);
    e.type(n, datatype_class(type));
    e.data(n, "datatypeName", kg::Literal::string(name));
    if (length) e.data(n, "datatypeLength", kg::Literal::integer(*length));
    return {n, name, length};
}

PopulationReport populate_kg(kg::KnowledgeGraph& g, const db::Database& database, const ConvertConfig& cfg) {
    const auto& profile = onto::vocabulary(cfg.profile);
    const bool rddl = cfg.profile == ProfileName::rddl;
    Emitter e{g, cfg, profile};

    auto object_class = [&](const db::Relation& rel) -> std::string {
        if (!rddl) return "Table";
        if (!profile.has_class(rel.object_class)) {
            throw ConvertError("object '" + rel.def.name + "' has unknown class '" + rel.object_class + "'");
        }
        return rel.object_class;
    };

    for (const auto& [name, view] : database.views) {
        auto v = e.node(table_iri(cfg, name));
        e.type(v, rddl ? object_class(view) : "Table");
        std::vector<kg::NodeId> columns;
        for (const auto& col : view.def.columns) {
            auto c = e.node(column_iri(cfg, name, col.name, true));
            e.type(c, "Column");
            e.link(v, "hasColumn", c);
            columns.push_back(c);
        }
        if (cfg.use_data) emit_rows(e, view, v, columns);
    }

    for (const auto& [name, table] : database.tables) {
        auto t = e.node(table_iri(cfg, name));
        e.type(t, object_class(table));
        std::vector<kg::NodeId> columns;
        for (const auto& col : table.def.columns) {
            auto c = e.node(column_iri(cfg, name, col.name, false));
            e.type(c, "Column");
            e.link(t, "hasColumn", c);
            columns.push_back(c);
            if (!rddl) continue;
            e.data(c, "isNullable", kg::Literal::boolean(col.nullable));
            e.link(c, "hasDatatype", resolve_type(g, cfg, db::to_string(col.dtype), col.length).node);
            if (col.is_pk) {
                auto pk = e.node(onto::individual_iri(cfg.ns, "PK." + onto::sanitize(name)));
                e.type(pk, "PrimaryKey");
                e.link(c, "hasConstraint", pk);
            }
            if (col.is_fk) {
                for (const auto& fk : table.def.foreign_keys) {
                    if (fk.column != col.name) continue;
                    auto f = e.node(onto::individual_iri(cfg.ns, "FK." + onto::sanitize(fk.name)));
                    e.type(f, "ForeignKey");
                    e.link(c, "hasConstraint", f);
                }
            }
            if (cfg.emit_not_null && !col.nullable && !col.is_pk) {
                auto nn = e.node(onto::individual_iri(cfg.ns, "NN." + onto::sanitize(name) + "." + onto::sanitize(col.name)));
                e.type(nn, "NotNullConstraint");
                e.link(c, "hasConstraint", nn);
            }
        }
        if (rddl) {
            for (const auto& fk : table.def.foreign_keys) {
                const db::Relation* target_rel = database.find(fk.ref_table);
                if (!target_rel) {
                    throw ConvertError("foreign key '" + fk.name + "' targets table '" + fk.ref_table +
                                       "' absent from the graph");
                }
                auto target = e.node(table_iri(cfg, fk.ref_table));
                auto f = e.node(onto::individual_iri(cfg.ns, "FK." + onto::sanitize(fk.name)));
                e.link(f, "referencesTable", target);
            }
        }
        if (cfg.use_data) emit_rows(e, table, t, columns);
    }

    if (rddl && cfg.emit_executions) {
        for (const auto& ex : database.executions) {
            const db::Relation* out = database.find(ex.output);
            if (!out) throw ConvertError("execution '" + ex.name + "' output '" + ex.output + "' absent");
            auto q = e.node(onto::individual_iri(cfg.ns, "Query." + onto::sanitize(ex.name)));
            auto qe = e.node(onto::individual_iri(cfg.ns, "QueryExecution." + onto::sanitize(ex.name)));
            e.type(q, "Query");
            e.type(qe, "QueryExecution");
            e.link(qe, "executesQuery", q);
            for (const auto& s : ex.sources) {
                if (!database.contains(s)) throw ConvertError("execution '" + ex.name + "' source '" + s + "' absent");
                e.link(qe, "usesTable", e.node(table_iri(cfg, s)));
            }
            if (cfg.use_data) {
                for (std::size_t r = 0; r < out->rows.size(); ++r) {
                    e.link(qe, "generatesRow", e.node(row_iri(cfg, ex.output, r)));
                }
            }
        }
    }

    PopulationReport report;
    report.nodes = g.node_count();
    report.triples = g.triple_count();
    const auto type = g.relation(kg::kRdfType);
    for (const auto& t : g.triples()) {
        ++report.triples_by_relation[g.relation_name(t.relation)];
        if (t.relation == type) {
            if (auto cls = onto::class_name_from_iri(g.iri(std::get<kg::NodeId>(t.object)))) {
                ++report.individuals_by_class[*cls];
            }
        }
    }
    return report;
}

std::string PopulationReport::text() const {
    std::string out = "nodes=" + std::to_string(nodes) + "\ntriples=" + std::to_string(triples) + "\n";
    for (const auto& [cls, n] : individuals_by_class) out += "class." + cls + "=" + std::to_string(n) + "\n";
    for (const auto& [rel, n] : triples_by_relation) out += "relation." + rel + "=" + std::to_string(n) + "\n";
    return out;
}

namespace {

std::string describe(const scn::LineageTuple& t) {
    return "[" + t.t1 + "," + t.c1 + "," + t.v1 + "," + t.t2 + "," + t.c2 + "," + t.v2 + "]";
}

struct Side {
    kg::NodeId table;
    kg::NodeId column;
};

Side resolve_side(const kg::KnowledgeGraph& g, const ConvertConfig& cfg, const std::string& table,
                  const std::string& column, const scn::LineageTuple& t) {
    auto tn = g.find_node(table_iri(cfg, table));
    if (!tn) throw ConvertError("lineage tuple " + describe(t) + ": table '" + table + "' not in graph");
    const auto has_column = g.relation("hasColumn");
    for (bool view : {false, true}) {
        auto cn = g.find_node(column_iri(cfg, table, column, view));
        if (cn && g.contains({*tn, has_column, *cn})) return {*tn, *cn};
    }
    throw ConvertError("lineage tuple " + describe(t) + ": column '" + column + "' of '" + table + "' not in graph");
}

// (row, cell) pairs with (r hasCellValue x), (x exactValue v),
// (x belongsToColumn c), (t hasColumn c).
std::set<std::pair<kg::NodeId, kg::NodeId>> matching_rows(const kg::KnowledgeGraph& g, const Side& side,
                                                          const std::string& value) {
    std::set<std::pair<kg::NodeId, kg::NodeId>> out;
    const auto has_cell = g.relation("hasCellValue");
    const auto exact = g.relation("exactValue");
    const auto belongs = g.relation("belongsToColumn");
    const auto has_column = g.relation("hasColumn");
    for (auto kind : {kg::LiteralKind::string, kg::LiteralKind::integer, kg::LiteralKind::decimal,
                      kg::LiteralKind::boolean}) {
        kg::Literal lit;
        try {
            lit = kg::Literal::parse(kind, value);
        } catch (const kg::GraphError&) {
            continue;
        }
        if (lit.lexical != value) continue;
        const std::vector<kg::TriplePattern> conj{
            {kg::Var{"x"}, exact, lit},
            {kg::Var{"x"}, belongs, side.column},
            {kg::Var{"r"}, has_cell, kg::Var{"x"}},
            {side.table, has_column, side.column},
        };
        for (const auto& b : kg::match_pattern(g, conj)) {
            out.emplace(std::get<kg::NodeId>(b.at("r")), std::get<kg::NodeId>(b.at("x")));
        }
    }
    return out;
}

}  // namespace

LineageCounts resolve_lineage(kg::KnowledgeGraph& g, const ConvertConfig& cfg,
                              const std::vector<scn::LineageTuple>& tuples) {
    const bool rddl = cfg.profile == ProfileName::rddl;
    const auto& profile = onto::vocabulary(cfg.profile);
    Emitter e{g, cfg, profile};
    const auto row_rel = g.relation("rowDerivedFrom");
    const auto col_rel = g.relation("columnDerivedFrom");
    const auto val_rel = g.relation("valueDerivedFrom");
    const auto tab_rel = g.relation("tableDerivedFrom");

    LineageCounts counts;
    for (const auto& t : tuples) {
        const Side src = resolve_side(g, cfg, t.t1, t.c1, t);
        const Side dst = resolve_side(g, cfg, t.t2, t.c2, t);
        const auto src_rows = matching_rows(g, src, t.v1);
        const auto dst_rows = matching_rows(g, dst, t.v2);
        if (cfg.strict) {
            if (src_rows.size() != 1) {
                throw ConvertError("lineage tuple " + describe(t) + ": " + std::to_string(src_rows.size()) +
                                   " source rows match");
            }
            if (dst_rows.empty()) throw ConvertError("lineage tuple " + describe(t) + ": no target row matches");
        }
        for (const auto& [rd, xd] : dst_rows) {
            for (const auto& [rs, xs] : src_rows) {
                counts.row_edges += g.add_triple(rd, row_rel, rs);
                counts.value_edges += g.add_triple(xd, val_rel, xs);
            }
        }
        counts.column_edges += g.add_triple(dst.column, col_rel, src.column);
        counts.table_edges += g.add_triple(dst.table, tab_rel, src.table);
        if (rddl) {
            e.type(dst.table, "SourceDataCandidate");
            e.type(src.table, "TargetDataCandidate");
        }
    }
    return counts;
}

Split split_from_databases(db::Database train_db, std::vector<scn::LineageTuple> train_lineage, db::Database test_db,
                           std::vector<scn::LineageTuple> test_lineage, const SplitConfig& cfg) {
    Split s;
    s.train_db = std::move(train_db);
    s.test_db = std::move(test_db);
    s.train_lineage = std::move(train_lineage);
    s.test_lineage = std::move(test_lineage);

    ConvertConfig train_cfg = cfg.convert;
    train_cfg.ns = "train";
    s.train = empty_graph(cfg.convert.profile);
    populate_kg(s.train, s.train_db, train_cfg);
    resolve_lineage(s.train, train_cfg, s.train_lineage);

    ConvertConfig test_cfg = cfg.convert;
    test_cfg.ns = "test";
    s.test = empty_graph(cfg.convert.profile);
    populate_kg(s.test, s.test_db, test_cfg);
    s.test_resolved = s.test;
    resolve_lineage(s.test_resolved, test_cfg, s.test_lineage);

    const auto row_rel = s.test.relation("rowDerivedFrom");
    for (const auto& t : s.test_resolved.triples()) {
        if (s.test.contains(t)) continue;
        s.hidden.push_back(t);
        if (t.relation == row_rel) s.ground_truth.emplace_back(t.subject, std::get<kg::NodeId>(t.object));
    }
    return s;
}

Split split_train_test(const scn::ScenarioSuite& suite, scn::Task task, const SplitConfig& cfg) {
    const auto scenarios = suite.of_task(task);
    if (cfg.train_scenarios + cfg.test_scenarios > scenarios.size()) {
        throw ConvertError("task " + scn::task_name(task) + " has " + std::to_string(scenarios.size()) +
                           " scenarios, split needs " + std::to_string(cfg.train_scenarios + cfg.test_scenarios));
    }
    std::vector<const scn::Scenario*> train(scenarios.begin(), scenarios.begin() + static_cast<std::ptrdiff_t>(cfg.train_scenarios));
    std::vector<const scn::Scenario*> test(scenarios.end() - static_cast<std::ptrdiff_t>(cfg.test_scenarios), scenarios.end());
    auto lineage = [](const std::vector<const scn::Scenario*>& v) {
        std::vector<scn::LineageTuple> out;
        for (const auto* sc : v) {
            for (const auto& step : sc->steps) out.insert(out.end(), step.lineage.begin(), step.lineage.end());
        }
        return out;
    };
    return split_from_databases(scn::materialize(suite.base, train), lineage(train), scn::materialize(suite.base, test),
                                lineage(test), cfg);
}

std::string ground_truth_csv(const kg::KnowledgeGraph& test, const std::vector<std::pair<kg::NodeId, kg::NodeId>>& gt) {
    std::string out = "src_row,dst_row\n";
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& [dst, src] : gt) rows.emplace_back(test.iri(src), test.iri(dst));
    std::sort(rows.begin(), rows.end());
    for (const auto& [a, b] : rows) {
        std::vector<std::string> f{a, b};
        out += csv::format_record(std::span<const std::string>(f));
    }
    return out;
}

}  // namespace rddl::conv
