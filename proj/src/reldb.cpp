#include "rddl/reldb.hpp"

#include "rddl/csv.hpp"

#include <algorithm>
#include <set>

namespace rddl::db {

std::string_view to_string(DataType type) {
    switch (type) {
        case DataType::integer: return "integer";
        case DataType::decimal: return "decimal";
        case DataType::varchar: return "varchar";
        case DataType::boolean: return "boolean";
        case DataType::date: return "date";
    }
    return "varchar";
}

DataType parse_data_type(std::string_view text) {
    if (text == "integer" || text == "int") return DataType::integer;
    if (text == "decimal" || text == "numeric") return DataType::decimal;
    if (text == "varchar") return DataType::varchar;
    if (text == "boolean" || text == "bool") return DataType::boolean;
    if (text == "date") return DataType::date;
    throw DatabaseError("unknown datatype '" + std::string(text) + "'");
}

kg::LiteralKind literal_kind(DataType type) {
    switch (type) {
        case DataType::integer: return kg::LiteralKind::integer;
        case DataType::decimal: return kg::LiteralKind::decimal;
        case DataType::boolean: return kg::LiteralKind::boolean;
        case DataType::varchar:
        case DataType::date: return kg::LiteralKind::string;
    }
    return kg::LiteralKind::string;
}

bool is_numeric(DataType type) { return type == DataType::integer || type == DataType::decimal; }

std::optional<std::size_t> TableDef::column_index(std::string_view column) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == column) return i;
    }
    return std::nullopt;
}

const ColumnDef& TableDef::column(std::string_view column) const {
    auto idx = column_index(column);
    if (!idx) throw DatabaseError("table '" + name + "' has no column '" + std::string(column) + "'");
    return columns[*idx];
}

const Relation* Database::find(std::string_view name) const {
    if (auto it = tables.find(std::string(name)); it != tables.end()) return &it->second;
    if (auto it = views.find(std::string(name)); it != views.end()) return &it->second;
    return nullptr;
}

std::size_t Database::row_count() const {
    std::size_t n = 0;
    for (const auto& [_, r] : tables) n += r.rows.size();
    for (const auto& [_, r] : views) n += r.rows.size();
    return n;
}

Cell canonical_cell(DataType type, const std::optional<std::string>& raw) {
    if (!raw) return std::nullopt;
    try {
        return kg::Literal::parse(literal_kind(type), *raw).lexical;
    } catch (const kg::GraphError& e) {
        throw DatabaseError(e.what());
    }
}

namespace {

std::string where(const std::string& table, std::size_t row) {
    return "table '" + table + "' row " + std::to_string(row);
}

void validate_relation(const Database& db, const Relation& rel) {
    const auto& def = rel.def;
    std::set<std::string> names;
    std::vector<std::size_t> pk;
    for (std::size_t i = 0; i < def.columns.size(); ++i) {
        const auto& c = def.columns[i];
        if (!names.insert(c.name).second) {
            throw DatabaseError("table '" + def.name + "': duplicate column '" + c.name + "'");
        }
        if (c.is_pk && c.nullable) {
            throw DatabaseError("table '" + def.name + "': primary key column '" + c.name + "' is nullable");
        }
        if (c.length.has_value() != (c.dtype == DataType::varchar)) {
            throw DatabaseError("table '" + def.name + "': column '" + c.name + "' length requires varchar");
        }
        if (c.length && *c.length <= 0) {
            throw DatabaseError("table '" + def.name + "': column '" + c.name + "' has non-positive length");
        }
        if (c.is_pk) pk.push_back(i);
    }

    std::set<std::vector<std::string>> keys;
    for (std::size_t r = 0; r < rel.rows.size(); ++r) {
        const auto& row = rel.rows[r];
        if (row.size() != def.columns.size()) {
            throw DatabaseError(where(def.name, r) + ": expected " + std::to_string(def.columns.size()) +
                                " fields, got " + std::to_string(row.size()));
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!row[i] && !def.columns[i].nullable) {
                throw DatabaseError(where(def.name, r) + ": null in non-nullable column '" + def.columns[i].name + "'");
            }
        }
        if (!pk.empty()) {
            std::vector<std::string> key;
            for (auto i : pk) key.push_back(*row[i]);
            if (!keys.insert(std::move(key)).second) {
                throw DatabaseError(where(def.name, r) + ": duplicate primary key");
            }
        }
    }

    for (const auto& fk : def.foreign_keys) {
        auto local = def.column_index(fk.column);
        if (!local) throw DatabaseError("table '" + def.name + "': foreign key '" + fk.name + "' column missing");
        if (!def.columns[*local].is_fk) {
            throw DatabaseError("table '" + def.name + "': column '" + fk.column + "' is not marked is_fk");
        }
        const Relation* target = db.find(fk.ref_table);
        if (!target) {
            throw DatabaseError("table '" + def.name + "': foreign key '" + fk.name + "' references missing table '" +
                                fk.ref_table + "'");
        }
        auto ref = target->def.column_index(fk.ref_column);
        if (!ref) {
            throw DatabaseError("table '" + def.name + "': foreign key '" + fk.name + "' references missing column '" +
                                fk.ref_column + "'");
        }
        std::set<std::string> values;
        for (const auto& row : target->rows) {
            if (row[*ref]) values.insert(*row[*ref]);
        }
        for (std::size_t r = 0; r < rel.rows.size(); ++r) {
            const auto& v = rel.rows[r][*local];
            if (v && !values.contains(*v)) {
                throw DatabaseError(where(def.name, r) + ": foreign key '" + fk.name + "' value '" + *v +
                                    "' not found in '" + fk.ref_table + "'");
            }
        }
    }
}

bool parse_flag(const csv::Field& f, const std::string& ctx) {
    if (!f) throw DatabaseError(ctx + ": missing boolean flag");
    if (*f == "true" || *f == "1") return true;
    if (*f == "false" || *f == "0") return false;
    throw DatabaseError(ctx + ": malformed boolean flag '" + *f + "'");
}

const std::string& required(const csv::Field& f, const std::string& ctx) {
    if (!f || f->empty()) throw DatabaseError(ctx + ": missing field");
    return *f;
}

std::vector<csv::Record> read_csv(const std::filesystem::path& path, bool optional) {
    if (!std::filesystem::exists(path)) {
        if (optional) return {};
        throw DatabaseError("missing file " + path.string());
    }
    try {
        return csv::parse(csv::read_file(path.string()));
    } catch (const csv::CsvError& e) {
        throw DatabaseError(path.filename().string() + ": " + e.what());
    }
}

}  // namespace

void validate(const Database& db) {
    for (const auto& [_, rel] : db.tables) validate_relation(db, rel);
    for (const auto& [_, rel] : db.views) validate_relation(db, rel);
    for (const auto& e : db.executions) {
        if (!db.contains(e.output)) throw DatabaseError("execution '" + e.name + "' output missing");
        for (const auto& s : e.sources) {
            if (!db.contains(s)) throw DatabaseError("execution '" + e.name + "' source '" + s + "' missing");
        }
    }
}

Database load_database(const std::filesystem::path& dir) {
    auto schema = read_csv(dir / "schema.csv", false);
    auto fks = read_csv(dir / "fks.csv", false);
    if (schema.empty()) throw DatabaseError("schema.csv: missing header");

    std::vector<std::string> order;
    std::map<std::string, TableDef> defs;
    for (std::size_t i = 1; i < schema.size(); ++i) {
        const auto& rec = schema[i];
        std::string ctx = "schema.csv row " + std::to_string(i);
        if (rec.size() != 7) throw DatabaseError(ctx + ": expected 7 fields, got " + std::to_string(rec.size()));
        const auto& table = required(rec[0], ctx);
        ColumnDef col;
        col.name = required(rec[1], ctx);
        col.dtype = parse_data_type(required(rec[2], ctx));
        if (rec[3] && !rec[3]->empty()) col.length = std::stoi(*rec[3]);
        col.nullable = parse_flag(rec[4], ctx);
        col.is_pk = parse_flag(rec[5], ctx);
        col.is_fk = parse_flag(rec[6], ctx);
        auto [it, inserted] = defs.try_emplace(table);
        if (inserted) {
            it->second.name = table;
            order.push_back(table);
        }
        it->second.columns.push_back(std::move(col));
    }
    for (std::size_t i = 1; i < fks.size(); ++i) {
        const auto& rec = fks[i];
        std::string ctx = "fks.csv row " + std::to_string(i);
        if (rec.size() != 5) throw DatabaseError(ctx + ": expected 5 fields, got " + std::to_string(rec.size()));
        auto it = defs.find(required(rec[1], ctx));
        if (it == defs.end()) throw DatabaseError(ctx + ": unknown table '" + *rec[1] + "'");
        it->second.foreign_keys.push_back(
            {required(rec[0], ctx), required(rec[2], ctx), required(rec[3], ctx), required(rec[4], ctx)});
    }

    std::map<std::string, std::pair<bool, std::string>> objects;  // name -> (is_view, class)
    auto object_rows = read_csv(dir / "objects.csv", true);
    for (std::size_t i = 1; i < object_rows.size(); ++i) {
        const auto& rec = object_rows[i];
        if (rec.size() != 3) throw DatabaseError("objects.csv: expected 3 fields");
        objects[required(rec[0], "objects.csv")] = {required(rec[1], "objects.csv") == "view",
                                                     required(rec[2], "objects.csv")};
    }

    Database db;
    for (const auto& name : order) {
        Relation rel;
        rel.def = std::move(defs[name]);
        auto data = read_csv(dir / (name + ".csv"), false);
        if (data.empty()) throw DatabaseError("table '" + name + "': data file missing header");
        const auto& header = data.front();
        if (header.size() != rel.def.columns.size()) {
            throw DatabaseError("table '" + name + "': header has " + std::to_string(header.size()) + " fields, schema has " +
                                std::to_string(rel.def.columns.size()));
        }
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i].value_or("") != rel.def.columns[i].name) {
                throw DatabaseError("table '" + name + "': header column " + std::to_string(i) + " does not match schema");
            }
        }
        for (std::size_t r = 1; r < data.size(); ++r) {
            const auto& rec = data[r];
            if (rec.size() != rel.def.columns.size()) {
                throw DatabaseError(where(name, r - 1) + ": expected " + std::to_string(rel.def.columns.size()) +
                                    " fields, got " + std::to_string(rec.size()));
            }
            Row row;
            for (std::size_t i = 0; i < rec.size(); ++i) {
                try {
                    row.push_back(canonical_cell(rel.def.columns[i].dtype, rec[i]));
                } catch (const DatabaseError& e) {
                    throw DatabaseError(where(name, r - 1) + ": " + e.what());
                }
            }
            rel.rows.push_back(std::move(row));
        }
        bool is_view = false;
        if (auto it = objects.find(name); it != objects.end()) {
            is_view = it->second.first;
            rel.object_class = it->second.second;
        }
        (is_view ? db.views : db.tables).emplace(name, std::move(rel));
    }

    auto execution_rows = read_csv(dir / "executions.csv", true);
    for (std::size_t i = 1; i < execution_rows.size(); ++i) {
        const auto& rec = execution_rows[i];
        if (rec.size() != 3) throw DatabaseError("executions.csv: expected 3 fields");
        Execution e{required(rec[0], "executions.csv"), {}, required(rec[1], "executions.csv")};
        std::string_view sources = required(rec[2], "executions.csv");
        while (!sources.empty()) {
            auto bar = sources.find('|');
            e.sources.emplace_back(sources.substr(0, bar));
            sources = bar == std::string_view::npos ? std::string_view{} : sources.substr(bar + 1);
        }
        db.executions.push_back(std::move(e));
    }

    validate(db);
    return db;
}

void export_database(const Database& db, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string schema = "table,column,dtype,length,nullable,is_pk,is_fk\n";
    std::string fks = "fk_name,table,column,ref_table,ref_column\n";
    std::string objects = "name,kind,class\n";

    auto emit = [&](const Relation& rel, bool is_view) {
        const auto& def = rel.def;
        for (const auto& c : def.columns) {
            std::vector<std::string> f{def.name,
                                       c.name,
                                       std::string(to_string(c.dtype)),
                                       c.length ? std::to_string(*c.length) : std::string(),
                                       c.nullable ? "true" : "false",
                                       c.is_pk ? "true" : "false",
                                       c.is_fk ? "true" : "false"};
            std::vector<csv::Field> fields(f.begin(), f.end());
            if (!c.length) fields[3] = std::nullopt;
            schema += csv::format_record(std::span<const csv::Field>(fields));
        }
        for (const auto& fk : def.foreign_keys) {
            std::vector<std::string> f{fk.name, def.name, fk.column, fk.ref_table, fk.ref_column};
            fks += csv::format_record(std::span<const std::string>(f));
        }
        std::vector<std::string> o{def.name, is_view ? "view" : "table", rel.object_class};
        objects += csv::format_record(std::span<const std::string>(o));

        std::vector<std::string> header;
        for (const auto& c : def.columns) header.push_back(c.name);
        std::string data = csv::format_record(std::span<const std::string>(header));
        for (const auto& row : rel.rows) data += csv::format_record(std::span<const csv::Field>(row));
        csv::write_file((dir / (def.name + ".csv")).string(), data);
    };
    for (const auto& [_, rel] : db.tables) emit(rel, false);
    for (const auto& [_, rel] : db.views) emit(rel, true);

    std::string executions = "name,output,sources\n";
    for (const auto& e : db.executions) {
        std::string sources;
        for (std::size_t i = 0; i < e.sources.size(); ++i) sources += (i ? "|" : "") + e.sources[i];
        std::vector<std::string> f{e.name, e.output, sources};
        executions += csv::format_record(std::span<const std::string>(f));
    }

    csv::write_file((dir / "schema.csv").string(), schema);
    csv::write_file((dir / "fks.csv").string(), fks);
    csv::write_file((dir / "objects.csv").string(), objects);
    csv::write_file((dir / "executions.csv").string(), executions);
}

}  // namespace rddl::db
