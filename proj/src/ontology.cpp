#include "rddl/ontology.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace rddl::onto {

std::string_view to_string(ProfileName name) {
    return name == ProfileName::baseline ? "baseline" : "rddl";
}

ProfileName parse_profile_name(std::string_view text) {
    if (text == "baseline") return ProfileName::baseline;
    if (text == "rddl" || text == "RDDL") return ProfileName::rddl;
    throw std::invalid_argument("unknown ontology profile '" + std::string(text) + "'");
}

const OntClass* OntologyProfile::find_class(std::string_view name) const {
    for (const auto& c : classes) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

const OntProperty* OntologyProfile::find_property(std::string_view name) const {
    for (const auto& p : properties) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::optional<std::string> OntologyProfile::canonical_class(std::string_view name) const {
    if (name == "ColumnValue") name = "CellValue";
    if (!has_class(name)) return std::nullopt;
    return std::string(name);
}

std::vector<std::string> OntologyProfile::relation_names() const {
    std::vector<std::string> out{std::string(kg::kRdfType)};
    for (const auto& p : properties) out.push_back(p.name);
    return out;
}

namespace {

using kg::LiteralKind;

OntProperty object_prop(std::string name, std::optional<std::string> domain = {},
                        std::optional<std::string> range = {}) {
    return {std::move(name), PropertyKind::object, std::move(domain), std::move(range), std::nullopt, std::nullopt};
}

OntProperty data_prop(std::string name, LiteralKind kind) {
    return {std::move(name), PropertyKind::data, std::nullopt, std::nullopt, kind, std::nullopt};
}

OntProperty lineage_prop(std::string name, std::optional<std::string> domain = {},
                         std::optional<std::string> range = {}) {
    auto p = object_prop(std::move(name), std::move(domain), std::move(range));
    p.super_property = std::string(kLineageMarker);
    return p;
}

OntologyProfile make_baseline() {
    OntologyProfile p;
    p.name = ProfileName::baseline;
    p.classes = {{"Table", {}}, {"Column", {}}, {"Row", {}}, {"CellValue", {}}};
    p.properties = {
        object_prop("hasColumn", "Table"),
        object_prop("hasRow"),
        object_prop("hasCellValue"),
        object_prop("belongsToColumn", "CellValue", "Column"),
        OntProperty{"exactValue", PropertyKind::data, std::nullopt, std::nullopt, std::nullopt, std::nullopt},
        lineage_prop("tableDerivedFrom"),
        lineage_prop("columnDerivedFrom"),
        lineage_prop("rowDerivedFrom"),
        lineage_prop("valueDerivedFrom"),
    };
    return p;
}

OntologyProfile make_rddl() {
    OntologyProfile p;
    p.name = ProfileName::rddl;
    p.classes = {
        {"NamedDBObject", {}},
        {"TabularDataObject", "NamedDBObject"},
        {"Table", "TabularDataObject"},
        {"TemporalTable", "Table"},
        {"ExternalTable", "Table"},
        {"View", "TabularDataObject"},
        {"MaterializedView", "View"},
        {"Query", "NamedDBObject"},
        {"StoredCode", "NamedDBObject"},
        {"Procedure", "StoredCode"},
        {"Function", "StoredCode"},
        {"Package", "StoredCode"},
        {"Column", "NamedDBObject"},
        {"Constraint", "NamedDBObject"},
        {"PrimaryKey", "Constraint"},
        {"ForeignKey", "Constraint"},
        {"NotNullConstraint", "Constraint"},
        {"CheckConstraint", "Constraint"},
        {"Row", {}},
        {"CellValue", {}},
        {"DataType", {}},
        {"NumericDataType", "DataType"},
        {"BooleanDataType", "DataType"},
        {"TemporalDataType", "DataType"},
        {"CharacterDataType", "DataType"},
        {"QueryExecution", {}},
        {"ProcExecution", {}},
        {"FuncExecution", {}},
        {"SourceDataCandidate", {}},
        {"TargetDataCandidate", {}},
    };
    p.properties = {
        object_prop("hasColumn", "TabularDataObject"),
        object_prop("hasRow"),
        object_prop("hasCellValue"),
        object_prop("belongsToColumn", "CellValue", "Column"),
        OntProperty{"exactValue", PropertyKind::data, std::nullopt, std::nullopt, std::nullopt, std::nullopt},
        lineage_prop("tableDerivedFrom", "SourceDataCandidate", "TargetDataCandidate"),
        lineage_prop("columnDerivedFrom"),
        lineage_prop("rowDerivedFrom"),
        lineage_prop("valueDerivedFrom"),
        object_prop("hasDatatype"),
        object_prop("hasConstraint"),
        object_prop("referencesTable", "ForeignKey", "Table"),
        object_prop("usesTable"),
        object_prop("generatesRow"),
        object_prop("executesQuery"),
        object_prop("executesFunction"),
        object_prop("executesProcedure"),
        data_prop("isNullable", LiteralKind::boolean),
        data_prop("datatypeName", LiteralKind::string),
        data_prop("datatypeLength", LiteralKind::integer),
    };
    return p;
}

}  // namespace

const OntologyProfile& vocabulary(ProfileName name) {
    static const OntologyProfile baseline = make_baseline();
    static const OntologyProfile rddl = make_rddl();
    return name == ProfileName::baseline ? baseline : rddl;
}

const OntologyProfile& vocabulary(std::string_view name) { return vocabulary(parse_profile_name(name)); }

bool is_subclass_of(const OntologyProfile& profile, std::string_view sub, std::string_view super) {
    auto a = profile.canonical_class(sub);
    auto b = profile.canonical_class(super);
    if (!a) throw std::invalid_argument("unknown class '" + std::string(sub) + "'");
    if (!b) throw std::invalid_argument("unknown class '" + std::string(super) + "'");
    const OntClass* c = profile.find_class(*a);
    // The hierarchy is a forest, so the walk terminates.
    while (c) {
        if (c->name == *b) return true;
        c = c->parent ? profile.find_class(*c->parent) : nullptr;
    }
    return false;
}

std::string sanitize(std::string_view name) {
    std::string out(name);
    for (char& c : out) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) c = '_';
    }
    return out;
}

namespace {
constexpr std::string_view kIriPrefix = "urn:rddl:";
constexpr std::string_view kClassSegment = ":class:";
}  // namespace

std::string individual_iri(std::string_view ns, std::string_view local) {
    return std::string(kIriPrefix) + sanitize(ns) + ":" + std::string(local);
}

std::string class_iri(std::string_view ns, std::string_view class_name) {
    return std::string(kIriPrefix) + sanitize(ns) + std::string(kClassSegment) + std::string(class_name);
}

std::optional<std::string> class_name_from_iri(std::string_view iri) {
    if (!iri.starts_with(kIriPrefix)) return std::nullopt;
    auto pos = iri.find(kClassSegment, kIriPrefix.size());
    if (pos == std::string_view::npos) return std::nullopt;
    return std::string(iri.substr(pos + kClassSegment.size()));
}

std::vector<std::string> asserted_classes(const OntologyProfile& profile, const kg::KnowledgeGraph& graph,
                                          kg::NodeId node) {
    std::vector<std::string> out;
    auto type = graph.find_relation(kg::kRdfType);
    if (!type) return out;
    for (auto object : graph.objects(node, *type)) {
        auto name = class_name_from_iri(graph.iri(object));
        if (!name) continue;
        out.push_back(profile.canonical_class(*name).value_or(*name));
    }
    return out;
}

std::vector<Violation> validate_graph(const OntologyProfile& profile, const kg::KnowledgeGraph& graph) {
    std::vector<Violation> out;

    auto has_type_under = [&](kg::NodeId node, const std::string& cls) {
        for (const auto& c : asserted_classes(profile, graph, node)) {
            if (profile.has_class(c) && is_subclass_of(profile, c, cls)) return true;
        }
        return false;
    };

    for (std::size_t i = 0; i < graph.triple_count(); ++i) {
        const auto& t = graph.triple(static_cast<std::uint32_t>(i));
        const auto& rel = graph.relation_name(t.relation);

        if (rel == kg::kRdfType) {
            const auto* node = std::get_if<kg::NodeId>(&t.object);
            if (!node) {
                out.push_back({Violation::Kind::range, i, "rdf:type object is a literal"});
                continue;
            }
            auto name = class_name_from_iri(graph.iri(*node));
            if (!name || !profile.canonical_class(*name)) {
                out.push_back({Violation::Kind::unknown_class, i, "unknown class " + graph.iri(*node)});
            }
            continue;
        }

        const OntProperty* prop = profile.find_property(rel);
        if (!prop) {
            out.push_back({Violation::Kind::unknown_property, i, "unknown property " + rel});
            continue;
        }
        if (prop->domain && !has_type_under(t.subject, *prop->domain)) {
            out.push_back({Violation::Kind::domain, i,
                           rel + ": subject " + graph.iri(t.subject) + " is not a " + *prop->domain});
        }
        if (prop->range) {
            const auto* node = std::get_if<kg::NodeId>(&t.object);
            if (!node || !has_type_under(*node, *prop->range)) {
                out.push_back({Violation::Kind::range, i, rel + ": object is not a " + *prop->range});
            }
        }
    }
    return out;
}

std::string export_schema(const OntologyProfile& profile) {
    const std::string ns(kg::kVocabularyNs);
    const std::string owl = "http://www.w3.org/2002/07/owl#";
    const std::string rdfs = "http://www.w3.org/2000/01/rdf-schema#";
    const std::string type = "<" + std::string(kg::kRdfTypeIri) + ">";
    auto iri = [](const std::string& s) { return "<" + s + ">"; };

    std::set<std::string> lines;
    auto add = [&](const std::string& s, const std::string& p, const std::string& o) {
        lines.insert(s + " " + p + " " + o + " .");
    };
    for (const auto& c : profile.classes) {
        add(iri(ns + c.name), type, iri(owl + "Class"));
        if (c.parent) add(iri(ns + c.name), iri(rdfs + "subClassOf"), iri(ns + *c.parent));
    }
    add(iri(ns + std::string(kLineageMarker)), type, iri(owl + "ObjectProperty"));
    add(iri(ns + std::string(kLineageMarker)), iri(rdfs + "subPropertyOf"), iri(std::string(kLineageAlignment)));
    for (const auto& p : profile.properties) {
        const auto subject = iri(ns + p.name);
        add(subject, type, iri(owl + (p.kind == PropertyKind::object ? "ObjectProperty" : "DatatypeProperty")));
        if (p.domain) add(subject, iri(rdfs + "domain"), iri(ns + *p.domain));
        if (p.range) add(subject, iri(rdfs + "range"), iri(ns + *p.range));
        if (p.literal_range) {
            add(subject, iri(rdfs + "range"), iri(std::string(kg::kXsdNs) + std::string(kg::to_string(*p.literal_range))));
        }
        if (p.super_property) add(subject, iri(rdfs + "subPropertyOf"), iri(ns + *p.super_property));
    }
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

}  // namespace rddl::onto
