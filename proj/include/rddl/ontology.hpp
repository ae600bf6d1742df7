#pragma once
// The two ontology profiles (baseline and RDDL) as code-defined
// vocabularies, plus the IRI scheme the converter uses for individuals and
// class nodes.

#include "rddl/kgstore.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rddl::onto {

enum class ProfileName { baseline, rddl };

std::string_view to_string(ProfileName name);
// Throws std::invalid_argument for anything but "baseline" / "rddl".
ProfileName parse_profile_name(std::string_view text);

enum class PropertyKind { object, data };

struct OntClass {
    std::string name;
    std::optional<std::string> parent;

    bool operator==(const OntClass&) const = default;
};

struct OntProperty {
    std::string name;
    PropertyKind kind = PropertyKind::object;
    // Only set where enforced by validate_graph.
    std::optional<std::string> domain;
    std::optional<std::string> range;
    std::optional<kg::LiteralKind> literal_range;
    // "derivedFrom" for the four lineage properties.
    std::optional<std::string> super_property;

    bool operator==(const OntProperty&) const = default;
};

// Abstract parent of the lineage properties; not emitted into graphs.
inline constexpr std::string_view kLineageMarker = "derivedFrom";
inline constexpr std::string_view kLineageAlignment = "http://www.w3.org/ns/prov#wasDerivedFrom";

struct OntologyProfile {
    ProfileName name = ProfileName::rddl;
    std::vector<OntClass> classes;
    std::vector<OntProperty> properties;

    const OntClass* find_class(std::string_view name) const;
    const OntProperty* find_property(std::string_view name) const;
    bool has_class(std::string_view name) const { return find_class(name) != nullptr; }
    bool has_property(std::string_view name) const { return find_property(name) != nullptr; }

    // Resolves aliases ("ColumnValue" -> "CellValue"); nullopt if unknown.
    std::optional<std::string> canonical_class(std::string_view name) const;

    // "rdf:type" followed by every property, in declaration order. Graphs
    // built from this list share RelationIds.
    std::vector<std::string> relation_names() const;

    bool operator==(const OntologyProfile&) const = default;
};

const OntologyProfile& vocabulary(ProfileName name);
const OntologyProfile& vocabulary(std::string_view name);

// Reflexive-transitive subclass test. Throws std::invalid_argument for
// classes the profile does not define.
bool is_subclass_of(const OntologyProfile& profile, std::string_view sub, std::string_view super);

struct Violation {
    enum class Kind { unknown_property, unknown_class, domain, range };
    Kind kind;
    std::size_t triple_index;
    std::string message;
};

std::vector<Violation> validate_graph(const OntologyProfile& profile, const kg::KnowledgeGraph& graph);

// Documentation export: classes, subclass axioms, properties with their
// declared domain/range, in sorted N-Triples.
std::string export_schema(const OntologyProfile& profile);

// --- IRI scheme -----------------------------------------------------------

// Replaces every character outside [A-Za-z0-9_-] with '_'.
std::string sanitize(std::string_view name);
std::string individual_iri(std::string_view ns, std::string_view local);
std::string class_iri(std::string_view ns, std::string_view class_name);
// Class name for an IRI produced by class_iri, nullopt otherwise.
std::optional<std::string> class_name_from_iri(std::string_view iri);

// Asserted classes of `node` (objects of its rdf:type triples), canonicalized.
std::vector<std::string> asserted_classes(const OntologyProfile& profile, const kg::KnowledgeGraph& graph,
                                          kg::NodeId node);

}  // namespace rddl::onto
