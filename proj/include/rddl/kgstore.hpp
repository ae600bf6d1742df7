#pragma once
// Typed triple store.
//
// Nodes, relations and literals are interned into dense ids in insertion
// order. Triples have set semantics and are reachable through three
// indexes: by subject, by object (node or literal) and by
// (relation, object literal).

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace rddl::kg {

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeId {
    std::uint32_t value = 0;
    auto operator<=>(const NodeId&) const = default;
};

struct RelationId {
    std::uint32_t value = 0;
    auto operator<=>(const RelationId&) const = default;
};

struct LiteralId {
    std::uint32_t value = 0;
    auto operator<=>(const LiteralId&) const = default;
};

enum class LiteralKind : std::uint8_t { string, integer, decimal, boolean };

std::string_view to_string(LiteralKind kind);

// Canonical lexical forms. All of them throw GraphError on malformed input.
//   integer: optional '-', no leading zeros, "-0" -> "0"
//   decimal: fixed notation, 12 significant digits, trailing zeros
//            stripped, always an explicit point ("7.0")
//   boolean: "true" / "false"
std::string canonical_integer(std::string_view text);
std::string canonical_decimal(double value);
std::string canonical_decimal(std::string_view text);
std::string canonical_boolean(std::string_view text);

struct Literal {
    std::string lexical;
    LiteralKind kind = LiteralKind::string;

    static Literal string(std::string text);
    static Literal integer(std::int64_t value);
    static Literal decimal(double value);
    static Literal boolean(bool value);
    // Canonicalizes `raw` according to `kind`.
    static Literal parse(LiteralKind kind, std::string_view raw);

    auto operator<=>(const Literal&) const = default;
};

using Term = std::variant<NodeId, LiteralId>;

struct Triple {
    NodeId subject;
    RelationId relation;
    Term object;

    auto operator<=>(const Triple&) const = default;
    bool object_is_node() const { return std::holds_alternative<NodeId>(object); }
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept;
};

class KnowledgeGraph {
public:
    KnowledgeGraph() = default;
    // Registers the given relations first, in order, so that graphs built
    // from the same list share RelationIds.
    explicit KnowledgeGraph(std::span<const std::string> relation_names);

    NodeId add_node(std::string_view iri);
    std::optional<NodeId> find_node(std::string_view iri) const;
    const std::string& iri(NodeId node) const;
    std::size_t node_count() const { return node_iris_.size(); }
    bool has_node(NodeId node) const { return node.value < node_iris_.size(); }

    RelationId add_relation(std::string_view name);
    std::optional<RelationId> find_relation(std::string_view name) const;
    // Throws GraphError when the relation is not registered.
    RelationId relation(std::string_view name) const;
    const std::string& relation_name(RelationId relation) const;
    std::size_t relation_count() const { return relation_names_.size(); }
    const std::vector<std::string>& relation_names() const { return relation_names_; }

    LiteralId intern_literal(const Literal& literal);
    std::optional<LiteralId> find_literal(const Literal& literal) const;
    const Literal& literal(LiteralId id) const;
    std::size_t literal_count() const { return literals_.size(); }

    // Returns true if the triple was newly inserted.
    bool add_triple(NodeId subject, RelationId relation, NodeId object);
    bool add_triple(NodeId subject, RelationId relation, const Literal& object);
    bool add_triple(const Triple& triple);
    bool contains(const Triple& triple) const { return triple_set_.contains(triple); }

    const std::vector<Triple>& triples() const { return triples_; }
    std::size_t triple_count() const { return triples_.size(); }
    const Triple& triple(std::uint32_t index) const { return triples_[index]; }

    // Index lookups return positions in triples().
    std::span<const std::uint32_t> by_subject(NodeId subject) const;
    std::span<const std::uint32_t> by_object(NodeId object) const;
    std::span<const std::uint32_t> by_object(LiteralId object) const;
    std::span<const std::uint32_t> by_relation_literal(RelationId relation, LiteralId object) const;

    // Same registries, only the triples accepted by `keep`.
    KnowledgeGraph filtered(const std::function<bool(const Triple&)>& keep) const;

    // Objects of (subject, relation, ?o) that are nodes.
    std::vector<NodeId> objects(NodeId subject, RelationId relation) const;

private:
    void check_node(NodeId node) const;
    bool insert(const Triple& triple);

    std::vector<std::string> node_iris_;
    std::unordered_map<std::string, NodeId> node_index_;
    std::vector<std::string> relation_names_;
    std::unordered_map<std::string, RelationId> relation_index_;
    std::vector<Literal> literals_;
    std::map<Literal, LiteralId> literal_index_;

    std::vector<Triple> triples_;
    std::unordered_set<Triple, TripleHash> triple_set_;
    std::vector<std::vector<std::uint32_t>> by_subject_;
    std::vector<std::vector<std::uint32_t>> by_object_node_;
    std::vector<std::vector<std::uint32_t>> by_object_literal_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_relation_literal_;
};

// ---------------------------------------------------------------------------
// Conjunctive pattern matching

struct Var {
    std::string name;
    auto operator<=>(const Var&) const = default;
};

using NodePattern = std::variant<NodeId, Var>;
using RelationPattern = std::variant<RelationId, Var>;
using ObjectPattern = std::variant<NodeId, Literal, Var>;

struct TriplePattern {
    NodePattern subject;
    RelationPattern relation;
    ObjectPattern object;
};

using Value = std::variant<NodeId, RelationId, LiteralId>;
using Binding = std::map<std::string, Value>;

// All bindings under which every pattern is a triple of `graph`. Evaluated as
// a left-deep, index-backed join in the order given; the result does not
// depend on that order.
std::set<Binding> match_pattern(const KnowledgeGraph& graph, std::span<const TriplePattern> conjunction);

// ---------------------------------------------------------------------------
// N-Triples

class ParseError : public GraphError {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline constexpr std::string_view kRdfType = "rdf:type";
inline constexpr std::string_view kRdfTypeIri = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kVocabularyNs = "http://rddl.example.org/ontology#";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema#";

std::string relation_iri(std::string_view name);
std::string relation_name_from_iri(std::string_view iri);

// One line per triple, sorted bytewise, LF-terminated.
std::string serialize_ntriples(const KnowledgeGraph& graph);
KnowledgeGraph parse_ntriples(std::string_view text, std::span<const std::string> relation_seed = {});

}  // namespace rddl::kg
