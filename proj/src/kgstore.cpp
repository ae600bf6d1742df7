#include "rddl/kgstore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace rddl::kg {

std::string_view to_string(LiteralKind kind) {
    switch (kind) {
        case LiteralKind::string: return "string";
        case LiteralKind::integer: return "integer";
        case LiteralKind::decimal: return "decimal";
        case LiteralKind::boolean: return "boolean";
    }
    return "string";
}

std::string canonical_integer(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw GraphError("malformed integer literal");
    }
    auto first = text.find_first_not_of('0');
    if (first == std::string_view::npos) return "0";
    std::string out;
    if (negative) out.push_back('-');
    out.append(text.substr(first));
    return out;
}

std::string canonical_decimal(double value) {
    if (!std::isfinite(value)) throw GraphError("non-finite decimal literal");
    if (value == 0.0) return "0.0";

    // d.ddddddddddde[+-]x gives exactly 12 significant digits.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.11e", value);
    std::string_view s(buf);
    bool negative = s.front() == '-';
    if (negative) s.remove_prefix(1);
    auto e = s.find('e');
    std::string digits;
    for (char c : s.substr(0, e)) {
        if (c != '.') digits.push_back(c);
    }
    int exponent = std::stoi(std::string(s.substr(e + 1)));
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

    const int n = static_cast<int>(digits.size());
    const int point = exponent + 1;  // digits before the decimal point
    std::string out;
    if (negative) out.push_back('-');
    if (point <= 0) {
        out += "0.";
        out.append(static_cast<std::size_t>(-point), '0');
        out += digits;
    } else if (point >= n) {
        out += digits;
        out.append(static_cast<std::size_t>(point - n), '0');
        out += ".0";
    } else {
        out += digits.substr(0, static_cast<std::size_t>(point));
        out.push_back('.');
        out += digits.substr(static_cast<std::size_t>(point));
    }
    return out;
}

std::string canonical_decimal(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw GraphError("malformed decimal literal '" + std::string(text) + "'");
    }
    return canonical_decimal(value);
}

std::string canonical_boolean(std::string_view text) {
    if (text == "true" || text == "TRUE" || text == "True" || text == "1") return "true";
    if (text == "false" || text == "FALSE" || text == "False" || text == "0") return "false";
    throw GraphError("malformed boolean literal '" + std::string(text) + "'");
}

Literal Literal::string(std::string text) { return {std::move(text), LiteralKind::string}; }
Literal Literal::integer(std::int64_t value) { return {std::to_string(value), LiteralKind::integer}; }
Literal Literal::decimal(double value) { return {canonical_decimal(value), LiteralKind::decimal}; }
Literal Literal::boolean(bool value) { return {value ? "true" : "false", LiteralKind::boolean}; }

Literal Literal::parse(LiteralKind kind, std::string_view raw) {
    switch (kind) {
        case LiteralKind::string: return {std::string(raw), kind};
        case LiteralKind::integer: return {canonical_integer(raw), kind};
        case LiteralKind::decimal: return {canonical_decimal(raw), kind};
        case LiteralKind::boolean: return {canonical_boolean(raw), kind};
    }
    return {std::string(raw), LiteralKind::string};
}

std::size_t TripleHash::operator()(const Triple& t) const noexcept {
    std::uint64_t h = t.subject.value;
    h = h * 0x9E3779B97F4A7C15ull + t.relation.value;
    std::uint64_t o = std::holds_alternative<NodeId>(t.object)
                          ? std::get<NodeId>(t.object).value
                          : (std::uint64_t{1} << 40) | std::get<LiteralId>(t.object).value;
    h = h * 0x9E3779B97F4A7C15ull + o;
    h ^= h >> 29;
    return static_cast<std::size_t>(h);
}

KnowledgeGraph::KnowledgeGraph(std::span<const std::string> relation_names) {
    for (const auto& name : relation_names) add_relation(name);
}

NodeId KnowledgeGraph::add_node(std::string_view iri) {
    std::string key(iri);
    if (auto it = node_index_.find(key); it != node_index_.end()) return it->second;
    NodeId id{static_cast<std::uint32_t>(node_iris_.size())};
    node_iris_.push_back(key);
    node_index_.emplace(std::move(key), id);
    by_subject_.emplace_back();
    by_object_node_.emplace_back();
    return id;
}

std::optional<NodeId> KnowledgeGraph::find_node(std::string_view iri) const {
    auto it = node_index_.find(std::string(iri));
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
}

const std::string& KnowledgeGraph::iri(NodeId node) const {
    check_node(node);
    return node_iris_[node.value];
}

RelationId KnowledgeGraph::add_relation(std::string_view name) {
    std::string key(name);
    if (auto it = relation_index_.find(key); it != relation_index_.end()) return it->second;
    RelationId id{static_cast<std::uint32_t>(relation_names_.size())};
    relation_names_.push_back(key);
    relation_index_.emplace(std::move(key), id);
    return id;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view name) const {
    auto it = relation_index_.find(std::string(name));
    if (it == relation_index_.end()) return std::nullopt;
    return it->second;
}

RelationId KnowledgeGraph::relation(std::string_view name) const {
    auto id = find_relation(name);
    if (!id) throw GraphError("unknown relation '" + std::string(name) + "'");
    return *id;
}

const std::string& KnowledgeGraph::relation_name(RelationId relation) const {
    if (relation.value >= relation_names_.size()) throw GraphError("unknown relation");
    return relation_names_[relation.value];
}

LiteralId KnowledgeGraph::intern_literal(const Literal& literal) {
    if (auto it = literal_index_.find(literal); it != literal_index_.end()) return it->second;
    LiteralId id{static_cast<std::uint32_t>(literals_.size())};
    literals_.push_back(literal);
    literal_index_.emplace(literal, id);
    by_object_literal_.emplace_back();
    return id;
}

std::optional<LiteralId> KnowledgeGraph::find_literal(const Literal& literal) const {
    auto it = literal_index_.find(literal);
    if (it == literal_index_.end()) return std::nullopt;
    return it->second;
}

const Literal& KnowledgeGraph::literal(LiteralId id) const {
    if (id.value >= literals_.size()) throw GraphError("unknown literal");
    return literals_[id.value];
}

void KnowledgeGraph::check_node(NodeId node) const {
    if (!has_node(node)) throw GraphError("unknown node");
}

bool KnowledgeGraph::add_triple(NodeId subject, RelationId relation, NodeId object) {
    return add_triple(Triple{subject, relation, object});
}

bool KnowledgeGraph::add_triple(NodeId subject, RelationId relation, const Literal& object) {
    check_node(subject);
    return add_triple(Triple{subject, relation, intern_literal(object)});
}

bool KnowledgeGraph::add_triple(const Triple& triple) {
    check_node(triple.subject);
    if (auto* node = std::get_if<NodeId>(&triple.object)) {
        check_node(*node);
    } else if (std::get<LiteralId>(triple.object).value >= literals_.size()) {
        throw GraphError("unknown literal");
    }
    if (triple.relation.value >= relation_names_.size()) throw GraphError("unknown relation");
    return insert(triple);
}

bool KnowledgeGraph::insert(const Triple& triple) {
    if (!triple_set_.insert(triple).second) return false;
    auto index = static_cast<std::uint32_t>(triples_.size());
    triples_.push_back(triple);
    by_subject_[triple.subject.value].push_back(index);
    if (auto* node = std::get_if<NodeId>(&triple.object)) {
        by_object_node_[node->value].push_back(index);
    } else {
        auto lit = std::get<LiteralId>(triple.object);
        by_object_literal_[lit.value].push_back(index);
        by_relation_literal_[(std::uint64_t{triple.relation.value} << 32) | lit.value].push_back(index);
    }
    return true;
}

std::span<const std::uint32_t> KnowledgeGraph::by_subject(NodeId subject) const {
    check_node(subject);
    return by_subject_[subject.value];
}

std::span<const std::uint32_t> KnowledgeGraph::by_object(NodeId object) const {
    check_node(object);
    return by_object_node_[object.value];
}

std::span<const std::uint32_t> KnowledgeGraph::by_object(LiteralId object) const {
    if (object.value >= literals_.size()) throw GraphError("unknown literal");
    return by_object_literal_[object.value];
}

std::span<const std::uint32_t> KnowledgeGraph::by_relation_literal(RelationId relation, LiteralId object) const {
    auto it = by_relation_literal_.find((std::uint64_t{relation.value} << 32) | object.value);
    if (it == by_relation_literal_.end()) return {};
    return it->second;
}

KnowledgeGraph KnowledgeGraph::filtered(const std::function<bool(const Triple&)>& keep) const {
    KnowledgeGraph out;
    out.node_iris_ = node_iris_;
    out.node_index_ = node_index_;
    out.relation_names_ = relation_names_;
    out.relation_index_ = relation_index_;
    out.literals_ = literals_;
    out.literal_index_ = literal_index_;
    out.by_subject_.resize(node_iris_.size());
    out.by_object_node_.resize(node_iris_.size());
    out.by_object_literal_.resize(literals_.size());
    for (const auto& t : triples_) {
        if (keep(t)) out.insert(t);
    }
    return out;
}

std::vector<NodeId> KnowledgeGraph::objects(NodeId subject, RelationId relation) const {
    std::vector<NodeId> out;
    for (auto idx : by_subject(subject)) {
        const auto& t = triples_[idx];
        if (t.relation == relation) {
            if (auto* node = std::get_if<NodeId>(&t.object)) out.push_back(*node);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// A pattern slot after substituting the current binding.
struct Resolved {
    std::optional<NodeId> subject;
    std::optional<RelationId> relation;
    std::optional<Term> object;
    bool unsatisfiable = false;
};

Resolved resolve(const KnowledgeGraph& g, const TriplePattern& p, const Binding& b) {
    Resolved r;
    if (auto* node = std::get_if<NodeId>(&p.subject)) {
        if (!g.has_node(*node)) throw GraphError("unknown node");
        r.subject = *node;
    } else if (auto it = b.find(std::get<Var>(p.subject).name); it != b.end()) {
        if (auto* node = std::get_if<NodeId>(&it->second)) r.subject = *node;
        else r.unsatisfiable = true;
    }

    if (auto* rel = std::get_if<RelationId>(&p.relation)) {
        r.relation = *rel;
    } else if (auto it = b.find(std::get<Var>(p.relation).name); it != b.end()) {
        if (auto* rel2 = std::get_if<RelationId>(&it->second)) r.relation = *rel2;
        else r.unsatisfiable = true;
    }

    if (auto* node = std::get_if<NodeId>(&p.object)) {
        if (!g.has_node(*node)) throw GraphError("unknown node");
        r.object = *node;
    } else if (auto* lit = std::get_if<Literal>(&p.object)) {
        auto id = g.find_literal(*lit);
        if (!id) r.unsatisfiable = true;
        else r.object = *id;
    } else if (auto it = b.find(std::get<Var>(p.object).name); it != b.end()) {
        if (auto* node = std::get_if<NodeId>(&it->second)) r.object = Term{*node};
        else if (auto* lit = std::get_if<LiteralId>(&it->second)) r.object = Term{*lit};
        else r.unsatisfiable = true;
    }
    return r;
}

Value to_value(const Term& t) {
    if (auto* node = std::get_if<NodeId>(&t)) return *node;
    return std::get<LiteralId>(t);
}

// Binds `var` to `value`, or checks consistency if a previous slot of the
// same pattern already bound it.
bool bind_var(Binding& b, const std::string& var, const Value& value) {
    auto [it, inserted] = b.emplace(var, value);
    return inserted || it->second == value;
}

}  // namespace

std::set<Binding> match_pattern(const KnowledgeGraph& g, std::span<const TriplePattern> conjunction) {
    std::vector<Binding> current(1);
    std::vector<std::uint32_t> all;

    for (const auto& pattern : conjunction) {
        std::vector<Binding> next;
        for (const auto& binding : current) {
            Resolved r = resolve(g, pattern, binding);
            if (r.unsatisfiable) continue;

            std::span<const std::uint32_t> candidates;
            if (r.subject) {
                candidates = g.by_subject(*r.subject);
            } else if (r.object && std::holds_alternative<NodeId>(*r.object)) {
                candidates = g.by_object(std::get<NodeId>(*r.object));
            } else if (r.object && r.relation) {
                candidates = g.by_relation_literal(*r.relation, std::get<LiteralId>(*r.object));
            } else if (r.object) {
                candidates = g.by_object(std::get<LiteralId>(*r.object));
            } else {
                if (all.size() != g.triple_count()) {
                    all.resize(g.triple_count());
                    std::iota(all.begin(), all.end(), 0u);
                }
                candidates = all;
            }

            for (auto idx : candidates) {
                const Triple& t = g.triple(idx);
                if (r.subject && t.subject != *r.subject) continue;
                if (r.relation && t.relation != *r.relation) continue;
                if (r.object && t.object != *r.object) continue;

                Binding extended = binding;
                bool ok = true;
                if (auto* v = std::get_if<Var>(&pattern.subject); v && !r.subject) {
                    ok = bind_var(extended, v->name, t.subject);
                }
                if (auto* v = std::get_if<Var>(&pattern.relation); ok && v && !r.relation) {
                    ok = bind_var(extended, v->name, t.relation);
                }
                if (auto* v = std::get_if<Var>(&pattern.object); ok && v && !r.object) {
                    ok = bind_var(extended, v->name, to_value(t.object));
                }
                if (ok) next.push_back(std::move(extended));
            }
        }
        current = std::move(next);
        if (current.empty()) break;
    }
    return {current.begin(), current.end()};
}

}  // namespace rddl::kg
