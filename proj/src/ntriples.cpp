#include "rddl/kgstore.hpp"

#include <algorithm>

namespace rddl::kg {

ParseError::ParseError(std::size_t line, const std::string& what)
    : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string relation_iri(std::string_view name) {
    if (name == kRdfType) return std::string(kRdfTypeIri);
    if (name.find("://") != std::string_view::npos) return std::string(name);
    return std::string(kVocabularyNs) + std::string(name);
}

std::string relation_name_from_iri(std::string_view iri) {
    if (iri == kRdfTypeIri) return std::string(kRdfType);
    if (iri.starts_with(kVocabularyNs)) return std::string(iri.substr(kVocabularyNs.size()));
    return std::string(iri);
}

namespace {

void escape_into(std::string& out, std::string_view text) {
    for (char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
}

std::string format_literal(const Literal& lit) {
    std::string out = "\"";
    escape_into(out, lit.lexical);
    out.push_back('"');
    if (lit.kind != LiteralKind::string) {
        out += "^^<";
        out += kXsdNs;
        out += to_string(lit.kind);
        out.push_back('>');
    }
    return out;
}

class LineParser {
public:
    LineParser(std::string_view line, std::size_t number) : s_(line), line_(number) {}

    std::string iri() {
        skip_ws();
        expect('<');
        auto end = s_.find('>', pos_);
        if (end == std::string_view::npos) fail("unterminated IRI");
        std::string out(s_.substr(pos_, end - pos_));
        if (out.empty() || out.find_first_of(" \t<\"") != std::string::npos) fail("invalid IRI");
        pos_ = end + 1;
        return out;
    }

    bool at(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    Literal literal() {
        skip_ws();
        expect('"');
        std::string lex;
        while (true) {
            if (pos_ >= s_.size()) fail("unterminated literal");
            char c = s_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                lex.push_back(c);
                continue;
            }
            if (pos_ >= s_.size()) fail("dangling escape");
            switch (s_[pos_++]) {
                case '\\': lex.push_back('\\'); break;
                case '"': lex.push_back('"'); break;
                case 'n': lex.push_back('\n'); break;
                case 'r': lex.push_back('\r'); break;
                case 't': lex.push_back('\t'); break;
                default: fail("unsupported escape");
            }
        }
        LiteralKind kind = LiteralKind::string;
        if (s_.substr(pos_).starts_with("^^")) {
            pos_ += 2;
            std::string dt = iri();
            if (!std::string_view(dt).starts_with(kXsdNs)) fail("unsupported datatype " + dt);
            std::string_view local = std::string_view(dt).substr(kXsdNs.size());
            if (local == "integer") kind = LiteralKind::integer;
            else if (local == "decimal") kind = LiteralKind::decimal;
            else if (local == "boolean") kind = LiteralKind::boolean;
            else if (local == "string") kind = LiteralKind::string;
            else fail("unsupported datatype " + dt);
        } else if (pos_ < s_.size() && s_[pos_] == '@') {
            while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
        }
        try {
            return Literal::parse(kind, lex);
        } catch (const GraphError& e) {
            fail(e.what());
        }
    }

    void finish() {
        skip_ws();
        expect('.');
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters after '.'");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

private:
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    void expect(char c) {
        if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' at end of line");
        if (s_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

}  // namespace

std::string serialize_ntriples(const KnowledgeGraph& graph) {
    std::vector<std::string> lines;
    lines.reserve(graph.triple_count());
    for (const auto& t : graph.triples()) {
        std::string line = "<" + graph.iri(t.subject) + "> <" + relation_iri(graph.relation_name(t.relation)) + "> ";
        if (auto* node = std::get_if<NodeId>(&t.object)) {
            line += "<" + graph.iri(*node) + ">";
        } else {
            line += format_literal(graph.literal(std::get<LiteralId>(t.object)));
        }
        line += " .";
        lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out.push_back('\n');
    }
    return out;
}

KnowledgeGraph parse_ntriples(std::string_view text, std::span<const std::string> relation_seed) {
    KnowledgeGraph graph(relation_seed);
    std::size_t number = 0;
    while (!text.empty()) {
        ++number;
        auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos || line[first] == '#') continue;

        LineParser p(line, number);
        NodeId subject = graph.add_node(p.iri());
        RelationId relation = graph.add_relation(relation_name_from_iri(p.iri()));
        if (p.at('<')) {
            NodeId object = graph.add_node(p.iri());
            p.finish();
            graph.add_triple(subject, relation, object);
        } else if (p.at('"')) {
            Literal object = p.literal();
            p.finish();
            graph.add_triple(subject, relation, object);
        } else {
            p.fail("expected IRI or literal object");
        }
    }
    return graph;
}

}  // namespace rddl::kg
