#pragma once
// Slow reference implementations shared by the unit and acceptance tests.

#include "rddl/convert.hpp"
#include "rddl/eval.hpp"
#include "rddl/kgstore.hpp"
#include "rddl/siamese.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using namespace rddl;

// Every assignment of variables to registered terms, each checked by plain
// triple membership.
inline std::set<kg::Binding> brute_match(const kg::KnowledgeGraph& g, const std::vector<kg::TriplePattern>& conj) {
    enum Role { node, term, relation };
    std::map<std::string, Role> vars;
    auto note = [&](const std::string& name, Role r) {
        auto it = vars.find(name);
        if (it == vars.end()) vars[name] = r;
        else if (it->second == term && r == node) it->second = node;
        else if (r == relation) it->second = relation;
    };
    for (const auto& p : conj) {
        if (auto* v = std::get_if<kg::Var>(&p.subject)) note(v->name, node);
        if (auto* v = std::get_if<kg::Var>(&p.relation)) note(v->name, relation);
        if (auto* v = std::get_if<kg::Var>(&p.object)) note(v->name, term);
    }
    std::vector<std::string> names;
    std::vector<std::vector<kg::Value>> domains;
    for (const auto& [name, role] : vars) {
        names.push_back(name);
        std::vector<kg::Value> d;
        if (role == relation) {
            for (std::uint32_t i = 0; i < g.relation_count(); ++i) d.push_back(kg::RelationId{i});
        } else {
            for (std::uint32_t i = 0; i < g.node_count(); ++i) d.push_back(kg::NodeId{i});
            if (role == term) {
                for (std::uint32_t i = 0; i < g.literal_count(); ++i) d.push_back(kg::LiteralId{i});
            }
        }
        domains.push_back(std::move(d));
    }

    std::set<kg::Binding> out;
    std::vector<std::size_t> idx(names.size(), 0);
    for (const auto& d : domains) {
        if (d.empty()) return out;
    }
    while (true) {
        kg::Binding b;
        for (std::size_t i = 0; i < names.size(); ++i) b[names[i]] = domains[i][idx[i]];
        bool all = true;
        for (const auto& p : conj) {
            kg::NodeId s = std::holds_alternative<kg::Var>(p.subject) ? std::get<kg::NodeId>(b[std::get<kg::Var>(p.subject).name])
                                                                      : std::get<kg::NodeId>(p.subject);
            kg::RelationId r = std::holds_alternative<kg::Var>(p.relation)
                                   ? std::get<kg::RelationId>(b[std::get<kg::Var>(p.relation).name])
                                   : std::get<kg::RelationId>(p.relation);
            std::optional<kg::Term> o;
            if (auto* v = std::get_if<kg::Var>(&p.object)) {
                const auto& val = b[v->name];
                if (auto* n = std::get_if<kg::NodeId>(&val)) o = *n;
                else if (auto* l = std::get_if<kg::LiteralId>(&val)) o = *l;
            } else if (auto* n = std::get_if<kg::NodeId>(&p.object)) {
                o = *n;
            } else {
                auto lit = g.find_literal(std::get<kg::Literal>(p.object));
                if (lit) o = *lit;
            }
            if (!o || !g.contains({s, r, *o})) {
                all = false;
                break;
            }
        }
        if (all) out.insert(b);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == domains[k].size()) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    return out;
}

// Value join straight over the database tables: every row of t2 holding v2
// in c2 derives from every row of t1 holding v1 in c1. Returns IRI pairs
// (dst row, src row).
inline std::set<std::pair<std::string, std::string>> brute_lineage(const db::Database& d, const conv::ConvertConfig& cfg,
                                                                   const std::vector<scn::LineageTuple>& tuples) {
    auto rows_with = [&](const std::string& table, const std::string& column, const std::string& value) {
        std::vector<std::size_t> out;
        const auto* rel = d.find(table);
        if (!rel) return out;
        std::size_t c = rel->def.columns.size();
        for (std::size_t i = 0; i < rel->def.columns.size(); ++i) {
            if (rel->def.columns[i].name == column) c = i;
        }
        if (c == rel->def.columns.size()) return out;
        for (std::size_t r = 0; r < rel->rows.size(); ++r) {
            if (rel->rows[r][c] && *rel->rows[r][c] == value) out.push_back(r);
        }
        return out;
    };
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& t : tuples) {
        for (auto dr : rows_with(t.t2, t.c2, t.v2)) {
            for (auto sr : rows_with(t.t1, t.c1, t.v1)) out.emplace(conv::row_iri(cfg, t.t2, dr), conv::row_iri(cfg, t.t1, sr));
        }
    }
    return out;
}

// Precision/recall evaluated afresh at every distinct threshold.
inline double brute_pr_auc(const std::vector<eval::Scored>& s) {
    std::set<double, std::greater<>> thresholds;
    std::size_t pos = 0;
    for (const auto& x : s) {
        thresholds.insert(x.score);
        pos += x.label ? 1 : 0;
    }
    double area = 0.0, prev_recall = 0.0;
    for (double t : thresholds) {
        std::size_t tp = 0, predicted = 0;
        for (const auto& x : s) {
            if (x.score >= t) {
                ++predicted;
                tp += x.label ? 1 : 0;
            }
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(pos);
        area += (recall - prev_recall) * (static_cast<double>(tp) / static_cast<double>(predicted));
        prev_recall = recall;
    }
    return area;
}

// Max relative error of analytic against central-difference gradients over
// every parameter coordinate. Denominator floored so that coordinates with
// vanishing gradients compare absolutely. Max pooling is piecewise smooth:
// when p +/- eps selects different time steps than p, the difference
// quotient spans a kink, so the step is halved until it no longer does.
struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t coordinates = 0;
    std::size_t worst = 0;
    std::size_t kink_coordinates = 0;
};

inline std::vector<std::size_t> pooling_pattern(const nn::Model& model, const paths::PathSample& sample, double& loss) {
    nn::ForwardCache c;
    loss = nn::Model::loss(model.forward(sample, c), sample.label);
    std::vector<std::size_t> out;
    for (const auto& p : c.paths) out.insert(out.end(), p.argmax.begin(), p.argmax.end());
    return out;
}

inline GradCheck gradient_check(nn::Model& model, const paths::PathSample& sample, double eps = 1e-4) {
    nn::ForwardCache cache;
    model.forward(sample, cache);
    std::vector<double> grad(model.params().size(), 0.0);
    model.backward(cache, sample.label, grad);
    double unused = 0.0;
    const auto pattern = pooling_pattern(model, sample, unused);
    GradCheck out;
    auto& p = model.params();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        double h = eps, lp = 0.0, lm = 0.0;
        for (int halvings = 0;; ++halvings) {
            p[i] = saved + h;
            const bool same_plus = pooling_pattern(model, sample, lp) == pattern;
            p[i] = saved - h;
            const bool same_minus = pooling_pattern(model, sample, lm) == pattern;
            if ((same_plus && same_minus) || halvings == 30) break;
            if (halvings == 0) ++out.kink_coordinates;
            h /= 2;
        }
        p[i] = saved;
        const double numeric = (lp - lm) / (2 * h);
        const double denom = std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
        const double rel = std::abs(numeric - grad[i]) / denom;
        if (rel > out.max_rel_error) {
            out.max_rel_error = rel;
            out.worst = i;
        }
        ++out.coordinates;
    }
    return out;
}

inline paths::PathSample random_sample(std::mt19937_64& rng, std::size_t vocab, std::size_t relations, std::size_t num_paths,
                                       std::size_t max_length, int label) {
    paths::PathSample s;
    std::uniform_int_distribution<std::size_t> len(1, max_length);
    std::uniform_int_distribution<paths::Token> tok(1, static_cast<paths::Token>(vocab - 1));
    for (std::size_t k = 0; k < num_paths; ++k) {
        paths::Path p(max_length, paths::kPad);
        const auto n = len(rng);
        for (std::size_t t = 0; t < n; ++t) p[t] = tok(rng);
        s.paths.push_back(p);
    }
    s.relation = static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, relations - 1)(rng));
    s.label = static_cast<std::uint8_t>(label);
    return s;
}

}  // namespace oracle
