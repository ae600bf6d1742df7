#include "rddl/paths.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace rddl::paths {

std::string token_name(const std::vector<std::string>& relation_names, Token token) {
    if (token == kPad) return "PAD";
    if (token == kNoPath) return "NOPATH";
    const auto r = static_cast<std::size_t>((token - 2) / 2);
    if (token < 0 || r >= relation_names.size()) throw std::out_of_range("token " + std::to_string(token));
    return relation_names[r] + ((token - 2) % 2 ? "^-1" : "");
}

std::string_view to_string(NegativeStrategy s) {
    switch (s) {
        case NegativeStrategy::relation: return "relation";
        case NegativeStrategy::node: return "node";
        case NegativeStrategy::mixed: return "mixed";
    }
    return "relation";
}

NegativeStrategy parse_negative_strategy(std::string_view text) {
    for (auto s : {NegativeStrategy::relation, NegativeStrategy::node, NegativeStrategy::mixed}) {
        if (to_string(s) == text) return s;
    }
    throw std::invalid_argument("unknown negative strategy '" + std::string(text) + "'");
}

std::vector<std::string> SamplerConfig::default_excluded() {
    return {std::string(kg::kRdfType), "rowDerivedFrom", "columnDerivedFrom", "valueDerivedFrom", "tableDerivedFrom"};
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix(splitmix(seed) ^ stream));
}

std::size_t below(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

PathSampler::PathSampler(const kg::KnowledgeGraph& g, SamplerConfig cfg) : g_(g), cfg_(std::move(cfg)) {
    if (cfg_.num_paths == 0) throw std::invalid_argument("num_paths must be positive");
    if (cfg_.max_length == 0) throw std::invalid_argument("max_length must be positive");
    std::set<std::uint32_t> excluded;
    for (const auto& name : cfg_.excluded_relations) {
        if (auto r = g.find_relation(name)) excluded.insert(r->value);
    }
    adj_.resize(g.node_count() + g.literal_count());
    for (const auto& t : g.triples()) {
        if (excluded.contains(t.relation.value)) continue;
        const auto s = vertex(t.subject);
        const auto o = vertex(t.object);
        adj_[s].push_back({o, forward_token(t.relation)});
        adj_[o].push_back({s, inverse_token(t.relation)});
    }
}

std::uint32_t PathSampler::vertex(const kg::Term& t) const {
    if (const auto* n = std::get_if<kg::NodeId>(&t)) return n->value;
    return static_cast<std::uint32_t>(g_.node_count()) + std::get<kg::LiteralId>(t).value;
}

bool PathSampler::blocked(std::uint32_t u, const Edge& e, std::uint32_t src, std::uint32_t dst, Token fwd,
                          Token inv) const {
    return (u == src && e.to == dst && e.token == fwd) || (u == dst && e.to == src && e.token == inv);
}

std::vector<Path> PathSampler::sample(kg::NodeId src_node, kg::NodeId dst_node, std::optional<kg::RelationId> target,
                                      std::uint64_t stream) const {
    if (!g_.has_node(src_node) || !g_.has_node(dst_node)) throw kg::GraphError("unknown node");
    const auto src = src_node.value;
    const auto dst = dst_node.value;
    const Token fwd = target ? forward_token(*target) : -1;
    const Token inv = target ? inverse_token(*target) : -1;
    const auto L = static_cast<int>(cfg_.max_length);

    // Hop distance to dst, bounded by L.
    std::vector<int> dist(adj_.size(), L + 1);
    std::deque<std::uint32_t> queue{dst};
    dist[dst] = 0;
    while (!queue.empty()) {
        auto u = queue.front();
        queue.pop_front();
        if (dist[u] >= L) continue;
        for (const auto& e : adj_[u]) {
            if (dist[e.to] <= dist[u] + 1) continue;
            if (target && blocked(u, e, src, dst, fwd, inv)) continue;
            dist[e.to] = dist[u] + 1;
            queue.push_back(e.to);
        }
    }

    std::vector<Path> found;
    if (src != dst && dist[src] <= L) {
        auto rng = stream_rng(cfg_.seed, stream);
        std::bernoulli_distribution restart(cfg_.restart_probability);
        std::set<Path> seen;
        std::vector<std::uint32_t> visited;
        std::vector<const Edge*> options;
        const std::size_t stop_at = cfg_.shortest_first ? std::numeric_limits<std::size_t>::max() : cfg_.num_paths;
        for (std::size_t attempt = 0; attempt < cfg_.walk_budget && found.size() < stop_at; ++attempt) {
            Path path;
            visited.assign(1, src);
            auto u = src;
            bool ok = true;
            while (u != dst) {
                if (!path.empty() && cfg_.restart_probability > 0 && restart(rng)) {
                    ok = false;
                    break;
                }
                const int remaining = L - static_cast<int>(path.size());
                options.clear();
                for (const auto& e : adj_[u]) {
                    if (dist[e.to] > remaining - 1) continue;
                    if (target && blocked(u, e, src, dst, fwd, inv)) continue;
                    if (std::find(visited.begin(), visited.end(), e.to) != visited.end()) continue;
                    options.push_back(&e);
                }
                if (options.empty()) {
                    ok = false;
                    break;
                }
                const Edge* e = options[below(rng, options.size())];
                path.push_back(e->token);
                visited.push_back(e->to);
                u = e->to;
            }
            if (ok && seen.insert(path).second) found.push_back(path);
        }
    }

    if (cfg_.shortest_first) {
        std::stable_sort(found.begin(), found.end(), [](const Path& a, const Path& b) { return a.size() < b.size(); });
        if (found.size() > cfg_.num_paths) found.resize(cfg_.num_paths);
    }

    std::vector<Path> out;
    for (std::size_t i = 0; i < cfg_.num_paths; ++i) {
        Path p = found.empty() ? Path{kNoPath} : found[i % found.size()];
        p.resize(cfg_.max_length, kPad);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Path> sample_paths(const kg::KnowledgeGraph& g, kg::NodeId src, kg::NodeId dst, const SamplerConfig& cfg,
                               std::optional<kg::RelationId> target) {
    return PathSampler(g, cfg).sample(src, dst, target, 0);
}

bool replay(const kg::KnowledgeGraph& g, kg::NodeId src, kg::NodeId dst, const Path& path) {
    if (!g.has_node(src) || !g.has_node(dst)) throw kg::GraphError("unknown node");
    const auto nodes = static_cast<std::uint32_t>(g.node_count());
    auto vertex = [&](const kg::Term& t) -> std::uint32_t {
        if (const auto* n = std::get_if<kg::NodeId>(&t)) return n->value;
        return nodes + std::get<kg::LiteralId>(t).value;
    };
    std::set<std::uint32_t> frontier{src.value};
    for (Token tok : path) {
        if (tok == kPad) break;
        if (tok == kNoPath) return false;
        const kg::RelationId r{static_cast<std::uint32_t>((tok - 2) / 2)};
        const bool forward = (tok - 2) % 2 == 0;
        std::set<std::uint32_t> next;
        for (const auto& t : g.triples()) {
            if (t.relation != r) continue;
            const auto s = t.subject.value;
            const auto o = vertex(t.object);
            if (forward && frontier.contains(s)) next.insert(o);
            if (!forward && frontier.contains(o)) next.insert(s);
        }
        frontier = std::move(next);
        if (frontier.empty()) return false;
    }
    return frontier.contains(dst.value);
}

std::vector<PathSample> build_training_set(const kg::KnowledgeGraph& g, const SamplerConfig& cfg) {
    PathSampler sampler(g, cfg);

    // Relations with node objects, and the objects seen for each.
    std::set<std::uint32_t> relations;
    std::vector<std::vector<kg::NodeId>> objects_of(g.relation_count());
    {
        std::vector<std::unordered_set<std::uint32_t>> seen(g.relation_count());
        for (const auto& t : g.triples()) {
            const auto* o = std::get_if<kg::NodeId>(&t.object);
            if (!o) continue;
            relations.insert(t.relation.value);
            if (seen[t.relation.value].insert(o->value).second) objects_of[t.relation.value].push_back(*o);
        }
    }
    const std::vector<std::uint32_t> relation_list(relations.begin(), relations.end());

    std::vector<PathSample> out;
    for (std::uint32_t i = 0; i < g.triple_count(); ++i) {
        const auto& t = g.triple(i);
        const auto* o = std::get_if<kg::NodeId>(&t.object);
        if (!o) continue;
        const std::uint64_t stream = static_cast<std::uint64_t>(i) << 8;
        auto rng = stream_rng(cfg.seed ^ 0x5bd1e995ULL, stream);
        out.push_back({sampler.sample(t.subject, *o, t.relation, stream), t.relation.value, 1});
        const std::size_t pos = out.size() - 1;
        for (std::size_t k = 0; k < cfg.negatives_per_triple; ++k) {
            bool by_node = cfg.negative_strategy == NegativeStrategy::node ||
                           (cfg.negative_strategy == NegativeStrategy::mixed && (i + k) % 2 == 1);
            if (by_node) {
                const auto& pool = objects_of[t.relation.value];
                std::optional<kg::NodeId> corrupt;
                for (int tries = 0; tries < 32 && !corrupt; ++tries) {
                    auto c = pool[below(rng, pool.size())];
                    if (c != *o && c != t.subject && !g.contains({t.subject, t.relation, c})) corrupt = c;
                }
                if (corrupt) {
                    out.push_back({sampler.sample(t.subject, *corrupt, t.relation, stream + 1 + k), t.relation.value, 0});
                    continue;
                }
            }
            if (relation_list.size() < 2) continue;
            std::uint32_t r = t.relation.value;
            while (r == t.relation.value) r = relation_list[below(rng, relation_list.size())];
            out.push_back({out[pos].paths, r, 0});
        }
    }
    return out;
}

std::vector<kg::NodeId> row_nodes(const kg::KnowledgeGraph& g) {
    std::vector<kg::NodeId> out;
    auto has_row = g.find_relation("hasRow");
    if (!has_row) return out;
    std::set<kg::NodeId> seen;
    for (const auto& t : g.triples()) {
        if (t.relation != *has_row) continue;
        auto o = std::get<kg::NodeId>(t.object);
        if (seen.insert(o).second) out.push_back(o);
    }
    return out;
}

EvalSet build_eval_set(const kg::KnowledgeGraph& test, const std::vector<std::pair<kg::NodeId, kg::NodeId>>& ground_truth,
                       const SamplerConfig& cfg, std::size_t num_negatives) {
    if (ground_truth.empty()) throw std::invalid_argument("ground truth is empty");
    const auto target = test.relation("rowDerivedFrom");
    PathSampler sampler(test, cfg);
    EvalSet out;

    std::set<std::pair<kg::NodeId, kg::NodeId>> linked;
    for (const auto& [dst, src] : ground_truth) {
        linked.emplace(dst, src);
        linked.emplace(src, dst);
    }
    std::uint64_t stream = 1ULL << 40;
    for (const auto& [dst, src] : ground_truth) {
        out.positive_pairs.emplace_back(dst, src);
        out.positives.push_back({sampler.sample(dst, src, target, stream++), target.value, 1});
    }

    const auto rows = row_nodes(test);
    const std::size_t n = rows.size();
    const std::size_t available = n * (n > 0 ? n - 1 : 0) - std::min(n * (n > 0 ? n - 1 : 0), linked.size());
    if (available < num_negatives) {
        throw std::invalid_argument("only " + std::to_string(available) + " unlinked row pairs for " +
                                    std::to_string(num_negatives) + " negatives");
    }
    auto rng = stream_rng(cfg.seed ^ 0x9e3779b9ULL, 2ULL << 40);
    std::set<std::pair<kg::NodeId, kg::NodeId>> chosen;
    stream = 3ULL << 40;
    while (out.negatives.size() < num_negatives) {
        auto a = rows[below(rng, n)];
        auto b = rows[below(rng, n)];
        if (a == b || linked.contains({a, b}) || !chosen.insert({a, b}).second) continue;
        out.negative_pairs.emplace_back(a, b);
        out.negatives.push_back({sampler.sample(a, b, target, stream++), target.value, 0});
    }
    return out;
}

std::string samples_text(const std::vector<PathSample>& samples) {
    std::string out;
    for (const auto& s : samples) {
        out += std::to_string(s.label) + " " + std::to_string(s.relation);
        for (const auto& p : s.paths) {
            for (auto t : p) out += " " + std::to_string(t);
        }
        out += "\n";
    }
    return out;
}

std::vector<PathSample> parse_samples(std::string_view text, std::size_t num_paths, std::size_t max_length) {
    std::vector<PathSample> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int label = 0;
        PathSample s;
        if (!(ls >> label >> s.relation) || (label != 0 && label != 1)) {
            throw std::runtime_error("sample line " + std::to_string(lineno) + ": bad header");
        }
        s.label = static_cast<std::uint8_t>(label);
        s.paths.assign(num_paths, Path(max_length));
        for (auto& p : s.paths) {
            for (auto& t : p) {
                if (!(ls >> t)) throw std::runtime_error("sample line " + std::to_string(lineno) + ": too few tokens");
            }
        }
        Token extra;
        if (ls >> extra) throw std::runtime_error("sample line " + std::to_string(lineno) + ": too many tokens");
        out.push_back(std::move(s));
    }
    return out;
}

std::string vocabulary_text(const std::vector<std::string>& relation_names) {
    std::string out;
    for (std::size_t t = 0; t < vocab_size(relation_names.size()); ++t) {
        out += std::to_string(t) + "\t" + token_name(relation_names, static_cast<Token>(t)) + "\n";
    }
    return out;
}

}  // namespace rddl::paths
