#pragma once
// Edge-type path sampling between node pairs and dataset assembly.
//
// Token vocabulary: 0 = PAD, 1 = NOPATH, 2 + 2r = relation r traversed
// forward, 3 + 2r = relation r traversed against its direction. Literals
// are traversable vertices.

#include "rddl/kgstore.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rddl::paths {

using Token = std::int32_t;
using Path = std::vector<Token>;

inline constexpr Token kPad = 0;
inline constexpr Token kNoPath = 1;

inline Token forward_token(kg::RelationId r) { return static_cast<Token>(2 + 2 * r.value); }
inline Token inverse_token(kg::RelationId r) { return static_cast<Token>(3 + 2 * r.value); }
inline std::size_t vocab_size(std::size_t relation_count) { return 2 + 2 * relation_count; }
std::string token_name(const std::vector<std::string>& relation_names, Token token);

enum class NegativeStrategy { relation, node, mixed };
std::string_view to_string(NegativeStrategy s);
NegativeStrategy parse_negative_strategy(std::string_view text);

struct SamplerConfig {
    std::size_t num_paths = 3;
    std::size_t max_length = 6;
    std::size_t walk_budget = 64;  // walk attempts per pair
    double restart_probability = 0.2;
    // Spend the whole budget and keep the shortest distinct walks.
    bool shortest_first = true;
    std::uint64_t seed = 0;
    std::size_t negatives_per_triple = 1;
    NegativeStrategy negative_strategy = NegativeStrategy::mixed;
    // Relations never traversed by a walk.
    std::vector<std::string> excluded_relations = default_excluded();

    static std::vector<std::string> default_excluded();
};

// Model input unit. Holds token and relation ids only.
struct PathSample {
    std::vector<Path> paths;  // num_paths sequences of exactly max_length tokens
    std::uint32_t relation = 0;
    std::uint8_t label = 0;
    bool operator==(const PathSample&) const = default;
};

class PathSampler {
public:
    PathSampler(const kg::KnowledgeGraph& g, SamplerConfig cfg);

    // `num_paths` padded sequences from src to dst. When `target` is given,
    // the direct (src, target, dst) edge is not traversed. `stream` selects
    // the random stream.
    std::vector<Path> sample(kg::NodeId src, kg::NodeId dst, std::optional<kg::RelationId> target,
                             std::uint64_t stream) const;

    const SamplerConfig& config() const { return cfg_; }
    const kg::KnowledgeGraph& graph() const { return g_; }

private:
    struct Edge {
        std::uint32_t to;
        Token token;
    };
    std::uint32_t vertex(const kg::Term& t) const;
    bool blocked(std::uint32_t u, const Edge& e, std::uint32_t src, std::uint32_t dst, Token fwd, Token inv) const;

    const kg::KnowledgeGraph& g_;
    SamplerConfig cfg_;
    std::vector<std::vector<Edge>> adj_;
};

std::vector<Path> sample_paths(const kg::KnowledgeGraph& g, kg::NodeId src, kg::NodeId dst, const SamplerConfig& cfg,
                               std::optional<kg::RelationId> target = std::nullopt);

// True iff following `path` (PAD-terminated) from src can end at dst.
bool replay(const kg::KnowledgeGraph& g, kg::NodeId src, kg::NodeId dst, const Path& path);

// One positive per node-to-node triple plus negatives_per_triple negatives.
std::vector<PathSample> build_training_set(const kg::KnowledgeGraph& g, const SamplerConfig& cfg);

struct EvalSet {
    std::vector<PathSample> positives;
    std::vector<PathSample> negatives;
    std::vector<std::pair<kg::NodeId, kg::NodeId>> positive_pairs;  // (dst, src)
    std::vector<std::pair<kg::NodeId, kg::NodeId>> negative_pairs;
};

// Row nodes: objects of hasRow.
std::vector<kg::NodeId> row_nodes(const kg::KnowledgeGraph& g);

EvalSet build_eval_set(const kg::KnowledgeGraph& test, const std::vector<std::pair<kg::NodeId, kg::NodeId>>& ground_truth,
                       const SamplerConfig& cfg, std::size_t num_negatives);

// "label relation t0 t1 ..." one sample per line.
std::string samples_text(const std::vector<PathSample>& samples);
std::vector<PathSample> parse_samples(std::string_view text, std::size_t num_paths, std::size_t max_length);
std::string vocabulary_text(const std::vector<std::string>& relation_names);

}  // namespace rddl::paths
