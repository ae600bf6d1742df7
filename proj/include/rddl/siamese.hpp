#pragma once
// Multi-path Siamese scorer: shared token embedding and stacked BiLSTM
// encoder per path, masked global max pooling, dense tanh fusion, and a
// sigmoid over the cosine between the path vector and a relation embedding.
// Gradients are analytic; all arithmetic is 64-bit.

#include "rddl/paths.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rddl::nn {

struct ModelConfig {
    std::size_t vocab_size = 0;
    std::size_t relation_count = 0;
    std::size_t num_paths = 3;
    std::size_t embed_dim = 32;
    std::size_t hidden_dim = 32;  // per direction
    std::size_t layers = 2;
    std::size_t fusion_dim = 64;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t epochs = 3;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const ModelConfig&) const = default;
};

struct Tensor {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t size() const { return rows * cols; }
};

class Model;

// Per-sample activations kept for the backward pass.
struct ForwardCache {
    struct Direction {
        std::vector<double> gates;  // T x 4H, post-activation (i, f, g, o)
        std::vector<double> c;      // T x H
        std::vector<double> h;      // T x H
    };
    struct Layer {
        std::vector<double> input;  // T x in_dim
        Direction dir[2];
    };
    struct PathCache {
        std::size_t length = 0;  // tokens before the first PAD
        std::vector<paths::Token> tokens;
        std::vector<Layer> layers;
        std::vector<std::size_t> argmax;  // 2H time indexes into the last layer
        std::vector<double> pooled;       // 2H
    };
    std::vector<PathCache> paths;
    std::uint32_t relation = 0;
    std::vector<double> fused;  // d_f, after tanh
    double cosine = 0.0;
    double probability = 0.5;
    double p_norm = 0.0;
    double r_norm = 0.0;
};

class Model {
public:
    explicit Model(ModelConfig config);

    const ModelConfig& config() const { return config_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<Tensor>& tensors() const { return tensors_; }
    const Tensor& tensor(std::string_view name) const;

    // Tensors applied to path `k`; the same list for every k.
    std::vector<const Tensor*> encoder_tensors(std::size_t k) const;

    // Random initialization from config().seed.
    void initialize();

    double forward(const paths::PathSample& sample, ForwardCache& cache) const;
    double score(const paths::PathSample& sample) const;
    // Adds d(BCE)/d(params) for `label` into `grad` (same size as params()).
    void backward(const ForwardCache& cache, int label, std::vector<double>& grad) const;

    static double loss(double probability, int label);

private:
    void add_tensor(const std::string& name, std::size_t rows, std::size_t cols);
    std::size_t lstm_index(std::size_t layer, std::size_t dir) const { return 2 + 3 * (2 * layer + dir); }
    void encode(const paths::Path& path, ForwardCache::PathCache& pc) const;

    ModelConfig config_;
    std::vector<double> params_;
    std::vector<Tensor> tensors_;
};

class TrainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainResult {
    std::vector<double> epoch_loss;
    std::size_t steps = 0;
};

// Mini-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) on mean batch BCE.
// `on_step` (optional) receives (step index, batch mean loss).
TrainResult train(Model& model, const std::vector<paths::PathSample>& samples,
                  const std::function<void(std::size_t, double)>& on_step = {});

std::vector<double> predict(const Model& model, const std::vector<paths::PathSample>& samples);

// Text header (magic, config) followed by little-endian float64 tensors.
void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace rddl::nn
