#include "rddl/siamese.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rddl::nn {

void ModelConfig::validate() const {
    if (vocab_size < 2) throw std::invalid_argument("vocab_size must cover PAD and NOPATH");
    if (relation_count < 1) throw std::invalid_argument("relation_count must be positive");
    if (num_paths < 1 || embed_dim < 1 || hidden_dim < 1 || layers < 1 || fusion_dim < 1) {
        throw std::invalid_argument("model dimensions must be positive");
    }
    if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
    if (epochs < 1) throw std::invalid_argument("epochs must be positive");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be non-negative");
}

Model::Model(ModelConfig config) : config_(std::move(config)) {
    config_.validate();
    const auto H = config_.hidden_dim;
    add_tensor("embedding", config_.vocab_size, config_.embed_dim);
    add_tensor("relation", config_.relation_count, config_.fusion_dim);
    for (std::size_t l = 0; l < config_.layers; ++l) {
        const std::size_t in = l == 0 ? config_.embed_dim : 2 * H;
        for (const char* dir : {"fwd", "bwd"}) {
            const std::string p = "lstm" + std::to_string(l) + "." + dir + ".";
            add_tensor(p + "W", 4 * H, in);
            add_tensor(p + "U", 4 * H, H);
            add_tensor(p + "b", 4 * H, 1);
        }
    }
    add_tensor("fusion.W", config_.fusion_dim, config_.num_paths * 2 * H);
    add_tensor("fusion.b", config_.fusion_dim, 1);
    params_.assign(tensors_.back().offset + tensors_.back().size(), 0.0);
}

void Model::add_tensor(const std::string& name, std::size_t rows, std::size_t cols) {
    const std::size_t offset = tensors_.empty() ? 0 : tensors_.back().offset + tensors_.back().size();
    tensors_.push_back({name, offset, rows, cols});
}

const Tensor& Model::tensor(std::string_view name) const {
    for (const auto& t : tensors_) {
        if (t.name == name) return t;
    }
    throw std::invalid_argument("no tensor '" + std::string(name) + "'");
}

std::vector<const Tensor*> Model::encoder_tensors(std::size_t k) const {
    if (k >= config_.num_paths) throw std::out_of_range("path index");
    std::vector<const Tensor*> out{&tensors_[0]};
    for (std::size_t l = 0; l < config_.layers; ++l) {
        for (std::size_t d = 0; d < 2; ++d) {
            for (std::size_t j = 0; j < 3; ++j) out.push_back(&tensors_[lstm_index(l, d) + j]);
        }
    }
    return out;
}

void Model::initialize() {
    std::mt19937_64 rng(config_.seed);
    std::normal_distribution<double> normal(0.0, 0.1);
    const double bound = 1.0 / std::sqrt(static_cast<double>(config_.hidden_dim));
    std::uniform_real_distribution<double> uni(-bound, bound);
    const auto H = config_.hidden_dim;
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
        const auto& t = tensors_[i];
        double* p = params_.data() + t.offset;
        const bool embedding = i < 2;
        const bool bias = t.cols == 1;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (embedding) p[k] = normal(rng);
            else if (bias) p[k] = 0.0;
            else p[k] = uni(rng);
        }
        // Forget-gate block of every LSTM bias.
        if (bias && t.name.starts_with("lstm")) {
            for (std::size_t k = H; k < 2 * H; ++k) p[k] = 1.0;
        }
    }
}

namespace {

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// y += A x, A is rows x cols row-major.
void matvec_add(const double* A, const double* x, double* y, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* a = A + r * cols;
        double s = 0.0;
        for (std::size_t c = 0; c < cols; ++c) s += a[c] * x[c];
        y[r] += s;
    }
}

// y += A^T x
void matvec_t_add(const double* A, const double* x, double* y, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        const double* a = A + r * cols;
        for (std::size_t c = 0; c < cols; ++c) y[c] += a[c] * xr;
    }
}

// G += u v^T
void outer_add(double* G, const double* u, const double* v, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double ur = u[r];
        if (ur == 0.0) continue;
        double* g = G + r * cols;
        for (std::size_t c = 0; c < cols; ++c) g[c] += ur * v[c];
    }
}

}  // namespace

void Model::encode(const paths::Path& path, ForwardCache::PathCache& pc) const {
    const auto H = config_.hidden_dim;
    const auto E = config_.embed_dim;
    std::size_t T = 0;
    while (T < path.size() && path[T] != paths::kPad) ++T;
    pc.length = T;
    pc.tokens.assign(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(T));
    for (auto tok : pc.tokens) {
        if (tok < 0 || static_cast<std::size_t>(tok) >= config_.vocab_size) {
            throw std::out_of_range("token id " + std::to_string(tok) + " out of range");
        }
    }
    pc.layers.resize(config_.layers);
    pc.pooled.assign(2 * H, 0.0);
    pc.argmax.assign(2 * H, 0);
    if (T == 0) return;

    const double* emb = params_.data() + tensors_[0].offset;
    std::vector<double> a(4 * H);
    for (std::size_t l = 0; l < config_.layers; ++l) {
        auto& layer = pc.layers[l];
        const std::size_t in = l == 0 ? E : 2 * H;
        if (l == 0) {
            layer.input.resize(T * E);
            for (std::size_t t = 0; t < T; ++t) {
                std::copy_n(emb + static_cast<std::size_t>(pc.tokens[t]) * E, E, layer.input.data() + t * E);
            }
        } else {
            const auto& below = pc.layers[l - 1];
            layer.input.resize(T * 2 * H);
            for (std::size_t t = 0; t < T; ++t) {
                std::copy_n(below.dir[0].h.data() + t * H, H, layer.input.data() + t * 2 * H);
                std::copy_n(below.dir[1].h.data() + t * H, H, layer.input.data() + t * 2 * H + H);
            }
        }
        for (std::size_t d = 0; d < 2; ++d) {
            const double* W = params_.data() + tensors_[lstm_index(l, d)].offset;
            const double* U = params_.data() + tensors_[lstm_index(l, d) + 1].offset;
            const double* b = params_.data() + tensors_[lstm_index(l, d) + 2].offset;
            auto& dc = layer.dir[d];
            dc.gates.assign(T * 4 * H, 0.0);
            dc.c.assign(T * H, 0.0);
            dc.h.assign(T * H, 0.0);
            const double* h_prev = nullptr;
            const double* c_prev = nullptr;
            for (std::size_t s = 0; s < T; ++s) {
                const std::size_t t = d == 0 ? s : T - 1 - s;
                std::copy_n(b, 4 * H, a.data());
                matvec_add(W, layer.input.data() + t * in, a.data(), 4 * H, in);
                if (h_prev) matvec_add(U, h_prev, a.data(), 4 * H, H);
                double* g = dc.gates.data() + t * 4 * H;
                double* c = dc.c.data() + t * H;
                double* h = dc.h.data() + t * H;
                for (std::size_t j = 0; j < H; ++j) {
                    g[j] = sigmoid(a[j]);
                    g[H + j] = sigmoid(a[H + j]);
                    g[2 * H + j] = std::tanh(a[2 * H + j]);
                    g[3 * H + j] = sigmoid(a[3 * H + j]);
                    c[j] = g[H + j] * (c_prev ? c_prev[j] : 0.0) + g[j] * g[2 * H + j];
                    h[j] = g[3 * H + j] * std::tanh(c[j]);
                }
                h_prev = h;
                c_prev = c;
            }
        }
    }

    const auto& top = pc.layers.back();
    for (std::size_t j = 0; j < 2 * H; ++j) {
        const auto& hs = top.dir[j < H ? 0 : 1].h;
        const std::size_t jj = j % H;
        std::size_t best = 0;
        for (std::size_t t = 1; t < T; ++t) {
            if (hs[t * H + jj] > hs[best * H + jj]) best = t;
        }
        pc.argmax[j] = best;
        pc.pooled[j] = hs[best * H + jj];
    }
}

double Model::forward(const paths::PathSample& sample, ForwardCache& cache) const {
    if (sample.paths.size() != config_.num_paths) throw std::invalid_argument("sample has wrong path count");
    if (sample.relation >= config_.relation_count) throw std::out_of_range("relation id out of range");
    const auto H = config_.hidden_dim;
    const auto F = config_.fusion_dim;
    cache.paths.resize(config_.num_paths);
    std::vector<double> z;
    z.reserve(config_.num_paths * 2 * H);
    for (std::size_t k = 0; k < config_.num_paths; ++k) {
        encode(sample.paths[k], cache.paths[k]);
        z.insert(z.end(), cache.paths[k].pooled.begin(), cache.paths[k].pooled.end());
    }
    const auto& fw = tensors_[tensors_.size() - 2];
    const auto& fb = tensors_.back();
    cache.fused.assign(params_.begin() + static_cast<std::ptrdiff_t>(fb.offset),
                       params_.begin() + static_cast<std::ptrdiff_t>(fb.offset + F));
    matvec_add(params_.data() + fw.offset, z.data(), cache.fused.data(), F, z.size());
    for (auto& v : cache.fused) v = std::tanh(v);

    cache.relation = sample.relation;
    const double* r = params_.data() + tensors_[1].offset + sample.relation * F;
    double pp = 0, rr = 0, pr = 0;
    for (std::size_t j = 0; j < F; ++j) {
        pp += cache.fused[j] * cache.fused[j];
        rr += r[j] * r[j];
        pr += cache.fused[j] * r[j];
    }
    cache.p_norm = std::sqrt(pp);
    cache.r_norm = std::sqrt(rr);
    cache.cosine = (cache.p_norm == 0.0 || cache.r_norm == 0.0) ? 0.0 : pr / (cache.p_norm * cache.r_norm);
    cache.probability = sigmoid(cache.cosine);
    return cache.probability;
}

double Model::score(const paths::PathSample& sample) const {
    ForwardCache cache;
    return forward(sample, cache);
}

double Model::loss(double probability, int label) {
    const double p = std::clamp(probability, 1e-12, 1.0 - 1e-12);
    return label ? -std::log(p) : -std::log(1.0 - p);
}

void Model::backward(const ForwardCache& cache, int label, std::vector<double>& grad) const {
    if (grad.size() != params_.size()) throw std::invalid_argument("gradient buffer size mismatch");
    if (cache.p_norm == 0.0 || cache.r_norm == 0.0) return;
    const auto H = config_.hidden_dim;
    const auto F = config_.fusion_dim;
    const auto E = config_.embed_dim;
    const double dcos = cache.probability - static_cast<double>(label);

    const double* r = params_.data() + tensors_[1].offset + cache.relation * F;
    double* gr = grad.data() + tensors_[1].offset + cache.relation * F;
    std::vector<double> du(F);
    for (std::size_t j = 0; j < F; ++j) {
        const double ph = cache.fused[j] / cache.p_norm;
        const double rh = r[j] / cache.r_norm;
        const double dp = dcos * (rh - cache.cosine * ph) / cache.p_norm;
        gr[j] += dcos * (ph - cache.cosine * rh) / cache.r_norm;
        du[j] = dp * (1.0 - cache.fused[j] * cache.fused[j]);
    }

    const auto& fw = tensors_[tensors_.size() - 2];
    const auto& fb = tensors_.back();
    std::vector<double> z;
    for (const auto& pc : cache.paths) z.insert(z.end(), pc.pooled.begin(), pc.pooled.end());
    outer_add(grad.data() + fw.offset, du.data(), z.data(), F, z.size());
    for (std::size_t j = 0; j < F; ++j) grad[fb.offset + j] += du[j];
    std::vector<double> dz(z.size(), 0.0);
    matvec_t_add(params_.data() + fw.offset, du.data(), dz.data(), F, z.size());

    std::vector<double> da(4 * H), dh_next(H), dc_next(H);
    for (std::size_t k = 0; k < cache.paths.size(); ++k) {
        const auto& pc = cache.paths[k];
        const std::size_t T = pc.length;
        if (T == 0) continue;
        // Gradient w.r.t. the top layer's output, T x 2H.
        std::vector<double> dy(T * 2 * H, 0.0);
        for (std::size_t j = 0; j < 2 * H; ++j) dy[pc.argmax[j] * 2 * H + j] += dz[k * 2 * H + j];

        for (std::size_t l = config_.layers; l-- > 0;) {
            const auto& layer = pc.layers[l];
            const std::size_t in = l == 0 ? E : 2 * H;
            std::vector<double> dx(T * in, 0.0);
            for (std::size_t d = 0; d < 2; ++d) {
                const auto base = lstm_index(l, d);
                const double* W = params_.data() + tensors_[base].offset;
                const double* U = params_.data() + tensors_[base + 1].offset;
                double* gW = grad.data() + tensors_[base].offset;
                double* gU = grad.data() + tensors_[base + 1].offset;
                double* gb = grad.data() + tensors_[base + 2].offset;
                const auto& dc = layer.dir[d];
                std::fill(dh_next.begin(), dh_next.end(), 0.0);
                std::fill(dc_next.begin(), dc_next.end(), 0.0);
                // Reverse of the processing order.
                for (std::size_t s = T; s-- > 0;) {
                    const std::size_t t = d == 0 ? s : T - 1 - s;
                    const bool has_prev = s > 0;
                    const std::size_t tp = d == 0 ? t - 1 : t + 1;
                    const double* g = dc.gates.data() + t * 4 * H;
                    const double* c = dc.c.data() + t * H;
                    const double* c_prev = has_prev ? dc.c.data() + tp * H : nullptr;
                    for (std::size_t j = 0; j < H; ++j) {
                        const double dh = dy[t * 2 * H + d * H + j] + dh_next[j];
                        const double tc = std::tanh(c[j]);
                        const double i = g[j], f = g[H + j], gg = g[2 * H + j], o = g[3 * H + j];
                        const double dcell = dh * o * (1.0 - tc * tc) + dc_next[j];
                        da[j] = dcell * gg * i * (1.0 - i);
                        da[H + j] = (c_prev ? dcell * c_prev[j] : 0.0) * f * (1.0 - f);
                        da[2 * H + j] = dcell * i * (1.0 - gg * gg);
                        da[3 * H + j] = dh * tc * o * (1.0 - o);
                        dc_next[j] = dcell * f;
                    }
                    outer_add(gW, da.data(), layer.input.data() + t * in, 4 * H, in);
                    for (std::size_t j = 0; j < 4 * H; ++j) gb[j] += da[j];
                    matvec_t_add(W, da.data(), dx.data() + t * in, 4 * H, in);
                    std::fill(dh_next.begin(), dh_next.end(), 0.0);
                    if (has_prev) {
                        outer_add(gU, da.data(), dc.h.data() + tp * H, 4 * H, H);
                        matvec_t_add(U, da.data(), dh_next.data(), 4 * H, H);
                    }
                }
            }
            if (l == 0) {
                double* ge = grad.data() + tensors_[0].offset;
                for (std::size_t t = 0; t < T; ++t) {
                    double* row = ge + static_cast<std::size_t>(pc.tokens[t]) * E;
                    for (std::size_t j = 0; j < E; ++j) row[j] += dx[t * E + j];
                }
            } else {
                dy = std::move(dx);
            }
        }
    }
}

}  // namespace rddl::nn
