#include "rddl/siamese.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rddl::nn {

TrainResult train(Model& model, const std::vector<paths::PathSample>& samples,
                  const std::function<void(std::size_t, double)>& on_step) {
    if (samples.empty()) throw TrainError("training set is empty");
    const auto& cfg = model.config();
    auto& params = model.params();
    const std::size_t n = params.size();
    std::vector<double> m(n, 0.0), v(n, 0.0), grad(n, 0.0);
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed ^ 0x5deece66dULL);

    TrainResult result;
    ForwardCache cache;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                const auto& s = samples[order[i]];
                const double p = model.forward(s, cache);
                batch_loss += Model::loss(p, s.label);
                model.backward(cache, s.label, grad);
            }
            const double count = static_cast<double>(end - start);
            batch_loss /= count;
            if (!std::isfinite(batch_loss)) {
                throw TrainError("non-finite loss in epoch " + std::to_string(epoch) + " batch " +
                                 std::to_string(batch_index));
            }
            ++step;
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t k = 0; k < n; ++k) {
                const double g = grad[k] / count;
                if (!std::isfinite(g)) {
                    throw TrainError("non-finite gradient in epoch " + std::to_string(epoch) + " batch " +
                                     std::to_string(batch_index));
                }
                m[k] = beta1 * m[k] + (1.0 - beta1) * g;
                v[k] = beta2 * v[k] + (1.0 - beta2) * g * g;
                params[k] -= cfg.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps);
            }
            epoch_sum += batch_loss * count;
            if (on_step) on_step(step - 1, batch_loss);
        }
        result.epoch_loss.push_back(epoch_sum / static_cast<double>(samples.size()));
    }
    result.steps = step;
    return result;
}

std::vector<double> predict(const Model& model, const std::vector<paths::PathSample>& samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    ForwardCache cache;
    for (const auto& s : samples) out.push_back(model.forward(s, cache));
    return out;
}

}  // namespace rddl::nn
