#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace adaptix {

enum class OptimizerKind : std::uint8_t { sgd, momentum, adagrad, adam };

// Display names: "SGD", "Momentum", "AdaGrad", "Adam".
std::string_view to_string(OptimizerKind k);
// Case-insensitive.
std::optional<OptimizerKind> parse_optimizer(std::string_view s);

struct OptimizerParams {
    double learning_rate = 0.001;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First-order update rules over a flat parameter buffer.
//   SGD:      p -= lr * g
//   Momentum: v = mu * v + g;            p -= lr * v
//   AdaGrad:  G += g^2;                  p -= lr * g / (sqrt(G) + eps)
//   Adam:     bias-corrected moments;    p -= lr * m_hat / (sqrt(v_hat) + eps)
class Optimizer {
public:
    Optimizer() = default;
    Optimizer(OptimizerKind kind, OptimizerParams params) : kind_(kind), params_(params) {}

    // Accumulators are sized on the first call; later calls must match.
    void step(std::span<double> params, std::span<const double> grads);

    OptimizerKind kind() const { return kind_; }
    const OptimizerParams& params() const { return params_; }
    std::uint64_t steps() const { return t_; }
    void set_steps(std::uint64_t t) { t_ = t; }
    void restore(std::vector<double> m, std::vector<double> v) {
        m_ = std::move(m);
        v_ = std::move(v);
    }

    const std::vector<double>& first_moment() const { return m_; }
    const std::vector<double>& second_moment() const { return v_; }

private:
    OptimizerKind kind_ = OptimizerKind::adam;
    OptimizerParams params_;
    std::uint64_t t_ = 0;
    std::vector<double> m_;  // momentum buffer / Adam first moment
    std::vector<double> v_;  // AdaGrad accumulator / Adam second moment
};

}  // namespace adaptix
