#include "adaptix/optimizer.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "adaptix/errors.hpp"

namespace adaptix {

std::string_view to_string(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::sgd: return "SGD";
        case OptimizerKind::momentum: return "Momentum";
        case OptimizerKind::adagrad: return "AdaGrad";
        case OptimizerKind::adam: return "Adam";
    }
    return "Adam";
}

std::optional<OptimizerKind> parse_optimizer(std::string_view s) {
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "sgd") return OptimizerKind::sgd;
    if (lower == "momentum") return OptimizerKind::momentum;
    if (lower == "adagrad") return OptimizerKind::adagrad;
    if (lower == "adam") return OptimizerKind::adam;
    return std::nullopt;
}

void Optimizer::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size())
        throw InvalidArgument("optimizer step: parameter/gradient size mismatch");
    const std::size_t n = params.size();
    const bool needs_m = kind_ == OptimizerKind::momentum || kind_ == OptimizerKind::adam;
    const bool needs_v = kind_ == OptimizerKind::adagrad || kind_ == OptimizerKind::adam;
    if (needs_m) {
        if (m_.empty()) m_.assign(n, 0.0);
        if (m_.size() != n) throw InvalidArgument("optimizer step: accumulator shape mismatch");
    }
    if (needs_v) {
        if (v_.empty()) v_.assign(n, 0.0);
        if (v_.size() != n) throw InvalidArgument("optimizer step: accumulator shape mismatch");
    }
    ++t_;
    const double lr = params_.learning_rate;
    switch (kind_) {
        case OptimizerKind::sgd:
            for (std::size_t i = 0; i < n; ++i) params[i] -= lr * grads[i];
            break;
        case OptimizerKind::momentum:
            for (std::size_t i = 0; i < n; ++i) {
                m_[i] = params_.momentum * m_[i] + grads[i];
                params[i] -= lr * m_[i];
            }
            break;
        case OptimizerKind::adagrad:
            for (std::size_t i = 0; i < n; ++i) {
                v_[i] += grads[i] * grads[i];
                params[i] -= lr * grads[i] / (std::sqrt(v_[i]) + params_.epsilon);
            }
            break;
        case OptimizerKind::adam: {
            const double c1 = 1.0 - std::pow(params_.beta1, static_cast<double>(t_));
            const double c2 = 1.0 - std::pow(params_.beta2, static_cast<double>(t_));
            for (std::size_t i = 0; i < n; ++i) {
                m_[i] = params_.beta1 * m_[i] + (1.0 - params_.beta1) * grads[i];
                v_[i] = params_.beta2 * v_[i] + (1.0 - params_.beta2) * grads[i] * grads[i];
                const double m_hat = m_[i] / c1;
                const double v_hat = v_[i] / c2;
                params[i] -= lr * m_hat / (std::sqrt(v_hat) + params_.epsilon);
            }
            break;
        }
    }
}

}  // namespace adaptix
