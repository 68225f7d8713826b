#include "adaptix/nn.hpp"

#include <cmath>
#include <string>

#include "adaptix/errors.hpp"

namespace adaptix {

Mlp::Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw InvalidArgument("Mlp needs at least input and output dims");
    for (int d : dims_)
        if (d <= 0) throw InvalidArgument("Mlp layer dims must be positive");
    std::size_t total = 0;
    for (int l = 0; l + 1 < static_cast<int>(dims_.size()); ++l) {
        offsets_.push_back(total);
        total += static_cast<std::size_t>(dims_[l]) * dims_[l + 1] + dims_[l + 1];
    }
    params_.assign(total, 0.0);
}

Mlp Mlp::zeros(std::vector<int> dims) { return Mlp(std::move(dims)); }

Mlp::Mlp(std::vector<int> dims, Rng& rng) : Mlp(std::move(dims)) {
    for (int l = 0; l < layer_count(); ++l) {
        const double limit = std::sqrt(6.0 / (dims_[l] + dims_[l + 1]));
        auto w = weight(l);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    }
}

Eigen::Map<RowMajorMatrix> Mlp::weight(int layer) {
    return {params_.data() + weight_offset(layer), dims_[layer + 1], dims_[layer]};
}
Eigen::Map<const RowMajorMatrix> Mlp::weight(int layer) const {
    return {params_.data() + weight_offset(layer), dims_[layer + 1], dims_[layer]};
}
Eigen::Map<Eigen::VectorXd> Mlp::bias(int layer) {
    return {params_.data() + bias_offset(layer), dims_[layer + 1]};
}
Eigen::Map<const Eigen::VectorXd> Mlp::bias(int layer) const {
    return {params_.data() + bias_offset(layer), dims_[layer + 1]};
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim())
        throw InvalidArgument("Mlp::forward: expected input of length " + std::to_string(input_dim()) +
                              ", got " + std::to_string(x.size()));
    Eigen::MatrixXd in = Eigen::Map<const Eigen::VectorXd>(x.data(), input_dim());
    Eigen::MatrixXd out = forward_batch(in);
    return {out.data(), out.data() + out.size()};
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs) const {
    Trace unused;
    return forward_batch(inputs, unused);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs, Trace& trace) const {
    if (inputs.rows() != input_dim())
        throw InvalidArgument("Mlp::forward_batch: input has " + std::to_string(inputs.rows()) +
                              " rows, expected " + std::to_string(input_dim()));
    trace.activations.clear();
    trace.activations.reserve(dims_.size());
    trace.activations.push_back(inputs);
    for (int l = 0; l < layer_count(); ++l) {
        Eigen::MatrixXd z = weight(l) * trace.activations.back();
        z.colwise() += bias(l);
        if (l + 1 < layer_count()) z = z.cwiseMax(0.0);
        trace.activations.push_back(std::move(z));
    }
    return trace.activations.back();
}

void Mlp::backward(const Trace& trace, const Eigen::MatrixXd& output_grad, std::span<double> grads) const {
    if (grads.size() != params_.size()) throw InvalidArgument("Mlp::backward: gradient buffer size mismatch");
    if (output_grad.rows() != output_dim() || output_grad.cols() != trace.activations.front().cols())
        throw InvalidArgument("Mlp::backward: output gradient shape mismatch");

    Eigen::MatrixXd delta = output_grad;
    for (int l = layer_count() - 1; l >= 0; --l) {
        const Eigen::MatrixXd& input = trace.activations[l];
        Eigen::Map<RowMajorMatrix> gw(grads.data() + weight_offset(l), dims_[l + 1], dims_[l]);
        Eigen::Map<Eigen::VectorXd> gb(grads.data() + bias_offset(l), dims_[l + 1]);
        gw.noalias() = delta * input.transpose();
        gb = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = weight(l).transpose() * delta;
            // ReLU derivative: the stored activation is positive exactly where z > 0.
            delta = back.cwiseProduct((input.array() > 0.0).cast<double>().matrix());
        }
    }
}

}  // namespace adaptix
