#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "adaptix/rng.hpp"

namespace adaptix {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Fully connected network: ReLU on hidden layers, identity on the output.
// All parameters live in one flat buffer, layer by layer: W (out x in,
// row-major) followed by b (out).
class Mlp {
public:
    Mlp() = default;
    // Glorot-uniform weights, zero biases.
    Mlp(std::vector<int> dims, Rng& rng);
    static Mlp zeros(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    int layer_count() const { return static_cast<int>(dims_.size()) - 1; }

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    Eigen::Map<RowMajorMatrix> weight(int layer);
    Eigen::Map<const RowMajorMatrix> weight(int layer) const;
    Eigen::Map<Eigen::VectorXd> bias(int layer);
    Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

    std::vector<double> forward(std::span<const double> x) const;
    // inputs: input_dim x n, one sample per column.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

    // Activations kept by a training forward pass.
    struct Trace {
        std::vector<Eigen::MatrixXd> activations;  // a_0 = input, ..., a_L = output
    };
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs, Trace& trace) const;

    // Backpropagates dL/d(output) through the traced pass. Gradients are
    // written (not accumulated) into `grads`, laid out like parameters().
    void backward(const Trace& trace, const Eigen::MatrixXd& output_grad, std::span<double> grads) const;

    friend bool operator==(const Mlp& a, const Mlp& b) { return a.dims_ == b.dims_ && a.params_ == b.params_; }

private:
    explicit Mlp(std::vector<int> dims);
    std::size_t weight_offset(int layer) const { return offsets_[layer]; }
    std::size_t bias_offset(int layer) const {
        return offsets_[layer] + static_cast<std::size_t>(dims_[layer]) * dims_[layer + 1];
    }

    std::vector<int> dims_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

}  // namespace adaptix
