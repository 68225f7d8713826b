#pragma once

#include <span>
#include <vector>

#include "adaptix/nn.hpp"
#include "adaptix/optimizer.hpp"

namespace adaptix {

std::vector<double> softmax(std::span<const double> logits);

// Softmax policy over an Mlp's outputs with an EMA return baseline.
struct PolicyNet {
    Mlp net;
    double baseline = 0.0;
    double baseline_decay = 0.99;
    double entropy_weight = 0.01;

    std::vector<double> probabilities(std::span<const double> x) const { return softmax(net.forward(x)); }
};

struct TrajectoryStep {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
};

// Returns-to-go G_t = sum_{u>=t} gamma^{u-t} r_u.
std::vector<double> returns_to_go(std::span<const TrajectoryStep> trajectory, double gamma);

// -sum_t (G_t - baseline) log pi(a_t|s_t) - entropy_weight * sum_t H(pi(.|s_t)),
// evaluated with the policy's current baseline.
double reinforce_loss(const PolicyNet& policy, std::span<const TrajectoryStep> trajectory, double gamma);

// Gradient of reinforce_loss w.r.t. the network parameters; returns the loss.
double reinforce_gradient(const PolicyNet& policy, std::span<const TrajectoryStep> trajectory, double gamma,
                          std::vector<double>& grads);

// One REINFORCE step: gradient, optimizer update, then baseline EMA update
// with the episode return G_0. Returns the pre-update loss.
double reinforce_update(PolicyNet& policy, std::span<const TrajectoryStep> trajectory, double gamma,
                        Optimizer& opt);

}  // namespace adaptix
