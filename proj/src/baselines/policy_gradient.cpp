#include "adaptix/baselines/policy_gradient.hpp"

#include <algorithm>
#include <cmath>

#include "adaptix/errors.hpp"

namespace adaptix {

std::vector<double> softmax(std::span<const double> logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

std::vector<double> returns_to_go(std::span<const TrajectoryStep> trajectory, double gamma) {
    std::vector<double> g(trajectory.size());
    double running = 0.0;
    for (std::size_t t = trajectory.size(); t-- > 0;) {
        running = trajectory[t].reward + gamma * running;
        g[t] = running;
    }
    return g;
}

namespace {

Eigen::MatrixXd stack_states(const PolicyNet& policy, std::span<const TrajectoryStep> trajectory) {
    const int dim = policy.net.input_dim();
    Eigen::MatrixXd states(dim, static_cast<Eigen::Index>(trajectory.size()));
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        if (static_cast<int>(trajectory[t].state.size()) != dim)
            throw InvalidArgument("reinforce: state length mismatch");
        states.col(static_cast<Eigen::Index>(t)) = Eigen::Map<const Eigen::VectorXd>(trajectory[t].state.data(), dim);
    }
    return states;
}

}  // namespace

double reinforce_loss(const PolicyNet& policy, std::span<const TrajectoryStep> trajectory, double gamma) {
    if (trajectory.empty()) throw InvalidArgument("reinforce: empty trajectory");
    const auto g = returns_to_go(trajectory, gamma);
    const Eigen::MatrixXd logits = policy.net.forward_batch(stack_states(policy, trajectory));
    double loss = 0.0;
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        const auto col = logits.col(static_cast<Eigen::Index>(t));
        const auto p = softmax(std::span<const double>(col.data(), col.size()));
        double entropy = 0.0;
        for (double pi : p) entropy -= pi * std::log(pi);
        loss += -(g[t] - policy.baseline) * std::log(p[trajectory[t].action]) - policy.entropy_weight * entropy;
    }
    return loss;
}

double reinforce_gradient(const PolicyNet& policy, std::span<const TrajectoryStep> trajectory, double gamma,
                          std::vector<double>& grads) {
    if (trajectory.empty()) throw InvalidArgument("reinforce: empty trajectory");
    const auto g = returns_to_go(trajectory, gamma);
    Mlp::Trace trace;
    const Eigen::MatrixXd logits = policy.net.forward_batch(stack_states(policy, trajectory), trace);
    Eigen::MatrixXd dlogits(logits.rows(), logits.cols());
    double loss = 0.0;
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        const auto col_idx = static_cast<Eigen::Index>(t);
        const auto col = logits.col(col_idx);
        const auto p = softmax(std::span<const double>(col.data(), col.size()));
        double entropy = 0.0;
        for (double pi : p) entropy -= pi * std::log(pi);
        const double adv = g[t] - policy.baseline;
        const int a = trajectory[t].action;
        if (a < 0 || a >= static_cast<int>(p.size())) throw InvalidArgument("reinforce: action out of range");
        loss += -adv * std::log(p[a]) - policy.entropy_weight * entropy;
        // d(-adv log p_a)/dz_k = adv (p_k - [k==a]);  d(-w H)/dz_k = w p_k (log p_k + H)
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double indicator = static_cast<int>(k) == a ? 1.0 : 0.0;
            dlogits(static_cast<Eigen::Index>(k), col_idx) =
                adv * (p[k] - indicator) + policy.entropy_weight * p[k] * (std::log(p[k]) + entropy);
        }
    }
    grads.assign(policy.net.parameters().size(), 0.0);
    policy.net.backward(trace, dlogits, grads);
    return loss;
}

double reinforce_update(PolicyNet& policy, std::span<const TrajectoryStep> trajectory, double gamma,
                        Optimizer& opt) {
    std::vector<double> grads;
    const double loss = reinforce_gradient(policy, trajectory, gamma, grads);
    opt.step(policy.net.parameters(), grads);
    const double episode_return = returns_to_go(trajectory, gamma).front();
    policy.baseline = policy.baseline_decay * policy.baseline + (1.0 - policy.baseline_decay) * episode_return;
    return loss;
}

}  // namespace adaptix
