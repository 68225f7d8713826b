#include "adaptix/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "adaptix/errors.hpp"
#include "adaptix/metrics.hpp"

namespace adaptix {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw InvalidArgument("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= items_.size()) throw InvalidArgument("replay index out of range");
    return items_[(head_ + i) % items_.size()];
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
    if (items_.size() < n)
        throw InsufficientData("replay holds " + std::to_string(items_.size()) + " transitions, " +
                               std::to_string(n) + " requested");
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(items_[rng.below(items_.size())]);
    return out;
}

double EpsilonSchedule::at(std::uint64_t step, std::uint64_t total_steps) const {
    const double horizon = fraction * static_cast<double>(total_steps);
    if (horizon <= 0.0 || static_cast<double>(step) >= horizon) return end;
    return start + (end - start) * (static_cast<double>(step) / horizon);
}

void AgentConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0,1]");
    if (!(epsilon.end >= 0.0 && epsilon.end <= epsilon.start && epsilon.start <= 1.0))
        throw InvalidArgument("epsilon schedule needs 0 <= end <= start <= 1");
    if (batch_size <= 0) throw InvalidArgument("batch_size must be positive");
    if (target_sync_every <= 0) throw InvalidArgument("target_sync_every must be positive");
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
}

double bellman_target(double reward, double gamma, std::span<const double> next_q, bool done) {
    if (done) return reward;
    if (next_q.empty()) throw InvalidArgument("bellman_target: empty next_q");
    return reward + gamma * *std::max_element(next_q.begin(), next_q.end());
}

int greedy_action(std::span<const double> q) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(q.size()); ++i)
        if (q[i] > q[best]) best = i;
    return best;
}

namespace {

std::vector<int> with_hidden(int input_dim, const std::vector<int>& hidden, int actions) {
    std::vector<int> dims{input_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(actions);
    return dims;
}

Mlp init_network(int input_dim, int action_count, const AgentConfig& cfg, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x1a7e));
    return Mlp(with_hidden(input_dim, cfg.hidden, action_count), rng);
}

}  // namespace

DqnAgent::DqnAgent(int input_dim, int action_count, AgentConfig cfg, std::uint64_t seed)
    : DqnAgent(init_network(input_dim, action_count, cfg, seed), cfg, seed) {}

DqnAgent::DqnAgent(Mlp online, AgentConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      online_(std::move(online)),
      target_(online_),
      optimizer_(cfg_.optimizer, OptimizerParams{.learning_rate = cfg_.learning_rate}),
      replay_(cfg_.replay_capacity),
      rng_(mix_seed(seed, 0x5eed)),
      grads_(online_.parameters().size(), 0.0) {
    cfg_.validate();
}

ActionId DqnAgent::select_action(std::span<const double> x, double epsilon, Rng& rng) const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must lie in [0,1]");
    const double u = rng.uniform();
    if (u < epsilon) return ActionId{static_cast<int>(rng.below(action_count()))};
    return ActionId{greedy_action(q_values(x))};
}

double DqnAgent::train_step(std::span<const Transition> batch) {
    if (batch.empty()) throw InvalidArgument("train_step: empty batch");
    const int n = static_cast<int>(batch.size());
    const int dim = input_dim();
    Eigen::MatrixXd states(dim, n), next_states(dim, n);
    for (int j = 0; j < n; ++j) {
        const auto& t = batch[j];
        if (static_cast<int>(t.state.size()) != dim || static_cast<int>(t.next_state.size()) != dim)
            throw InvalidArgument("train_step: transition feature length mismatch");
        if (t.action < 0 || t.action >= action_count()) throw InvalidArgument("train_step: action out of range");
        states.col(j) = Eigen::Map<const Eigen::VectorXd>(t.state.data(), dim);
        next_states.col(j) = Eigen::Map<const Eigen::VectorXd>(t.next_state.data(), dim);
    }

    const Eigen::MatrixXd next_q = target_.forward_batch(next_states);
    Mlp::Trace trace;
    const Eigen::MatrixXd q = online_.forward_batch(states, trace);

    Eigen::MatrixXd out_grad = Eigen::MatrixXd::Zero(q.rows(), n);
    double loss = 0.0;
    for (int j = 0; j < n; ++j) {
        const auto& t = batch[j];
        const double y = bellman_target(
            t.reward, cfg_.gamma, std::span<const double>(next_q.col(j).data(), next_q.rows()), t.done);
        const double diff = q(t.action, j) - y;
        loss += diff * diff;
        out_grad(t.action, j) = 2.0 * diff / n;
    }
    loss /= n;

    online_.backward(trace, out_grad, grads_);
    optimizer_.step(online_.parameters(), grads_);
    return loss;
}

std::optional<double> DqnAgent::observe(Transition t) {
    replay_.push(std::move(t));
    ++env_steps_;
    if (replay_.size() < cfg_.min_replay || replay_.size() < static_cast<std::size_t>(cfg_.batch_size))
        return std::nullopt;
    const auto batch = replay_.sample(static_cast<std::size_t>(cfg_.batch_size), rng_);
    const double loss = train_step(batch);
    ++gradient_steps_;
    if (gradient_steps_ % static_cast<std::uint64_t>(cfg_.target_sync_every) == 0) sync_target();
    return loss;
}

nlohmann::json DqnAgent::to_json() const {
    auto layers = nlohmann::json::array();
    for (int l = 0; l < online_.layer_count(); ++l) {
        const auto w = online_.weight(l);
        const auto b = online_.bias(l);
        layers.push_back({{"weights", std::vector<double>(w.data(), w.data() + w.size())},
                          {"biases", std::vector<double>(b.data(), b.data() + b.size())}});
    }
    const auto tp = target_.parameters();
    return {
        {"format", "adaptix-dqn-checkpoint"},
        {"version", 1},
        {"layer_dims", online_.dims()},
        {"layers", std::move(layers)},
        {"target_parameters", std::vector<double>(tp.begin(), tp.end())},
        {"optimizer",
         {{"kind", std::string(to_string(optimizer_.kind()))},
          {"learning_rate", optimizer_.params().learning_rate},
          {"step", optimizer_.steps()},
          {"first_moment", optimizer_.first_moment()},
          {"second_moment", optimizer_.second_moment()}}},
        {"config",
         {{"gamma", cfg_.gamma},
          {"epsilon_start", cfg_.epsilon.start},
          {"epsilon_end", cfg_.epsilon.end},
          {"epsilon_fraction", cfg_.epsilon.fraction},
          {"batch_size", cfg_.batch_size},
          {"min_replay", cfg_.min_replay},
          {"replay_capacity", cfg_.replay_capacity},
          {"target_sync_every", cfg_.target_sync_every}}},
        {"env_steps", env_steps_},
        {"gradient_steps", gradient_steps_},
        {"schedule_length", schedule_length_},
    };
}

DqnAgent DqnAgent::from_json(const nlohmann::json& j, std::uint64_t seed) {
    try {
        if (j.at("format").get<std::string>() != "adaptix-dqn-checkpoint")
            throw ParseError("format", "not a DQN checkpoint");
        if (j.at("version").get<int>() != 1) throw ParseError("version", "unsupported checkpoint version");
        const auto dims = j.at("layer_dims").get<std::vector<int>>();
        if (dims.size() < 2) throw ParseError("layer_dims", "need at least two dims");

        const auto& c = j.at("config");
        AgentConfig cfg;
        cfg.gamma = c.at("gamma").get<double>();
        cfg.epsilon = {c.at("epsilon_start").get<double>(), c.at("epsilon_end").get<double>(),
                       c.at("epsilon_fraction").get<double>()};
        cfg.batch_size = c.at("batch_size").get<int>();
        cfg.min_replay = c.at("min_replay").get<std::size_t>();
        cfg.replay_capacity = c.at("replay_capacity").get<std::size_t>();
        cfg.target_sync_every = c.at("target_sync_every").get<int>();
        cfg.hidden.assign(dims.begin() + 1, dims.end() - 1);
        const auto& o = j.at("optimizer");
        auto kind = parse_optimizer(o.at("kind").get<std::string>());
        if (!kind) throw ParseError("optimizer.kind", "unknown optimizer");
        cfg.optimizer = *kind;
        cfg.learning_rate = o.at("learning_rate").get<double>();

        Mlp net = Mlp::zeros(dims);
        const auto& layers = j.at("layers");
        if (static_cast<int>(layers.size()) != net.layer_count())
            throw ParseError("layers", "layer count does not match layer_dims");
        for (int l = 0; l < net.layer_count(); ++l) {
            const auto w = layers[l].at("weights").get<std::vector<double>>();
            const auto b = layers[l].at("biases").get<std::vector<double>>();
            auto wm = net.weight(l);
            auto bm = net.bias(l);
            if (static_cast<Eigen::Index>(w.size()) != wm.size() || static_cast<Eigen::Index>(b.size()) != bm.size())
                throw ParseError("layers[" + std::to_string(l) + "]", "parameter count mismatch");
            std::copy(w.begin(), w.end(), wm.data());
            std::copy(b.begin(), b.end(), bm.data());
        }

        DqnAgent agent(net, cfg, seed);
        const auto tp = j.at("target_parameters").get<std::vector<double>>();
        if (tp.size() != agent.target_.parameters().size())
            throw ParseError("target_parameters", "parameter count mismatch");
        std::copy(tp.begin(), tp.end(), agent.target_.parameters().begin());

        agent.optimizer_ = Optimizer(cfg.optimizer, OptimizerParams{.learning_rate = cfg.learning_rate});
        agent.optimizer_.set_steps(o.at("step").get<std::uint64_t>());
        agent.optimizer_.restore(o.at("first_moment").get<std::vector<double>>(),
                                 o.at("second_moment").get<std::vector<double>>());
        agent.env_steps_ = j.at("env_steps").get<std::uint64_t>();
        agent.gradient_steps_ = j.at("gradient_steps").get<std::uint64_t>();
        agent.schedule_length_ = j.at("schedule_length").get<std::uint64_t>();
        return agent;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("checkpoint", e.what());
    }
}

void DqnAgent::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out << to_json().dump() << '\n';
    if (!out) throw IoError("failed writing checkpoint " + path.string());
}

DqnAgent DqnAgent::load(const std::filesystem::path& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read checkpoint " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("checkpoint", e.what());
    }
    return from_json(j, seed);
}

TrainResult train(DqnAgent& agent, Environment& env, std::uint64_t total_steps, std::uint64_t seed) {
    if (env.feature_dim() != agent.input_dim() || env.action_count() != agent.action_count())
        throw InvalidArgument("train: environment and agent dimensions differ");
    Rng rng(mix_seed(seed, 0x7ea1));
    agent.set_schedule_length(total_steps);
    TrainResult result;
    const std::uint64_t grad_before = agent.gradient_steps();

    std::vector<double> state = env.reset(rng);
    std::vector<double> rewards;
    for (std::uint64_t step = 0; step < total_steps; ++step) {
        const ActionId a = agent.act(state, rng);
        Environment::Step s = env.step(a.index, rng);
        rewards.push_back(s.reward);
        agent.observe(Transition{state, a.index, s.reward, s.next_state, s.done});
        if (s.done || s.truncated) {
            result.episode_returns.push_back(discounted_return(rewards, agent.config().gamma));
            rewards.clear();
            state = env.reset(rng);
        } else {
            state = std::move(s.next_state);
        }
    }
    result.env_steps = total_steps;
    result.gradient_steps = agent.gradient_steps() - grad_before;
    return result;
}

}  // namespace adaptix
