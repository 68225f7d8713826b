#include <cmath>

#include "adaptix/baselines/bandit.hpp"
#include "adaptix/baselines/bayes_opt.hpp"
#include "adaptix/baselines/collaborative.hpp"
#include "adaptix/baselines/policies.hpp"
#include "adaptix/baselines/policy_gradient.hpp"
#include "adaptix/baselines/tabular_mdp.hpp"
#include "adaptix/errors.hpp"
#include "doctest.h"

using namespace adaptix;

TEST_SUITE("baselines") {

// ------------------------------------------------------------------ UCB1

TEST_CASE("ucb1 selection rules") {
    const auto s = new_default_layout(4, 1);
    ArmStats arms({s, s, s});
    arms.record(0, 1.0);
    arms.record(2, 0.0);
    CHECK(ucb1_select(arms, 3) == 1);

    ArmStats equal({s, s});
    for (int i = 0; i < 5; ++i) {
        equal.record(0, 0.5);
        equal.record(1, 0.5);
    }
    CHECK(ucb1_select(equal, 10) == 0);

    ArmStats dominant({s, s});
    for (int i = 0; i < 100; ++i) {
        dominant.record(0, 0.5);
        dominant.record(1, 0.9);
    }
    CHECK(ucb1_select(dominant, 200) == 1);
    CHECK(best_mean_arm(dominant) == 1);
    CHECK_THROWS_AS(ucb1_select(ArmStats{}, 1), InvalidArgument);
}

// ------------------------------------------------------------------ GP / EI

TEST_CASE("gp interpolates and reverts to the prior") {
    GpSurrogate gp(GpHyper{1.0, 0.5, 1e-12});
    gp.fit({{0.2, 0.4}}, {0.7});
    const std::vector<double> x0{0.2, 0.4};
    CHECK(gp.posterior(x0).mean == doctest::Approx(0.7).epsilon(1e-9));
    const std::vector<double> far{50.0, -50.0};
    const auto post = gp.posterior(far);
    CHECK(std::abs(post.mean) < 1e-12);
    CHECK(post.variance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gp posterior matches a dense inverse") {
    Rng rng(31);
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (int i = 0; i < 5; ++i) {
        xs.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
        ys.push_back(rng.uniform(-1.0, 1.0));
    }
    GpSurrogate gp;
    gp.fit(xs, ys);
    const GpHyper h;
    auto k = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
        return h.signal_sd * h.signal_sd * std::exp(-d / (2 * h.length_scale * h.length_scale));
    };
    Eigen::MatrixXd K(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) K(i, j) = k(xs[i], xs[j]) + (i == j ? h.noise : 0.0);
    const Eigen::MatrixXd Kinv = K.inverse();
    const Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), 5);
    for (int q = 0; q < 10; ++q) {
        const std::vector<double> x{rng.uniform(), rng.uniform(), rng.uniform()};
        Eigen::VectorXd ks(5);
        for (int i = 0; i < 5; ++i) ks(i) = k(xs[i], x);
        const auto post = gp.posterior(x);
        CHECK(std::abs(post.mean - ks.dot(Kinv * y)) < 1e-8);
        CHECK(std::abs(post.variance - (h.signal_sd * h.signal_sd - ks.dot(Kinv * ks))) < 1e-8);
    }
}

TEST_CASE("gp input checks") {
    GpSurrogate gp;
    CHECK_THROWS_AS(gp.fit({}, {}), InvalidArgument);
    CHECK_THROWS_AS(gp.fit({{1.0}, {1.0, 2.0}}, {0.0, 1.0}), InvalidArgument);
    // Duplicated inputs with no noise need jitter but still factor.
    GpSurrogate tight(GpHyper{1.0, 0.5, 0.0});
    CHECK_NOTHROW(tight.fit({{0.1}, {0.1}}, {0.0, 1.0}));
    CHECK(tight.jitter() > 0.0);
}

TEST_CASE("expected improvement") {
    CHECK(expected_improvement(1.0, 0.0, 1.0) == 0.0);
    CHECK(expected_improvement(2.0, 0.25, 1.0) > expected_improvement(1.5, 0.25, 1.0));

    GpSurrogate gp(GpHyper{1.0, 0.5, 1e-10});
    gp.fit({{0.5}}, {1.0});
    // Candidate 0 sits on the observed best (sigma ~ 0); candidate 1 is far.
    CHECK(ei_acquire(gp, {{0.5}, {3.0}}, 1.0) == 1);
    CHECK(expected_improvement(gp.posterior(std::vector<double>{0.5}).mean,
                               gp.posterior(std::vector<double>{0.5}).variance, 1.0) < 1e-4);

    Rng rng(12);
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (int i = 0; i < 8; ++i) {
        xs.push_back({rng.uniform(), rng.uniform()});
        ys.push_back(rng.uniform(-1.0, 1.0));
    }
    GpSurrogate random_gp;
    random_gp.fit(xs, ys);
    std::vector<std::vector<double>> cands;
    for (int i = 0; i < 256; ++i) cands.push_back({rng.uniform(), rng.uniform()});
    const double best = *std::max_element(ys.begin(), ys.end());
    int arg = 0;
    double top = -1.0;
    for (int i = 0; i < 256; ++i) {
        const auto p = random_gp.posterior(cands[i]);
        const double ei = expected_improvement(p.mean, p.variance, best);
        if (ei > top) {
            top = ei;
            arg = i;
        }
    }
    CHECK(ei_acquire(random_gp, cands, best) == arg);
}

TEST_CASE("genotype decoding") {
    const auto canonical = new_default_layout(8, 7);
    std::vector<double> x(24, 0.5);
    for (int i = 0; i < 8; ++i) x[i] = 0.1 * i;
    const auto s = decode_genotype(x, canonical);
    for (int i = 0; i < 8; ++i) CHECK(s.components[i].id == canonical.components[i].id);

    x[8] = 0.99;
    x[9] = 0.0;
    const auto t = decode_genotype(x, canonical);
    CHECK(t.components[0].size == SizeClass::L);
    CHECK(t.components[1].size == SizeClass::S);

    Rng rng(6);
    for (int n = 0; n < 10000; ++n) {
        for (double& v : x) v = rng.uniform();
        if (n % 100 == 0) x[rng.below(24)] = 1.0;  // edge of the unit box
        CHECK_NOTHROW(validate(decode_genotype(x, canonical)));
    }
    CHECK_THROWS_AS(decode_genotype(std::vector<double>(23, 0.0), canonical), InvalidArgument);
}

// ------------------------------------------------------------------ tabular

TEST_CASE("state discretization") {
    auto s = new_default_layout(8, 7);
    for (auto& c : s.components) c.size = SizeClass::S;
    const auto stats = InteractionStats::zero(8, 25);
    const int k = discretize(s, stats);
    CHECK(k / (4 * 8) == 0);
    CHECK(key_space(8) == 128);

    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
        auto t = apply_action(s, ActionId{static_cast<int>(rng.below(49))});
        for (int j = 0; j < 20; ++j) t = apply_action(t, ActionId{static_cast<int>(rng.below(49))});
        const int key = discretize(t, stats);
        CHECK(key >= 0);
        CHECK(key < key_space(8));
        s = t;
    }

    // Recoloring within a bucket and shuffling non-hot S components keep the key.
    auto a = new_default_layout(8, 3);
    for (auto& c : a.components) c.color = 0;
    auto b = a;
    b.components[5].color = 1;  // same bucket (0/2 == 1/2)
    std::swap(b.components[6], b.components[7]);
    CHECK(discretize(a, stats) == discretize(b, stats));
}

TEST_CASE("value iteration") {
    TabularModel m(3, 2);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const int k = static_cast<int>(rng.below(3)), a = static_cast<int>(rng.below(2));
        m.record(k, a, rng.uniform(), rng.bernoulli(0.2) ? std::nullopt : std::optional<int>(rng.below(3)));
    }
    const auto q0 = m.value_iteration(0.0);
    for (int k = 0; k < 3; ++k)
        for (int a = 0; a < 2; ++a) CHECK(q0.q.at(k, a) == m.mean_reward(k, a));

    const auto vi = m.value_iteration(0.9, 1e-10);
    for (std::size_t i = 1; i < vi.gaps.size(); ++i)
        if (vi.gaps[i - 1] > 1e-13) CHECK(vi.gaps[i] <= 0.9 * vi.gaps[i - 1] + 1e-15);

    // 0 -> 1 with reward 0, then 1 -> 1 with reward 1 forever.
    TabularModel chain(2, 1);
    chain.record(0, 0, 0.0, 1);
    chain.record(1, 0, 1.0, 1);
    double q[2] = {0.0, 0.0};
    for (int sweep = 0; sweep < 1000; ++sweep) {
        const double v0 = q[0], v1 = q[1];
        q[0] = 0.0 + 0.5 * v1;
        q[1] = 1.0 + 0.5 * v1;
        (void)v0;
    }
    const auto cq = chain.value_iteration(0.5, 1e-14);
    CHECK(cq.q.at(0, 0) == doctest::Approx(q[0]).epsilon(1e-12));
    CHECK(cq.q.at(1, 0) == doctest::Approx(q[1]).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(2.0));

    CHECK_THROWS_AS(TabularModel(2, 2).value_iteration(0.9), InsufficientData);
}

// ------------------------------------------------------------------ REINFORCE

TEST_CASE("zero advantage leaves the policy unchanged") {
    Rng rng(3);
    PolicyNet pol{Mlp({3, 4, 2}, rng)};
    pol.entropy_weight = 0.0;
    pol.baseline = 2.0;
    const std::vector<TrajectoryStep> traj{{{0.1, 0.2, 0.3}, 1, 2.0}};
    const auto before = pol.net;
    Optimizer opt(OptimizerKind::sgd, {.learning_rate = 0.5});
    reinforce_update(pol, traj, 0.9, opt);
    CHECK(pol.net == before);
}

TEST_CASE("reinforce gradient matches finite differences") {
    Rng rng(8);
    PolicyNet pol{Mlp({3, 5, 2}, rng)};
    pol.baseline = 0.3;
    std::vector<TrajectoryStep> traj;
    for (int t = 0; t < 4; ++t)
        traj.push_back({{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, static_cast<int>(rng.below(2)),
                        rng.uniform(-1, 2)});
    std::vector<double> grads;
    reinforce_gradient(pol, traj, 0.9, grads);
    auto params = pol.net.parameters();
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double up = reinforce_loss(pol, traj, 0.9);
        params[i] = keep - h;
        const double down = reinforce_loss(pol, traj, 0.9);
        params[i] = keep;
        const double fd = (up - down) / (2 * h);
        const double scale = std::max(std::abs(fd), std::abs(grads[i]));
        if (scale > 1e-9) worst = std::max(worst, std::abs(fd - grads[i]) / scale);
    }
    CHECK(worst < 1e-4);
    CHECK(returns_to_go(traj, 0.5)[3] == traj[3].reward);
}

TEST_CASE("reinforce finds the better arm") {
    Rng rng(4);
    PolicyNet pol{Mlp({1, 2}, rng)};
    Optimizer opt(OptimizerKind::adam, {.learning_rate = 0.01});
    for (int ep = 0; ep < 2000; ++ep) {
        const auto p = pol.probabilities(std::vector<double>{1.0});
        const int a = rng.uniform() < p[0] ? 0 : 1;
        const std::vector<TrajectoryStep> traj{{{1.0}, a, a == 0 ? 1.0 : 0.0}};
        reinforce_update(pol, traj, 1.0, opt);
    }
    CHECK(pol.probabilities(std::vector<double>{1.0})[0] > 0.9);
}

// ------------------------------------------------------------------ CF

TEST_CASE("cosine similarity and fallback") {
    const std::vector<double> a{0.1, 0.5, 0.0, 0.3, 0.2, 0.9};
    CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine_similarity(a, std::vector<double>(6, 0.0)) == 0.0);

    InteractionMatrix m;
    m.rates = {{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}};
    m.sessions = {1, 1};
    m.color_clicks.resize(2);
    const auto pred = cf_predict(m, {0, 0, 1, 0, 0, 0});
    CHECK(pred.fallback);
    CHECK(pred.preference[0] == 0.5);
    CHECK(pred.preference[1] == 0.5);
    CHECK_THROWS_AS(cf_predict(InteractionMatrix{}, KindVector{}), InsufficientData);
}

TEST_CASE("cf prediction is the similarity-weighted neighbour mean") {
    InteractionMatrix m;
    Rng rng(17);
    for (int u = 0; u < 5; ++u) {
        KindVector r;
        for (double& v : r) v = rng.uniform();
        m.rates.push_back(r);
        m.sessions.push_back(3);
        m.color_clicks.push_back({});
    }
    const KindVector user{0.9, 0.1, 0.4, 0.0, 0.7, 0.2};
    const auto pred = cf_predict(m, user, 3);
    std::vector<std::pair<double, int>> sims;
    for (int u = 0; u < 5; ++u) sims.push_back({-cosine_similarity(user, m.rates[u]), u});
    std::sort(sims.begin(), sims.end());
    KindVector want{};
    double w = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double s = -sims[i].first;
        w += s;
        for (int k = 0; k < 6; ++k) want[k] += s * m.rates[sims[i].second][k];
    }
    REQUIRE(pred.neighbors.size() == 3u);
    for (int i = 0; i < 3; ++i) CHECK(pred.neighbors[i] == sims[i].second);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(pred.preference[k] - want[k] / w) < 1e-12);
}

TEST_CASE("cf layout ordering and sizing") {
    const auto canonical = new_default_layout(8, 7);
    KindVector pref{};
    pref[static_cast<int>(Kind::image_card)] = 1.0;
    const auto s = cf_layout(pref, canonical, 5);
    CHECK_NOTHROW(validate(s));
    int first_other = -1;
    for (int i = 0; i < s.size(); ++i) {
        CHECK(s.components[i].color == 5);
        if (s.components[i].kind != Kind::image_card && first_other < 0) first_other = i;
        if (s.components[i].kind == Kind::image_card && first_other >= 0) FAIL("image_card after another kind");
    }
    CHECK(s.components[0].size == SizeClass::L);
    CHECK(s.components[2].size == SizeClass::M);
    CHECK(s.components[7].size == SizeClass::S);
}

// ------------------------------------------------------------------ policies

TEST_CASE("baseline policies produce valid layouts and stay frozen in evaluation") {
    PolicySetup setup;
    setup.canonical = new_default_layout(8, 7);
    setup.budget_sessions = 200;
    setup.seed = 3;
    Persona p = sample_persona(Archetype::explorer, 1);
    std::vector<std::unique_ptr<LayoutPolicy>> policies;
    policies.push_back(std::make_unique<RandomPolicy>());
    policies.push_back(std::make_unique<FixedPolicy>(setup.canonical));
    policies.push_back(std::make_unique<MabPolicy>(setup));
    policies.push_back(std::make_unique<BayesOptPolicy>(setup));
    policies.push_back(std::make_unique<MdpPolicy>(setup));
    policies.push_back(std::make_unique<PgPolicy>(setup));
    policies.push_back(std::make_unique<CfPolicy>(setup));
    for (auto& pol : policies) {
        Rng rng(9);
        pol->set_training(true);
        for (int ep = 0; ep < 10; ++ep) {
            pol->begin_episode();
            LayoutState s = setup.canonical;
            auto stats = InteractionStats::zero(8, 25);
            for (int t = 0; t < 20; ++t) {
                const auto shown = pol->next_layout(s, stats, rng);
                REQUIRE_NOTHROW(validate(shown));
                const auto o = simulate_session(p, pack(shown), shown, rng);
                stats.record(shown, o.clicks, o.dwell_norm, 0.3);
                pol->observe(SessionFeedback{shown, o, reward_from_outcome(o), stats, !o.retained});
                s = shown;
                if (!o.retained) break;
            }
            pol->end_episode();
        }
        pol->set_training(false);
    }
}

TEST_CASE("fixed policy always shows the canonical layout") {
    const auto canonical = new_default_layout(8, 7);
    FixedPolicy fixed(canonical);
    Rng rng(1);
    auto other = apply_action(canonical, ActionId{3});
    CHECK(fixed.next_layout(other, InteractionStats::zero(8, 25), rng) == canonical);
}

}  // TEST_SUITE
