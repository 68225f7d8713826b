#include <cmath>

#include "adaptix/errors.hpp"
#include "adaptix/user_sim.hpp"
#include "doctest.h"

using namespace adaptix;

namespace {

Persona plain_persona() {
    Persona p;
    p.kind_affinity = {0.2, -0.3, 0.5, 0.0, -0.8, 0.4};
    p.color_pref = 3;
    p.patience = 0.7;
    p.size_bias = 1;
    p.click_base = -0.5;
    p.dwell_scale = 1.0;
    p.churn_intercept = -2.0;
    p.churn_slope = 5.0;
    return p;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_SUITE("user_sim") {

TEST_CASE("persona sampling is deterministic and within archetype ranges") {
    CHECK(to_json(sample_persona(Archetype::mixed, 7)) == to_json(sample_persona(Archetype::mixed, 7)));
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto sc = sample_persona(Archetype::scanner, seed);
        CHECK(sc.patience <= 0.7);
        CHECK(sc.patience >= 0.5);
        CHECK_NOTHROW(validate(sc));
        for (double a : sc.kind_affinity) {
            CHECK(a >= -1.0);
            CHECK(a <= 1.0);
        }
        CHECK(sample_persona(Archetype::loyalist, seed).churn_intercept >
              sample_persona(Archetype::explorer, seed).churn_intercept);
    }
}

TEST_CASE("mixed population affinities centre on zero") {
    std::array<double, kKindCount> sum{};
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        const auto p = sample_persona(PersonaMix{}, static_cast<std::uint64_t>(i));
        for (int k = 0; k < kKindCount; ++k) sum[k] += p.kind_affinity[k];
    }
    for (double s : sum) CHECK(std::abs(s / n) <= 0.1);
}

TEST_CASE("persona json round-trip and validation") {
    const auto p = plain_persona();
    const auto back = persona_from_json(to_json(p));
    CHECK(to_json(back) == to_json(p));
    auto j = to_json(p);
    j["patience"] = 1.5;
    CHECK_THROWS_AS(persona_from_json(j), ValidationError);
    j.erase("patience");
    CHECK_THROWS_AS(persona_from_json(j), ParseError);
}

TEST_CASE("click probabilities follow the closed form") {
    const auto p = plain_persona();
    auto s = new_default_layout(8, 7);
    s.components[2].prominent = true;
    s.components[5].size = SizeClass::L;
    const auto placed = pack(s);
    const auto probs = click_probabilities(p, placed, s, {});
    const auto order = scan_order(placed);
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& c = s.components[order[j]];
        double a = std::pow(p.patience, static_cast<double>(j));
        if (c.prominent) a = std::min(1.0, 1.5 * a);
        const int d = std::abs(c.color - p.color_pref);
        const double match = 1.0 - std::min(d, 8 - d) / 4.0;
        const double logit = p.click_base + p.kind_affinity[static_cast<int>(c.kind)] +
                             0.5 * p.size_bias * (static_cast<int>(c.size) - 1) + 0.4 * (2 * match - 1);
        CHECK(probs[order[j]] == doctest::Approx(a * logistic(logit)).epsilon(1e-12));
    }
}

TEST_CASE("vanishing patience leaves only the first scanned component") {
    auto p = plain_persona();
    p.patience = 1e-9;
    const auto s = new_default_layout(8, 7);
    const auto placed = pack(s);
    const auto probs = click_probabilities(p, placed, s, {});
    const auto order = scan_order(placed);
    CHECK(probs[order[0]] > 0.1);
    for (std::size_t j = 1; j < order.size(); ++j) CHECK(probs[order[j]] < 1e-8);
}

TEST_CASE("hopeless persona never clicks") {
    auto p = plain_persona();
    p.kind_affinity.fill(-10.0);
    p.click_base = -10.0;
    const auto s = new_default_layout(8, 7);
    const auto placed = pack(s);
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const auto o = simulate_session(p, placed, s, rng);
        CHECK(o.click_count == 0);
        CHECK(o.dwell_norm == 0.0);
    }
}

TEST_CASE("simulated click counts match the analytic expectation") {
    const auto p = plain_persona();
    const auto s = new_default_layout(8, 7);
    const auto placed = pack(s);
    const double expected = expected_clicks(p, placed, s);
    Rng rng(12345);
    double total = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) total += simulate_session(p, placed, s, rng).click_count;
    CHECK(std::abs(total / n - expected) <= 0.01 * expected);
}

TEST_CASE("session outcome fields are consistent") {
    const auto p = plain_persona();
    const auto s = new_default_layout(8, 7);
    const auto placed = pack(s);
    Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        const auto o = simulate_session(p, placed, s, rng);
        int clicks = 0;
        for (bool c : o.clicks) clicks += c;
        CHECK(clicks == o.click_count);
        CHECK(o.dwell_norm >= 0.0);
        CHECK(o.dwell_norm <= 1.0);
        CHECK(o.satisfaction == doctest::Approx(o.click_count + 0.5 * o.dwell_norm));
        if (o.click_count == 0) CHECK(o.dwell_norm == 0.0);
    }
}

TEST_CASE("reward formula") {
    SessionOutcome none;
    none.clicks.assign(8, false);
    CHECK(reward_from_outcome(none) == 0.0);

    SessionOutcome o;
    o.clicks.assign(8, false);
    o.clicks[0] = o.clicks[3] = true;
    o.click_count = 2;
    o.dwell_norm = 0.5;
    o.retained = true;
    CHECK(reward_from_outcome(o) == doctest::Approx(4.25));

    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        SessionOutcome r;
        r.click_count = static_cast<int>(rng.below(9));
        r.dwell_norm = rng.uniform();
        r.retained = rng.bernoulli(0.5);
        const double c = rng.uniform(-3.0, 3.0);
        const RewardWeights w{};
        const RewardWeights scaled{c * w.w_click, c * w.w_dwell, c * w.w_retain};
        CHECK(reward_from_outcome(r, scaled) == doctest::Approx(c * reward_from_outcome(r, w)).epsilon(1e-12));
    }
}

}  // TEST_SUITE
