#include <cmath>

#include "adaptix/errors.hpp"
#include "adaptix/optimizer.hpp"
#include "doctest.h"

using namespace adaptix;

TEST_SUITE("optimizer") {

TEST_CASE("single SGD step") {
    Optimizer opt(OptimizerKind::sgd, {.learning_rate = 0.1});
    std::vector<double> p{1.0};
    opt.step(p, std::vector<double>{0.5});
    CHECK(p[0] == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("first Adam step moves by lr against the gradient sign") {
    for (double g : {0.5, -2.0, 50.0}) {  // |g| >> eps
        Optimizer opt(OptimizerKind::adam, {.learning_rate = 0.01});
        std::vector<double> p{0.0};
        opt.step(p, std::vector<double>{g});
        CHECK(std::abs(p[0] - (-0.01 * (g > 0 ? 1 : -1))) <= 0.01 * 1e-6);
    }
}

TEST_CASE("AdaGrad two unit gradients") {
    Optimizer opt(OptimizerKind::adagrad, {.learning_rate = 0.1, .epsilon = 0.0});
    std::vector<double> p{0.0};
    opt.step(p, std::vector<double>{1.0});
    opt.step(p, std::vector<double>{1.0});
    CHECK(std::abs(p[0] - (-0.1 * (1.0 + 1.0 / std::sqrt(2.0)))) <= 1e-9);
}

TEST_CASE("momentum accumulates") {
    Optimizer opt(OptimizerKind::momentum, {.learning_rate = 0.1, .momentum = 0.9});
    std::vector<double> p{0.0};
    opt.step(p, std::vector<double>{1.0});
    opt.step(p, std::vector<double>{1.0});
    CHECK(p[0] == doctest::Approx(-0.1 - 0.19).epsilon(1e-14));
    CHECK(opt.first_moment()[0] == doctest::Approx(1.9));
}

TEST_CASE("names parse case-insensitively") {
    for (auto k : {OptimizerKind::sgd, OptimizerKind::momentum, OptimizerKind::adagrad, OptimizerKind::adam})
        CHECK(parse_optimizer(to_string(k)) == k);
    CHECK(parse_optimizer("ADAM") == OptimizerKind::adam);
    CHECK(parse_optimizer("adagrad") == OptimizerKind::adagrad);
    CHECK_FALSE(parse_optimizer("rmsprop").has_value());
}

TEST_CASE("shape mismatches throw") {
    Optimizer opt(OptimizerKind::adam, {});
    std::vector<double> p(3, 0.0);
    CHECK_THROWS_AS(opt.step(p, std::vector<double>(2, 0.0)), InvalidArgument);
    opt.step(p, std::vector<double>(3, 1.0));
    std::vector<double> q(4, 0.0);
    CHECK_THROWS_AS(opt.step(q, std::vector<double>(4, 0.0)), InvalidArgument);
    CHECK(opt.steps() == 1u);
}

}  // TEST_SUITE
