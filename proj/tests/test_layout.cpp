#include <algorithm>

#include "adaptix/errors.hpp"
#include "adaptix/layout.hpp"
#include "doctest.h"

using namespace adaptix;

namespace {

LayoutState all_size(int k, SizeClass size) {
    LayoutState s = new_default_layout(k, 1);
    for (auto& c : s.components) c.size = size;
    return s;
}

}  // namespace

TEST_SUITE("layout") {

TEST_CASE("default layout is deterministic and starts with the search bar") {
    CHECK(new_default_layout(8, 42) == new_default_layout(8, 42));
    CHECK(new_default_layout(8, 42) != new_default_layout(8, 43));
    for (std::uint64_t seed : {0u, 5u, 99u}) {
        const auto s = new_default_layout(2, seed);
        CHECK(s.components[0].kind == Kind::search_bar);
    }
    const auto s = new_default_layout(8, 7);
    CHECK_NOTHROW(validate(s));
    for (int i = 0; i < s.size(); ++i) {
        CHECK(s.components[i].id == i);
        CHECK(s.components[i].size == SizeClass::M);
        CHECK_FALSE(s.components[i].prominent);
    }
    CHECK_THROWS_AS(new_default_layout(1, 0), InvalidArgument);
}

TEST_CASE("validate rejects broken layouts") {
    auto s = new_default_layout(4, 3);
    s.components[2].id = s.components[1].id;
    CHECK_THROWS_AS(validate(s), InvalidArgument);
    s = new_default_layout(4, 3);
    s.components[1].color = 8;
    CHECK_THROWS_AS(validate(s), InvalidArgument);
}

TEST_CASE("action encoding round-trips over the whole catalog") {
    const int k = 8;
    CHECK(action_count(k) == 49);
    for (int a = 0; a < action_count(k); ++a) {
        const auto d = decode_action(ActionId{a}, k);
        if (a == 6 * k) {
            CHECK(d.noop);
            continue;
        }
        CHECK_FALSE(d.noop);
        CHECK(encode_action(d.position, d.primitive, k) == ActionId{a});
    }
    CHECK_THROWS_AS(decode_action(ActionId{49}, k), InvalidArgument);
    CHECK_THROWS_AS(decode_action(ActionId{-1}, k), InvalidArgument);
}

TEST_CASE("apply_action primitives") {
    const auto s = new_default_layout(8, 11);
    CHECK(apply_action(s, noop_action(8)) == s);

    auto t = s;
    t.components[2].color = 7;
    CHECK(apply_action(t, encode_action(2, Primitive::recolor_next, 8)).components[2].color == 0);

    for (int i = 0; i + 1 < 8; ++i) {
        const auto moved = apply_action(s, encode_action(i, Primitive::move_later, 8));
        CHECK(moved.components[i + 1].id == s.components[i].id);
        CHECK(apply_action(moved, encode_action(i + 1, Primitive::move_earlier, 8)) == s);
    }
    // Edges and saturating resizes leave the layout alone.
    CHECK(apply_action(s, encode_action(0, Primitive::move_earlier, 8)) == s);
    CHECK(apply_action(s, encode_action(7, Primitive::move_later, 8)) == s);
    const auto big = all_size(8, SizeClass::L);
    CHECK(apply_action(big, encode_action(3, Primitive::resize_up, 8)) == big);
    const auto small = all_size(8, SizeClass::S);
    CHECK(apply_action(small, encode_action(3, Primitive::resize_down, 8)) == small);
    CHECK(apply_action(s, encode_action(4, Primitive::resize_up, 8)).components[4].size == SizeClass::L);

    const auto toggled = apply_action(s, encode_action(5, Primitive::toggle_prominence, 8));
    CHECK(toggled.components[5].prominent);
    CHECK(apply_action(toggled, encode_action(5, Primitive::toggle_prominence, 8)) == s);

    // Every action keeps the invariants.
    for (int a = 0; a < action_count(8); ++a) CHECK_NOTHROW(validate(apply_action(s, ActionId{a})));
}

TEST_CASE("first-fit packing") {
    auto p = pack(all_size(3, SizeClass::S));
    REQUIRE(p.placements.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(p.placements[i].row == 0);
        CHECK(p.placements[i].col == i);
    }

    p = pack(all_size(2, SizeClass::L));
    CHECK(p.placements[0] == Placement{0, 0, 2, 2});
    CHECK(p.placements[1] == Placement{0, 2, 2, 2});

    // Oracle: eight 2x2 blocks in four columns stack in bands of two.
    p = pack(all_size(8, SizeClass::L));
    int max_row = 0;
    std::array<int, 8> per_band{};
    for (int i = 0; i < 8; ++i) {
        const auto& pl = p.placements[i];
        CHECK(pl.row == 2 * (i / 2));
        CHECK(pl.col == 2 * (i % 2));
        max_row = std::max(max_row, pl.row);
        ++per_band[pl.row / 2];
    }
    CHECK(max_row == 6);
    for (int band = 0; band < 4; ++band) CHECK(per_band[band] == 2);

    // M (2x1) fills gaps left by S.
    LayoutState mixed = all_size(3, SizeClass::S);
    mixed.components[1].size = SizeClass::M;
    p = pack(mixed);
    CHECK(p.placements[1] == Placement{0, 1, 2, 1});
    CHECK(p.placements[2] == Placement{0, 3, 1, 1});
}

TEST_CASE("scan order follows rows then columns") {
    LayoutState s = all_size(4, SizeClass::S);
    s.components[0].size = SizeClass::L;  // 2x2 at (0,0); then (0,2),(0,3),(1,2)
    const auto placed = pack(s);
    CHECK(scan_order(placed) == std::vector<int>{0, 1, 2, 3});
    CHECK(placed.placements[3] == Placement{1, 2, 1, 1});
}

TEST_CASE("state encoding") {
    const auto s = new_default_layout(8, 7);
    const auto stats = InteractionStats::zero(8, 25);
    const auto x = encode_state(s, stats);
    CHECK(x.size() == 130u);
    CHECK(feature_length(8) == 130);
    for (int i = 0; i < 8; ++i) {
        double kind_sum = 0.0, size_sum = 0.0;
        for (int j = 0; j < 6; ++j) kind_sum += x[15 * i + j];
        for (int j = 6; j < 9; ++j) size_sum += x[15 * i + j];
        CHECK(kind_sum == 1.0);
        CHECK(size_sum == 1.0);
    }

    auto t = s;
    t.components[3].color = (t.components[3].color + 3) % 8;
    const auto y = encode_state(t, stats);
    int differing = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != y[i]) ++differing;
    CHECK(differing == 1);

    InteractionStats busy = InteractionStats::zero(8, 25);
    std::vector<bool> clicked(8, false);
    clicked[0] = true;
    busy.record(s, clicked, 0.5, 0.3);
    const auto with = encode_state(s, busy, {}, true);
    const auto without = encode_state(s, busy, {}, false);
    CHECK(with[128] == doctest::Approx(0.15));
    CHECK(without[128] == 0.0);
    CHECK(std::all_of(without.begin() + 120, without.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("interaction stats EMA is keyed by component id") {
    auto s = new_default_layout(3, 2);
    auto stats = InteractionStats::zero(3, 10);
    std::swap(s.components[0], s.components[2]);  // position 0 holds id 2
    stats.record(s, {true, false, false}, 1.0, 0.5);
    CHECK(stats.click_ema[2] == 0.5);
    CHECK(stats.click_ema[0] == 0.0);
    stats.record(s, {true, false, false}, 0.0, 0.5);
    CHECK(stats.click_ema[2] == 0.75);
    CHECK(stats.dwell_ema == 0.25);
    CHECK(stats.sessions == 2);
}

TEST_CASE("layout document round-trip and errors") {
    const auto s = new_default_layout(8, 7);
    const auto doc = serialize_layout(pack(s), s);
    CHECK(deserialize_layout(doc) == s);

    auto missing = doc;
    missing.erase("components");
    try {
        deserialize_layout(missing);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.field() == "components");
    }

    auto bad = doc;
    bad["components"][4]["color"] = 9;
    try {
        deserialize_layout(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "components[4].color");
    }
}

}  // TEST_SUITE
