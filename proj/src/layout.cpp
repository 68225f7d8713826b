#include "adaptix/layout.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "adaptix/errors.hpp"
#include "adaptix/rng.hpp"

namespace adaptix {

namespace {

constexpr std::array<std::string_view, kKindCount> kKindNames = {
    "button", "image_card", "text_block", "search_bar", "banner", "nav_item"};
constexpr std::array<std::string_view, 3> kSizeNames = {"S", "M", "L"};
constexpr std::array<std::string_view, kPrimitiveCount> kPrimitiveNames = {
    "resize_up", "resize_down", "recolor_next", "move_earlier", "move_later", "toggle_prominence"};

}  // namespace

std::string_view to_string(Kind k) { return kKindNames[static_cast<int>(k)]; }
std::string_view to_string(SizeClass s) { return kSizeNames[static_cast<int>(s)]; }
std::string_view to_string(Primitive p) { return kPrimitiveNames[static_cast<int>(p)]; }

std::optional<Kind> parse_kind(std::string_view s) {
    for (int i = 0; i < kKindCount; ++i)
        if (kKindNames[i] == s) return static_cast<Kind>(i);
    return std::nullopt;
}

std::optional<SizeClass> parse_size(std::string_view s) {
    for (int i = 0; i < 3; ++i)
        if (kSizeNames[i] == s) return static_cast<SizeClass>(i);
    return std::nullopt;
}

int LayoutState::position_of(int id) const {
    for (int i = 0; i < size(); ++i)
        if (components[i].id == id) return i;
    return -1;
}

void validate(const LayoutState& s) {
    const int k = s.size();
    if (k < 2) throw InvalidArgument("layout needs at least 2 components");
    std::vector<bool> seen(k, false);
    for (const auto& c : s.components) {
        if (c.id < 0 || c.id >= k || seen[c.id])
            throw InvalidArgument("component ids must be a permutation of 0..K-1");
        seen[c.id] = true;
        if (c.color < 0 || c.color >= kColorCount)
            throw InvalidArgument("component " + std::to_string(c.id) + ": color out of range");
        if (static_cast<int>(c.kind) >= kKindCount || static_cast<int>(c.size) > 2)
            throw InvalidArgument("component " + std::to_string(c.id) + ": bad enum value");
    }
}

std::vector<int> scan_order(const PlacedLayout& placed) {
    std::vector<int> order(placed.placements.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& pa = placed.placements[a];
        const auto& pb = placed.placements[b];
        return std::tie(pa.row, pa.col) < std::tie(pb.row, pb.col);
    });
    return order;
}

ActionId encode_action(int position, Primitive p, int k) {
    if (position < 0 || position >= k) throw InvalidArgument("action position out of range");
    return ActionId{position * kPrimitiveCount + static_cast<int>(p)};
}

DecodedAction decode_action(ActionId a, int k) {
    if (a.index < 0 || a.index > kPrimitiveCount * k)
        throw InvalidArgument("action index " + std::to_string(a.index) + " outside [0, 6K]");
    if (a.index == kPrimitiveCount * k) return DecodedAction{0, Primitive::resize_up, true};
    return DecodedAction{a.index / kPrimitiveCount,
                         static_cast<Primitive>(a.index % kPrimitiveCount), false};
}

InteractionStats InteractionStats::zero(int k, int horizon) {
    InteractionStats st;
    st.click_ema.assign(k, 0.0);
    st.horizon = horizon;
    return st;
}

void InteractionStats::record(const LayoutState& s, const std::vector<bool>& clicked_by_position,
                              double dwell_norm, double alpha) {
    for (int i = 0; i < s.size(); ++i) {
        double& ema = click_ema[s.components[i].id];
        ema = (1.0 - alpha) * ema + alpha * (clicked_by_position[i] ? 1.0 : 0.0);
    }
    dwell_ema = (1.0 - alpha) * dwell_ema + alpha * dwell_norm;
    ++sessions;
}

LayoutState new_default_layout(int k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("new_default_layout: k must be >= 2");
    constexpr std::array<Kind, 5> kOtherKinds = {Kind::button, Kind::image_card, Kind::text_block,
                                                 Kind::banner, Kind::nav_item};
    Rng rng(seed);
    LayoutState s;
    s.components.reserve(k);
    for (int i = 0; i < k; ++i) {
        Component c;
        c.id = i;
        c.kind = i == 0 ? Kind::search_bar : kOtherKinds[rng.below(kOtherKinds.size())];
        c.size = SizeClass::M;
        c.color = static_cast<int>(rng.below(kColorCount));
        c.prominent = false;
        s.components.push_back(c);
    }
    return s;
}

LayoutState apply_action(const LayoutState& s, ActionId a) {
    const int k = s.size();
    const DecodedAction d = decode_action(a, k);
    LayoutState out = s;
    if (d.noop) return out;
    auto& c = out.components[d.position];
    switch (d.primitive) {
        case Primitive::resize_up:
            if (c.size != SizeClass::L) c.size = static_cast<SizeClass>(static_cast<int>(c.size) + 1);
            break;
        case Primitive::resize_down:
            if (c.size != SizeClass::S) c.size = static_cast<SizeClass>(static_cast<int>(c.size) - 1);
            break;
        case Primitive::recolor_next:
            c.color = (c.color + 1) % kColorCount;
            break;
        case Primitive::move_earlier:
            if (d.position > 0) std::swap(out.components[d.position], out.components[d.position - 1]);
            break;
        case Primitive::move_later:
            if (d.position + 1 < k) std::swap(out.components[d.position], out.components[d.position + 1]);
            break;
        case Primitive::toggle_prominence:
            c.prominent = !c.prominent;
            break;
    }
    return out;
}

PlacedLayout pack(const LayoutState& s, const GridConfig& grid) {
    PlacedLayout placed;
    placed.grid_cols = grid.cols;
    placed.fold_row = grid.fold_row;
    placed.placements.reserve(s.components.size());

    // occupied[row][col]; grows as rows are needed.
    std::vector<std::vector<bool>> occupied;
    auto ensure_rows = [&](int rows) {
        while (static_cast<int>(occupied.size()) < rows) occupied.emplace_back(grid.cols, false);
    };
    auto fits = [&](int r, int c, int w, int h) {
        ensure_rows(r + h);
        for (int dr = 0; dr < h; ++dr)
            for (int dc = 0; dc < w; ++dc)
                if (occupied[r + dr][c + dc]) return false;
        return true;
    };

    for (const auto& comp : s.components) {
        const int w = span_width(comp.size);
        const int h = span_height(comp.size);
        for (int r = 0;; ++r) {
            int col = -1;
            for (int c = 0; c + w <= grid.cols; ++c) {
                if (fits(r, c, w, h)) {
                    col = c;
                    break;
                }
            }
            if (col >= 0) {
                for (int dr = 0; dr < h; ++dr)
                    for (int dc = 0; dc < w; ++dc) occupied[r + dr][col + dc] = true;
                placed.placements.push_back(Placement{r, col, w, h});
                break;
            }
        }
    }
    return placed;
}

std::vector<double> encode_state(const LayoutState& s, const InteractionStats& stats,
                                 const GridConfig& grid, bool include_stats) {
    const int k = s.size();
    const PlacedLayout placed = pack(s, grid);
    std::vector<double> x;
    x.reserve(feature_length(k));
    for (int i = 0; i < k; ++i) {
        const auto& c = s.components[i];
        const auto& p = placed.placements[i];
        for (int j = 0; j < kKindCount; ++j) x.push_back(static_cast<int>(c.kind) == j ? 1.0 : 0.0);
        for (int j = 0; j < 3; ++j) x.push_back(static_cast<int>(c.size) == j ? 1.0 : 0.0);
        x.push_back(c.color / 7.0);
        x.push_back(c.prominent ? 1.0 : 0.0);
        x.push_back(static_cast<double>(i) / (k - 1));
        x.push_back(p.row < grid.fold_row ? 1.0 : 0.0);
        x.push_back(p.row / 10.0);
        x.push_back(p.col / 3.0);
    }
    for (int i = 0; i < k; ++i) {
        const int id = s.components[i].id;
        x.push_back(include_stats && id < static_cast<int>(stats.click_ema.size()) ? stats.click_ema[id] : 0.0);
    }
    x.push_back(include_stats ? stats.dwell_ema : 0.0);
    const double progress =
        stats.horizon > 0 ? std::min(1.0, static_cast<double>(stats.sessions) / stats.horizon) : 0.0;
    x.push_back(include_stats ? progress : 0.0);
    return x;
}

nlohmann::json serialize_layout(const PlacedLayout& p, const LayoutState& s) {
    nlohmann::json comps = nlohmann::json::array();
    for (int i = 0; i < s.size(); ++i) {
        const auto& c = s.components[i];
        const auto& pl = p.placements.at(i);
        comps.push_back({{"id", c.id},
                         {"kind", std::string(to_string(c.kind))},
                         {"size", std::string(to_string(c.size))},
                         {"color", c.color},
                         {"prominent", c.prominent},
                         {"row", pl.row},
                         {"col", pl.col},
                         {"w", pl.w},
                         {"h", pl.h}});
    }
    return {{"grid_cols", p.grid_cols}, {"fold_row", p.fold_row}, {"components", std::move(comps)}};
}

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

int require_int(const nlohmann::json& obj, const char* key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_number_integer()) throw ParseError(path + "." + key, "expected integer");
    return v.get<int>();
}

}  // namespace

LayoutState deserialize_layout(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("", "layout document must be an object");
    const auto& comps = require(doc, "components", "");
    if (!comps.is_array()) throw ParseError("components", "expected array");

    LayoutState s;
    const int k = static_cast<int>(comps.size());
    std::vector<bool> seen(k, false);
    for (int i = 0; i < k; ++i) {
        const std::string path = "components[" + std::to_string(i) + "]";
        const auto& jc = comps[i];
        if (!jc.is_object()) throw ParseError(path, "expected object");
        Component c;
        c.id = require_int(jc, "id", path);
        if (c.id < 0 || c.id >= k || seen[c.id])
            throw ValidationError(path + ".id", "ids must be a permutation of 0..K-1");
        seen[c.id] = true;

        const auto& kind = require(jc, "kind", path);
        if (!kind.is_string()) throw ParseError(path + ".kind", "expected string");
        auto pk = parse_kind(kind.get<std::string>());
        if (!pk) throw ValidationError(path + ".kind", "unknown kind '" + kind.get<std::string>() + "'");
        c.kind = *pk;

        const auto& size = require(jc, "size", path);
        if (!size.is_string()) throw ParseError(path + ".size", "expected string");
        auto ps = parse_size(size.get<std::string>());
        if (!ps) throw ValidationError(path + ".size", "size must be S, M or L");
        c.size = *ps;

        c.color = require_int(jc, "color", path);
        if (c.color < 0 || c.color >= kColorCount)
            throw ValidationError(path + ".color", "color " + std::to_string(c.color) + " outside [0,7]");

        const auto& prom = require(jc, "prominent", path);
        if (!prom.is_boolean()) throw ParseError(path + ".prominent", "expected boolean");
        c.prominent = prom.get<bool>();
        s.components.push_back(c);
    }
    if (k < 2) throw ValidationError("components", "layout needs at least 2 components");
    return s;
}

}  // namespace adaptix
