#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace adaptix {

enum class Kind : std::uint8_t { button, image_card, text_block, search_bar, banner, nav_item };
inline constexpr int kKindCount = 6;

enum class SizeClass : std::uint8_t { S, M, L };
inline constexpr int kColorCount = 8;

enum class Primitive : std::uint8_t {
    resize_up,
    resize_down,
    recolor_next,
    move_earlier,
    move_later,
    toggle_prominence,
};
inline constexpr int kPrimitiveCount = 6;

std::string_view to_string(Kind k);
std::string_view to_string(SizeClass s);
std::string_view to_string(Primitive p);
std::optional<Kind> parse_kind(std::string_view s);
std::optional<SizeClass> parse_size(std::string_view s);

inline int span_width(SizeClass s) { return s == SizeClass::S ? 1 : 2; }
inline int span_height(SizeClass s) { return s == SizeClass::L ? 2 : 1; }

struct Component {
    int id = 0;
    Kind kind = Kind::button;
    SizeClass size = SizeClass::M;
    int color = 0;
    bool prominent = false;

    friend bool operator==(const Component&, const Component&) = default;
};

// Ordered component list; list order is the packing/reading order.
struct LayoutState {
    std::vector<Component> components;

    int size() const { return static_cast<int>(components.size()); }
    // Position of the component with the given id, or -1.
    int position_of(int id) const;

    friend bool operator==(const LayoutState&, const LayoutState&) = default;
};

// Throws InvalidArgument describing the first violated invariant.
void validate(const LayoutState& s);

struct GridConfig {
    int cols = 4;
    int fold_row = 3;

    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct Placement {
    int row = 0;
    int col = 0;
    int w = 1;
    int h = 1;

    friend bool operator==(const Placement&, const Placement&) = default;
};

struct PlacedLayout {
    std::vector<Placement> placements;  // indexed by list position
    int grid_cols = 4;
    int fold_row = 3;

    friend bool operator==(const PlacedLayout&, const PlacedLayout&) = default;
};

// Positions sorted by (row, col): the order a user scans the grid.
std::vector<int> scan_order(const PlacedLayout& placed);

struct ActionId {
    int index = 0;
    friend bool operator==(const ActionId&, const ActionId&) = default;
};

struct DecodedAction {
    int position = 0;
    Primitive primitive = Primitive::resize_up;
    bool noop = false;
};

inline int action_count(int k) { return kPrimitiveCount * k + 1; }
inline ActionId noop_action(int k) { return ActionId{kPrimitiveCount * k}; }
ActionId encode_action(int position, Primitive p, int k);
DecodedAction decode_action(ActionId a, int k);

// Per-user running interaction summary, part of the observed state.
struct InteractionStats {
    std::vector<double> click_ema;  // indexed by component id
    double dwell_ema = 0.0;
    int sessions = 0;
    int horizon = 25;

    static InteractionStats zero(int k, int horizon);

    // clicked_by_position is aligned with `s.components`.
    void record(const LayoutState& s, const std::vector<bool>& clicked_by_position, double dwell_norm,
                double alpha);
};

LayoutState new_default_layout(int k, std::uint64_t seed);
LayoutState apply_action(const LayoutState& s, ActionId a);
PlacedLayout pack(const LayoutState& s, const GridConfig& grid = {});

inline int feature_length(int k) { return 15 * k + k + 2; }

std::vector<double> encode_state(const LayoutState& s, const InteractionStats& stats,
                                 const GridConfig& grid = {}, bool include_stats = true);

// Layout document shared with the service and the web client.
nlohmann::json serialize_layout(const PlacedLayout& p, const LayoutState& s);
// Throws ParseError (missing/mistyped field) or ValidationError (range rule),
// both carrying the field path.
LayoutState deserialize_layout(const nlohmann::json& doc);

}  // namespace adaptix
