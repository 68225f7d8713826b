#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "adaptix/layout.hpp"
#include "adaptix/rng.hpp"
#include "json.hpp"

namespace adaptix {

enum class Archetype : std::uint8_t { explorer, scanner, loyalist, mixed };

std::string_view to_string(Archetype a);
std::optional<Archetype> parse_archetype(std::string_view s);

// Hidden synthetic-user parameters.
struct Persona {
    std::array<double, kKindCount> kind_affinity{};  // [-1, 1]
    int color_pref = 0;                              // [0, 7]
    double patience = 0.8;                           // attention decay per scan rank, (0, 1)
    int size_bias = 0;                               // -1, 0, +1
    double click_base = -1.0;
    double dwell_scale = 1.0;
    double churn_intercept = 0.0;
    double churn_slope = 0.5;

    friend bool operator==(const Persona&, const Persona&) = default;
};

void validate(const Persona& p);

nlohmann::json to_json(const Persona& p);
Persona persona_from_json(const nlohmann::json& j);

struct SessionOutcome {
    std::vector<bool> clicks;  // aligned with the shown layout's list order
    int click_count = 0;
    double dwell_norm = 0.0;
    bool retained = false;
    double satisfaction = 0.0;

    friend bool operator==(const SessionOutcome&, const SessionOutcome&) = default;
};

struct RewardWeights {
    double w_click = 1.0;
    double w_dwell = 0.5;
    double w_retain = 2.0;
};

struct UserModelConfig {
    double prominence_multiplier = 1.5;
};

// Relative weights of the three archetypes in a population.
struct PersonaMix {
    double explorer = 1.0;
    double scanner = 1.0;
    double loyalist = 1.0;
};

Persona sample_persona(Archetype archetype, std::uint64_t seed);
Persona sample_persona(const PersonaMix& mix, std::uint64_t seed);

// Closed-form per-component click probabilities p_j, aligned with list order.
std::vector<double> click_probabilities(const Persona& p, const PlacedLayout& placed,
                                        const LayoutState& s, const UserModelConfig& cfg = {});
double expected_clicks(const Persona& p, const PlacedLayout& placed, const LayoutState& s,
                       const UserModelConfig& cfg = {});

SessionOutcome simulate_session(const Persona& p, const PlacedLayout& placed, const LayoutState& s,
                                Rng& rng, const UserModelConfig& cfg = {});

double reward_from_outcome(const SessionOutcome& o, const RewardWeights& w = {});

double sigmoid(double x);

}  // namespace adaptix
