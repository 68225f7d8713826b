#pragma once

#include <array>
#include <span>
#include <vector>

#include "adaptix/layout.hpp"
#include "adaptix/user_sim.hpp"

namespace adaptix {

using KindVector = std::array<double, kKindCount>;

// Running per-user click tallies by component kind and by color.
struct UserProfile {
    std::array<double, kKindCount> kind_clicks{};
    std::array<double, kKindCount> kind_impressions{};
    std::array<double, kColorCount> color_clicks{};
    int sessions = 0;

    void record(const LayoutState& shown, const SessionOutcome& outcome);
    KindVector click_rates() const;  // 0 where a kind was never shown
};

// users x 6 kinds matrix of click rates (entries in [0,1]).
struct InteractionMatrix {
    std::vector<KindVector> rates;
    std::vector<int> sessions;
    std::vector<std::array<double, kColorCount>> color_clicks;

    int users() const { return static_cast<int>(rates.size()); }
    void add(const UserProfile& profile);
};

// 0 when either vector is all zeros.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct CfPrediction {
    KindVector preference{};
    std::vector<int> neighbors;  // rows used, most similar first
    bool fallback = false;       // global-mean row used
};

// Similarity-weighted mean of the top-n positively similar rows of `others`;
// falls back to the global mean row when no similarity is positive.
// Throws InsufficientData for an empty matrix.
CfPrediction cf_predict(const InteractionMatrix& others, const KindVector& user_row, int n_neighbors = 5);

// Most clicked color summed over the given rows (lowest index on ties).
int modal_clicked_color(const InteractionMatrix& matrix, std::span<const int> rows);

// Components ordered by predicted kind preference (descending, stable), sizes
// L, L, M, M, M, S, ... in that order, every color set to `color`.
LayoutState cf_layout(const KindVector& preference, const LayoutState& canonical, int color);

}  // namespace adaptix
