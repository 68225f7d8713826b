#include "adaptix/baselines/collaborative.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptix/errors.hpp"

namespace adaptix {

void UserProfile::record(const LayoutState& shown, const SessionOutcome& outcome) {
    for (int i = 0; i < shown.size(); ++i) {
        const auto& c = shown.components[i];
        const int kind = static_cast<int>(c.kind);
        kind_impressions[kind] += 1.0;
        if (outcome.clicks[i]) {
            kind_clicks[kind] += 1.0;
            color_clicks[c.color] += 1.0;
        }
    }
    ++sessions;
}

KindVector UserProfile::click_rates() const {
    KindVector r{};
    for (int k = 0; k < kKindCount; ++k) r[k] = kind_impressions[k] > 0 ? kind_clicks[k] / kind_impressions[k] : 0.0;
    return r;
}

void InteractionMatrix::add(const UserProfile& profile) {
    rates.push_back(profile.click_rates());
    sessions.push_back(profile.sessions);
    color_clicks.push_back(profile.color_clicks);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

CfPrediction cf_predict(const InteractionMatrix& others, const KindVector& user_row, int n_neighbors) {
    if (others.users() == 0) throw InsufficientData("cf_predict: interaction matrix is empty");
    const int n = others.users();
    std::vector<double> sim(n);
    for (int u = 0; u < n; ++u) sim[u] = cosine_similarity(user_row, others.rates[u]);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sim[a] > sim[b]; });

    CfPrediction pred;
    double weight = 0.0;
    for (int i = 0; i < std::min(n, n_neighbors); ++i) {
        const int u = order[i];
        if (sim[u] <= 0.0) break;
        pred.neighbors.push_back(u);
        weight += sim[u];
        for (int k = 0; k < kKindCount; ++k) pred.preference[k] += sim[u] * others.rates[u][k];
    }
    if (pred.neighbors.empty()) {
        pred.fallback = true;
        for (int u = 0; u < n; ++u)
            for (int k = 0; k < kKindCount; ++k) pred.preference[k] += others.rates[u][k];
        for (double& v : pred.preference) v /= n;
        return pred;
    }
    for (double& v : pred.preference) v /= weight;
    return pred;
}

int modal_clicked_color(const InteractionMatrix& matrix, std::span<const int> rows) {
    std::array<double, kColorCount> totals{};
    for (int u : rows)
        for (int c = 0; c < kColorCount; ++c) totals[c] += matrix.color_clicks.at(u)[c];
    return static_cast<int>(std::max_element(totals.begin(), totals.end()) - totals.begin());
}

LayoutState cf_layout(const KindVector& preference, const LayoutState& canonical, int color) {
    LayoutState s = canonical;
    std::stable_sort(s.components.begin(), s.components.end(), [&](const Component& a, const Component& b) {
        return preference[static_cast<int>(a.kind)] > preference[static_cast<int>(b.kind)];
    });
    for (int i = 0; i < s.size(); ++i) {
        auto& c = s.components[i];
        c.size = i < 2 ? SizeClass::L : (i < 5 ? SizeClass::M : SizeClass::S);
        c.color = color;
    }
    return s;
}

}  // namespace adaptix
