#include "adaptix/user_sim.hpp"

#include <algorithm>
#include <cmath>

#include "adaptix/errors.hpp"

namespace adaptix {

namespace {

struct ArchetypeRanges {
    double patience_lo, patience_hi;
    double base_lo, base_hi;
    double churn0_lo, churn0_hi;
    double churn1_lo, churn1_hi;
};

// Scanners give up early in the scan, loyalists come back regardless.
constexpr ArchetypeRanges kExplorer{0.58, 0.70, -1.0, 0.0, -3.5, -2.5, 5.0, 7.0};
constexpr ArchetypeRanges kScanner{0.50, 0.62, -1.0, 0.0, -3.5, -2.5, 5.0, 7.0};
constexpr ArchetypeRanges kLoyalist{0.58, 0.70, -1.0, 0.0, -2.0, -1.0, 4.0, 6.0};

Persona sample_with(const ArchetypeRanges& r, Rng& rng) {
    Persona p;
    for (auto& a : p.kind_affinity) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        a = sign * rng.uniform(0.6, 1.0);
    }
    p.color_pref = static_cast<int>(rng.below(kColorCount));
    p.patience = rng.uniform(r.patience_lo, r.patience_hi);
    p.size_bias = static_cast<int>(rng.below(3)) - 1;
    p.click_base = rng.uniform(r.base_lo, r.base_hi);
    p.dwell_scale = rng.uniform(0.5, 2.0);
    p.churn_intercept = rng.uniform(r.churn0_lo, r.churn0_hi);
    p.churn_slope = rng.uniform(r.churn1_lo, r.churn1_hi);
    return p;
}

const ArchetypeRanges& ranges_for(Archetype a) {
    switch (a) {
        case Archetype::scanner: return kScanner;
        case Archetype::loyalist: return kLoyalist;
        default: return kExplorer;
    }
}

}  // namespace

std::string_view to_string(Archetype a) {
    switch (a) {
        case Archetype::explorer: return "explorer";
        case Archetype::scanner: return "scanner";
        case Archetype::loyalist: return "loyalist";
        case Archetype::mixed: return "mixed";
    }
    return "mixed";
}

std::optional<Archetype> parse_archetype(std::string_view s) {
    for (auto a : {Archetype::explorer, Archetype::scanner, Archetype::loyalist, Archetype::mixed})
        if (to_string(a) == s) return a;
    return std::nullopt;
}

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void validate(const Persona& p) {
    auto finite = [](double v) { return std::isfinite(v); };
    for (double a : p.kind_affinity)
        if (!finite(a)) throw InvalidArgument("persona.kind_affinity must be finite");
    if (!(p.patience > 0.0 && p.patience < 1.0)) throw InvalidArgument("persona.patience must lie in (0,1)");
    if (p.size_bias < -1 || p.size_bias > 1) throw InvalidArgument("persona.size_bias must be -1, 0 or 1");
    if (p.color_pref < 0 || p.color_pref >= kColorCount) throw InvalidArgument("persona.color_pref out of range");
    if (!finite(p.click_base) || !finite(p.dwell_scale) || !finite(p.churn_intercept) ||
        !finite(p.churn_slope))
        throw InvalidArgument("persona fields must be finite");
    if (p.dwell_scale < 0.0) throw InvalidArgument("persona.dwell_scale must be >= 0");
    if (p.churn_slope < 0.0) throw InvalidArgument("persona.churn_slope must be >= 0");
}

nlohmann::json to_json(const Persona& p) {
    return {{"kind_affinity", p.kind_affinity}, {"color_pref", p.color_pref},
            {"patience", p.patience},           {"size_bias", p.size_bias},
            {"click_base", p.click_base},       {"dwell_scale", p.dwell_scale},
            {"churn_intercept", p.churn_intercept}, {"churn_slope", p.churn_slope}};
}

Persona persona_from_json(const nlohmann::json& j) {
    Persona p;
    try {
        const auto& aff = j.at("kind_affinity");
        if (!aff.is_array() || aff.size() != kKindCount)
            throw ParseError("kind_affinity", "expected array of 6 numbers");
        for (int i = 0; i < kKindCount; ++i) p.kind_affinity[i] = aff[i].get<double>();
        p.color_pref = j.at("color_pref").get<int>();
        p.patience = j.at("patience").get<double>();
        p.size_bias = j.at("size_bias").get<int>();
        p.click_base = j.at("click_base").get<double>();
        p.dwell_scale = j.at("dwell_scale").get<double>();
        p.churn_intercept = j.at("churn_intercept").get<double>();
        p.churn_slope = j.at("churn_slope").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("persona", e.what());
    }
    try {
        validate(p);
    } catch (const InvalidArgument& e) {
        throw ValidationError("persona", e.what());
    }
    return p;
}

Persona sample_persona(Archetype archetype, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x9e75));
    if (archetype == Archetype::mixed) archetype = static_cast<Archetype>(rng.below(3));
    return sample_with(ranges_for(archetype), rng);
}

Persona sample_persona(const PersonaMix& mix, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x313c));
    const double total = mix.explorer + mix.scanner + mix.loyalist;
    if (!(total > 0.0)) throw InvalidArgument("persona mix weights must sum to a positive value");
    const double u = rng.uniform() * total;
    Archetype a = Archetype::loyalist;
    if (u < mix.explorer)
        a = Archetype::explorer;
    else if (u < mix.explorer + mix.scanner)
        a = Archetype::scanner;
    return sample_with(ranges_for(a), rng);
}

std::vector<double> click_probabilities(const Persona& p, const PlacedLayout& placed,
                                        const LayoutState& s, const UserModelConfig& cfg) {
    const auto order = scan_order(placed);
    std::vector<double> probs(s.components.size(), 0.0);
    double attention = 1.0;  // patience^j
    for (int pos : order) {
        const auto& c = s.components[pos];
        const double a = c.prominent ? std::min(1.0, attention * cfg.prominence_multiplier) : attention;
        const int dist = std::abs(c.color - p.color_pref);
        const double color_match = 1.0 - std::min(dist, kColorCount - dist) / 4.0;
        const double logit = p.click_base + p.kind_affinity[static_cast<int>(c.kind)] +
                             0.5 * p.size_bias * (static_cast<int>(c.size) - 1) +
                             0.4 * (2.0 * color_match - 1.0);
        probs[pos] = a * sigmoid(logit);
        attention *= p.patience;
    }
    return probs;
}

double expected_clicks(const Persona& p, const PlacedLayout& placed, const LayoutState& s,
                       const UserModelConfig& cfg) {
    double sum = 0.0;
    for (double v : click_probabilities(p, placed, s, cfg)) sum += v;
    return sum;
}

SessionOutcome simulate_session(const Persona& p, const PlacedLayout& placed, const LayoutState& s,
                                Rng& rng, const UserModelConfig& cfg) {
    const auto probs = click_probabilities(p, placed, s, cfg);
    const int k = s.size();
    SessionOutcome o;
    o.clicks.assign(k, false);
    for (int pos : scan_order(placed)) {
        if (rng.bernoulli(probs[pos])) {
            o.clicks[pos] = true;
            ++o.click_count;
        }
    }
    const double u = rng.uniform();
    o.dwell_norm = std::min(1.0, o.click_count * (1.0 + p.dwell_scale * u) / k);
    o.satisfaction = o.click_count + 0.5 * o.dwell_norm;
    o.retained = rng.bernoulli(sigmoid(p.churn_intercept + p.churn_slope * o.satisfaction));
    return o;
}

double reward_from_outcome(const SessionOutcome& o, const RewardWeights& w) {
    return w.w_click * o.click_count + w.w_dwell * o.dwell_norm + w.w_retain * (o.retained ? 1.0 : 0.0);
}

}  // namespace adaptix
