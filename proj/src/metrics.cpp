#include "adaptix/metrics.hpp"

#include <algorithm>

#include "adaptix/errors.hpp"

namespace adaptix {

double compute_ctr(std::span<const SessionOutcome> outcomes) {
    if (outcomes.empty()) throw InsufficientData("compute_ctr: no sessions");
    std::size_t clicked = 0;
    for (const auto& o : outcomes)
        if (o.click_count >= 1) ++clicked;
    return static_cast<double>(clicked) / static_cast<double>(outcomes.size());
}

double compute_impression_ctr(std::span<const SessionOutcome> outcomes) {
    std::size_t shown = 0, clicks = 0;
    for (const auto& o : outcomes) {
        shown += o.clicks.size();
        clicks += static_cast<std::size_t>(o.click_count);
    }
    if (shown == 0) throw InsufficientData("compute_impression_ctr: no impressions");
    return static_cast<double>(clicks) / static_cast<double>(shown);
}

double compute_rr(std::span<const SessionOutcome> outcomes) {
    if (outcomes.empty()) throw InsufficientData("compute_rr: no retention decisions");
    std::size_t retained = 0;
    for (const auto& o : outcomes)
        if (o.retained) ++retained;
    return static_cast<double>(retained) / static_cast<double>(outcomes.size());
}

double discounted_return(std::span<const double> rewards, double gamma) {
    double total = 0.0;
    double discount = 1.0;
    for (double r : rewards) {
        total += discount * r;
        discount *= gamma;
    }
    return total;
}

std::vector<double> moving_average(std::span<const double> values, int window) {
    std::vector<double> out(values.size());
    for (std::size_t e = 0; e < values.size(); ++e) {
        const std::size_t lo = e + 1 >= static_cast<std::size_t>(window) ? e + 1 - window : 0;
        double sum = 0.0;
        for (std::size_t i = lo; i <= e; ++i) sum += values[i];
        out[e] = sum / static_cast<double>(e - lo + 1);
    }
    return out;
}

}  // namespace adaptix
