#pragma once

#include <span>
#include <vector>

#include "adaptix/user_sim.hpp"

namespace adaptix {

// Fraction of sessions with at least one click. Throws InsufficientData when empty.
double compute_ctr(std::span<const SessionOutcome> outcomes);
// Clicks per shown component, a secondary per-impression rate.
double compute_impression_ctr(std::span<const SessionOutcome> outcomes);
// Fraction of session-end retention decisions that were "retained"; every
// session, including an episode's last, records one decision.
double compute_rr(std::span<const SessionOutcome> outcomes);

// sum_t gamma^t r_t
double discounted_return(std::span<const double> rewards, double gamma);

// out[e] = mean(values[max(0, e-window+1) .. e])
std::vector<double> moving_average(std::span<const double> values, int window = 100);

}  // namespace adaptix
