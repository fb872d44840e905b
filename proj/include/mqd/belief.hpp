// Exact recursive filtering of the disorder time.
//
// The filter tracks the posterior distribution of theta over the recent
// window {n-d1, ..., n} entry by entry, plus the lumped mass of older change
// times. Together with the current symbol this is a sufficient statistic for
// the detection payoff, so solvers never need the raw observation history.
#pragma once

#include <vector>

#include "mqd/chain.hpp"

namespace mqd::belief {

/// Windowed posterior of theta at time n.
///
/// at[k]     = P(theta = n-k | F_n) for k = 0..d1
/// past_tail = P(theta <= n-d1-1 | F_n)
/// cumulative() is the classical posterior P(theta <= n | F_n).
struct WindowedPosterior {
    std::vector<double> at;
    double past_tail = 0.0;
    long time = 0;

    double cumulative() const {
        double sum = past_tail;
        for (double v : at) sum += v;
        return sum;
    }
};

/// Zero belief at time 0 (the change cannot have happened yet).
WindowedPosterior initial_belief(const chain::SensorModel& model);

/// One Bayes step after observing the transition x_prev -> x_new.
///
/// The change-mass branches are weighted by the post kernel, the no-change
/// branch by the pre kernel; window entries shift one slot and the overflow
/// joins past_tail. Throws std::domain_error if the observation is impossible
/// under both regimes (zero normalizer).
WindowedPosterior update(const chain::SensorModel& model,
                         const WindowedPosterior& b, std::size_t x_prev,
                         std::size_t x_new);

/// Conditional success probability of stopping now:
///   P(n-d1 <= theta <= n+d2 | F_n)
///     = sum_k at[k] + (1 - cumulative) * (1 - (1-q)^{d2}).
double payoff_of(const chain::SensorModel& model, const WindowedPosterior& b);

/// P(theta <= n+1 | F_n) = cumulative + (1 - cumulative) * q; the mixing
/// weight for the one-step predictive law.
double predictive_change_mass(const chain::SensorModel& model,
                              const WindowedPosterior& b);

} // namespace mqd::belief
