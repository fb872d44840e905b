// Finite-alphabet Markov signal models with a single disorder time.
//
// A sensor observes a Markov chain that switches from a pre-change to a
// post-change transition kernel at an unobserved geometric time theta.
// The post-change path continues from the last pre-change state.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mqd::chain {

/// Ordered finite set of observation labels (size >= 2, labels unique).
class ObservationAlphabet {
public:
    explicit ObservationAlphabet(std::vector<std::string> symbols);

    std::size_t size() const { return symbols_.size(); }
    const std::string& label(std::size_t i) const { return symbols_.at(i); }
    const std::vector<std::string>& labels() const { return symbols_; }
    std::optional<std::size_t> index_of(std::string_view label) const;

private:
    std::vector<std::string> symbols_;
};

/// Row-stochastic transition matrix over symbol indices.
class TransitionKernel {
public:
    /// Validates entries in [0,1] and row sums within 1e-12 of 1.
    explicit TransitionKernel(std::vector<std::vector<double>> rows);

    std::size_t size() const { return size_; }
    double operator()(std::size_t from, std::size_t to) const {
        return probs_[from * size_ + to];
    }
    std::span<const double> row(std::size_t from) const {
        return {probs_.data() + from * size_, size_};
    }

private:
    std::size_t size_;
    std::vector<double> probs_; // row-major
};

/// One sensor: two regimes, geometric change-time prior, precision window.
///
/// window_past (d1) and window_future (d2) bound how far the realized change
/// time may lie behind or ahead of the alarm for the alarm to count as a hit;
/// the two sides are independent so early and late precision can differ.
struct SensorModel {
    SensorModel(int id, ObservationAlphabet alphabet, TransitionKernel pre,
                TransitionKernel post, double q, std::size_t initial_state,
                int window_past, int window_future);

    int id;
    ObservationAlphabet alphabet;
    TransitionKernel pre;  // regime before the change
    TransitionKernel post; // regime from the change onward
    double q;              // per-step change probability, in (0,1)
    std::size_t initial_state;
    int window_past;   // d1 >= 0
    int window_future; // d2 >= 0
};

/// Realized change time plus observed path X_0..X_N.
struct Trajectory {
    long theta = 0;
    std::vector<std::size_t> observations;
};

/// P(theta = j) = (1-q)^{j-1} q. Rejects j < 1.
double prior_pmf(const SensorModel& model, long j);

/// P(theta <= j) = 1 - (1-q)^j for j >= 0.
double prior_cdf(const SensorModel& model, long j);

/// Samples theta from the prior and a path of horizon+1 symbols starting at
/// the model's initial state. Deterministic given the seed.
Trajectory sample_trajectory(const SensorModel& model, int horizon,
                             std::uint64_t seed);

/// Exact probability of the observation path conditional on theta.
/// The path must start at the model's initial state; an empty path or the
/// bare initial state has probability 1.
double path_probability(const SensorModel& model, long theta,
                        std::span<const std::size_t> observations);

/// One-step predictive law from symbol x when the change is active at the
/// next step with probability belief_change:
///   belief_change * post(x,.) + (1 - belief_change) * pre(x,.)
std::vector<double> marginal_step_law(const SensorModel& model, std::size_t x,
                                      double belief_change);

} // namespace mqd::chain
