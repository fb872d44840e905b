#include "mqd/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mqd::belief {

WindowedPosterior initial_belief(const chain::SensorModel& model) {
    WindowedPosterior b;
    b.at.assign(static_cast<std::size_t>(model.window_past) + 1, 0.0);
    b.past_tail = 0.0;
    b.time = 0;
    return b;
}

WindowedPosterior update(const chain::SensorModel& model,
                         const WindowedPosterior& b, std::size_t x_prev,
                         std::size_t x_new) {
    if (b.at.size() != static_cast<std::size_t>(model.window_past) + 1) {
        throw std::invalid_argument("belief window does not match the model");
    }
    // The sum may carry rounding dust a hair above 1.
    const double cum = std::min(1.0, b.cumulative());
    const double post_lik = model.post(x_prev, x_new);
    const double pre_lik = model.pre(x_prev, x_new);

    const double change_mass = cum + (1.0 - cum) * model.q;
    const double normalizer =
        change_mass * post_lik + (1.0 - change_mass) * pre_lik;
    if (normalizer <= 0.0) {
        throw std::domain_error(
            "observation impossible under both regimes (zero normalizer)");
    }

    WindowedPosterior next;
    next.at.resize(b.at.size());
    next.time = b.time + 1;
    const double scale = post_lik / normalizer;
    next.at[0] = (1.0 - cum) * model.q * scale;
    for (std::size_t k = 1; k < next.at.size(); ++k) {
        next.at[k] = b.at[k - 1] * scale;
    }
    next.past_tail = (b.at.back() + b.past_tail) * scale;
    return next;
}

double payoff_of(const chain::SensorModel& model, const WindowedPosterior& b) {
    double window = 0.0;
    for (double v : b.at) window += v;
    const double cum = std::min(1.0, window + b.past_tail);
    const double future =
        (1.0 - cum) *
        (1.0 - std::pow(1.0 - model.q, static_cast<double>(model.window_future)));
    return std::clamp(window + future, 0.0, 1.0);
}

double predictive_change_mass(const chain::SensorModel& model,
                              const WindowedPosterior& b) {
    const double cum = std::min(1.0, b.cumulative());
    return cum + (1.0 - cum) * model.q;
}

} // namespace mqd::belief
