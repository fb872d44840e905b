#include "mqd/chain.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "mqd/rng.hpp"

namespace mqd::chain {

namespace {
constexpr double kRowSumTol = 1e-12;
}

ObservationAlphabet::ObservationAlphabet(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
    if (symbols_.size() < 2) {
        throw std::invalid_argument("alphabet needs at least 2 symbols");
    }
    std::set<std::string_view> seen;
    for (const auto& s : symbols_) {
        if (!seen.insert(s).second) {
            throw std::invalid_argument("duplicate alphabet label: " + s);
        }
    }
}

std::optional<std::size_t> ObservationAlphabet::index_of(
    std::string_view label) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i] == label) return i;
    }
    return std::nullopt;
}

TransitionKernel::TransitionKernel(std::vector<std::vector<double>> rows)
    : size_(rows.size()) {
    if (size_ < 2) throw std::invalid_argument("kernel needs size >= 2");
    probs_.reserve(size_ * size_);
    for (const auto& row : rows) {
        if (row.size() != size_) {
            throw std::invalid_argument("kernel is not square");
        }
        double sum = 0.0;
        for (double p : row) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("kernel entry outside [0,1]");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            throw std::invalid_argument("kernel row does not sum to 1");
        }
        probs_.insert(probs_.end(), row.begin(), row.end());
    }
}

SensorModel::SensorModel(int id, ObservationAlphabet alphabet,
                         TransitionKernel pre, TransitionKernel post, double q,
                         std::size_t initial_state, int window_past,
                         int window_future)
    : id(id),
      alphabet(std::move(alphabet)),
      pre(std::move(pre)),
      post(std::move(post)),
      q(q),
      initial_state(initial_state),
      window_past(window_past),
      window_future(window_future) {
    const std::size_t s = this->alphabet.size();
    if (this->pre.size() != s || this->post.size() != s) {
        throw std::invalid_argument("kernel size does not match alphabet");
    }
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("q must lie strictly in (0,1)");
    }
    if (initial_state >= s) {
        throw std::invalid_argument("initial state outside alphabet");
    }
    if (window_past < 0 || window_future < 0) {
        throw std::invalid_argument("precision windows must be >= 0");
    }
}

double prior_pmf(const SensorModel& model, long j) {
    if (j < 1) {
        throw std::invalid_argument("theta prior is supported on {1,2,...}");
    }
    return std::pow(1.0 - model.q, static_cast<double>(j - 1)) * model.q;
}

double prior_cdf(const SensorModel& model, long j) {
    if (j < 0) throw std::invalid_argument("prior_cdf needs j >= 0");
    return 1.0 - std::pow(1.0 - model.q, static_cast<double>(j));
}

Trajectory sample_trajectory(const SensorModel& model, int horizon,
                             std::uint64_t seed) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    rng::Stream stream(seed);
    Trajectory traj;
    traj.theta = stream.geometric(model.q);
    traj.observations.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.observations.push_back(model.initial_state);
    std::size_t x = model.initial_state;
    for (int n = 1; n <= horizon; ++n) {
        const TransitionKernel& kernel = (traj.theta <= n) ? model.post : model.pre;
        x = stream.discrete(kernel.row(x));
        traj.observations.push_back(x);
    }
    return traj;
}

double path_probability(const SensorModel& model, long theta,
                        std::span<const std::size_t> observations) {
    if (theta < 1) throw std::invalid_argument("theta must be >= 1");
    if (observations.empty()) return 1.0;
    if (observations.front() != model.initial_state) {
        throw std::invalid_argument("path does not start at the initial state");
    }
    double prob = 1.0;
    for (std::size_t n = 1; n < observations.size(); ++n) {
        const TransitionKernel& kernel =
            (theta <= static_cast<long>(n)) ? model.post : model.pre;
        prob *= kernel(observations[n - 1], observations[n]);
    }
    return prob;
}

std::vector<double> marginal_step_law(const SensorModel& model, std::size_t x,
                                      double belief_change) {
    if (!(belief_change >= 0.0 && belief_change <= 1.0)) {
        throw std::invalid_argument("belief_change outside [0,1]");
    }
    std::span<const double> pre = model.pre.row(x);
    std::span<const double> post = model.post.row(x);
    std::vector<double> law(model.alphabet.size());
    for (std::size_t y = 0; y < law.size(); ++y) {
        law[y] = belief_change * post[y] + (1.0 - belief_change) * pre[y];
    }
    return law;
}

} // namespace mqd::chain
