#include "mqd/games.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mqd::games {

namespace {

std::string coalition_to_string(Coalition c, int player_count) {
    std::string out = "{";
    bool first = true;
    for (int i = 0; i < player_count; ++i) {
        if (c & (1u << i)) {
            if (!first) out += ",";
            out += std::to_string(i + 1);
            first = false;
        }
    }
    return out + "}";
}

Coalition votes_to_mask(const std::vector<bool>& votes) {
    Coalition mask = 0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        if (votes[i]) mask |= (1u << i);
    }
    return mask;
}

} // namespace

ValidationReport validate(int player_count,
                          const std::vector<Coalition>& winning) {
    ValidationReport report;
    if (player_count < 1 || player_count > SimpleGame::kMaxPlayers) {
        report.ok = false;
        report.violations.push_back(
            {0, 0, 0,
             "player count must lie in [1," +
                 std::to_string(SimpleGame::kMaxPlayers) + "]"});
        return report;
    }
    const Coalition grand = static_cast<Coalition>((1u << player_count) - 1u);
    std::vector<bool> is_winning(std::size_t{1} << player_count, false);
    for (Coalition c : winning) {
        if (c > grand) {
            report.ok = false;
            report.violations.push_back(
                {0, c, 0, "coalition references a player outside the game"});
            return report;
        }
        is_winning[c] = true;
    }
    if (!is_winning[grand]) {
        report.ok = false;
        report.violations.push_back(
            {1, grand, grand, "axiom 1: the grand coalition must be winning"});
    }
    if (is_winning[0]) {
        report.ok = false;
        report.violations.push_back(
            {2, 0, 0, "axiom 2: the empty coalition must be losing"});
    }
    // Monotonicity: adding one player to a winning coalition must keep it
    // winning. Report the pair T subset of S with T winning, S losing.
    for (Coalition c = 0; c <= grand; ++c) {
        if (!is_winning[c]) continue;
        for (int i = 0; i < player_count; ++i) {
            const Coalition super = c | (1u << i);
            if (super != c && !is_winning[super]) {
                report.ok = false;
                report.violations.push_back(
                    {3, c, super,
                     "axiom 3: " + coalition_to_string(c, player_count) +
                         " wins but superset " +
                         coalition_to_string(super, player_count) + " loses"});
            }
        }
    }
    return report;
}

SimpleGame::SimpleGame(int player_count, std::vector<Coalition> winning)
    : player_count_(player_count) {
    ValidationReport report = validate(player_count, winning);
    if (!report.ok) {
        throw std::invalid_argument("invalid simple game: " +
                                    report.violations.front().message);
    }
    is_winning_.assign(std::size_t{1} << player_count, false);
    for (Coalition c : winning) is_winning_[c] = true;
    winning_.clear();
    for (Coalition c = 0; c < is_winning_.size(); ++c) {
        if (is_winning_[c]) winning_.push_back(c);
    }
}

bool aggregate(const SimpleGame& game, const std::vector<bool>& votes) {
    if (votes.size() != static_cast<std::size_t>(game.player_count())) {
        throw std::invalid_argument("vote vector length mismatch");
    }
    return game.is_winning(votes_to_mask(votes));
}

std::pair<bool, bool> decompose_check(const SimpleGame& game, int i,
                                      const std::vector<bool>& votes) {
    if (i < 0 || i >= game.player_count()) {
        throw std::invalid_argument("player index out of range");
    }
    if (votes.size() != static_cast<std::size_t>(game.player_count())) {
        throw std::invalid_argument("vote vector length mismatch");
    }
    const Coalition mask = votes_to_mask(votes);
    const Coalition bit = 1u << i;
    return {game.is_winning(mask | bit), game.is_winning(mask & ~bit)};
}

SimpleGame make_weighted(const std::vector<long>& weights, long quota) {
    const int p = static_cast<int>(weights.size());
    if (p < 1 || p > SimpleGame::kMaxPlayers) {
        throw std::invalid_argument("weighted game needs 1..16 players");
    }
    long total = 0;
    for (long w : weights) {
        if (w < 0) throw std::invalid_argument("weights must be nonnegative");
        total += w;
    }
    if (quota < 1 || total < quota) {
        throw std::invalid_argument("quota unattainable for these weights");
    }
    std::vector<Coalition> winning;
    const Coalition grand = static_cast<Coalition>((1u << p) - 1u);
    for (Coalition c = 1; c <= grand; ++c) {
        long weight = 0;
        for (int i = 0; i < p; ++i) {
            if (c & (1u << i)) weight += weights[i];
        }
        if (weight >= quota) winning.push_back(c);
    }
    return SimpleGame(p, std::move(winning));
}

std::vector<bool> event_aggregate(
    const SimpleGame& game, const std::vector<std::vector<bool>>& events) {
    if (events.size() != static_cast<std::size_t>(game.player_count())) {
        throw std::invalid_argument("one event vector per player required");
    }
    const std::size_t outcomes = events.empty() ? 0 : events.front().size();
    for (const auto& e : events) {
        if (e.size() != outcomes) {
            throw std::invalid_argument("event vector length mismatch");
        }
    }
    std::vector<bool> result(outcomes);
    for (std::size_t w = 0; w < outcomes; ++w) {
        Coalition yes = 0;
        for (int i = 0; i < game.player_count(); ++i) {
            if (events[static_cast<std::size_t>(i)][w]) yes |= (1u << i);
        }
        result[w] = game.is_winning(yes);
    }
    return result;
}

} // namespace mqd::games
