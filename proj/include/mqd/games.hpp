// Simple (coalition) games and the induced vote aggregation.
//
// A simple game is a monotone family of winning coalitions containing the
// grand coalition and excluding the empty one. It induces the boolean
// aggregation function that turns per-sensor stop declarations into the
// fusion center's common alarm.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mqd::games {

/// Coalition as a bitmask; bit i set means player i (0-based) is a member.
using Coalition = std::uint32_t;

struct AxiomViolation {
    int axiom = 0;          // 1: grand missing, 2: empty winning, 3: monotonicity
    Coalition subset = 0;   // for axiom 3, the losing superset's winning subset
    Coalition superset = 0;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<AxiomViolation> violations;
};

/// Checks the three simple-game axioms without constructing a game.
ValidationReport validate(int player_count,
                          const std::vector<Coalition>& winning);

/// Validated simple game; invalid families are unrepresentable.
class SimpleGame {
public:
    static constexpr int kMaxPlayers = 16;

    /// Throws std::invalid_argument when an axiom fails (see validate()).
    SimpleGame(int player_count, std::vector<Coalition> winning);

    int player_count() const { return player_count_; }
    Coalition grand_coalition() const {
        return static_cast<Coalition>((1u << player_count_) - 1u);
    }
    bool is_winning(Coalition c) const { return is_winning_[c]; }

    /// Sorted, deduplicated list of all winning coalitions.
    const std::vector<Coalition>& winning_coalitions() const { return winning_; }

private:
    int player_count_;
    std::vector<Coalition> winning_;
    std::vector<bool> is_winning_; // indexed by coalition mask
};

/// Aggregated decision: 1 iff the exact yes-voter set is a winning coalition.
bool aggregate(const SimpleGame& game, const std::vector<bool>& votes);

/// Mask form of aggregate() for hot paths.
inline bool aggregate_mask(const SimpleGame& game, Coalition yes_votes) {
    return game.is_winning(yes_votes);
}

/// (pi with player i's vote forced to 1, pi with it forced to 0).
std::pair<bool, bool> decompose_check(const SimpleGame& game, int i,
                                      const std::vector<bool>& votes);

/// Weighted voting game: coalitions whose total weight reaches the quota win.
SimpleGame make_weighted(const std::vector<long>& weights, long quota);

/// Pointwise aggregation of per-player event indicator vectors over a common
/// finite outcome set; realizes the set-valued counterpart of the vote rule.
std::vector<bool> event_aggregate(const SimpleGame& game,
                                  const std::vector<std::vector<bool>>& events);

} // namespace mqd::games
