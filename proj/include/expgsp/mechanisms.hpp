#pragma once

#include <span>
#include <vector>

#include "expgsp/model.hpp"

namespace expgsp {

struct EffectiveCtrMatrix;

/// Who sits where during the n steps of one exploratory round.
/// `occupant[t-1][j-1]` is the rank (1-based) in slot j at step t, or 0 when
/// the slot is unfilled. Ranks 1..n cycle through the explore slots so that
/// each visits each of the top L slots exactly once.
struct AllocationSchedule {
    int steps = 0;          // n
    int slots = 0;          // K
    int explore_slots = 0;  // L
    std::vector<std::vector<int>> occupant;
    std::vector<std::vector<int>> explore_active;  // per step, ascending ranks

    /// Slot held by `rank` at `step` (both 1-based); 0 when unassigned.
    int slot_of(int step, int rank) const;
};

/// Rank-by-weighted-bid permutation: indices (0-based) sorted by
/// weight * bid descending, ties broken by the smaller original index.
/// Throws std::invalid_argument on nonpositive weights or size mismatch.
std::vector<int> rank_bidders(std::span<const double> bids, std::span<const double> weights);

/// Builds the cyclic explore/non-explore assignment. Step t rotates the
/// ordering of ranks 1..n left by t-1 and places its first L entries in the
/// explore slots; everyone else fills slots L+1..K in ascending rank order.
/// Requires 1 <= steps <= bidders and 0 <= explore_slots <= min(slots, steps).
AllocationSchedule build_schedule(int bidders, int slots, int steps, int explore_slots);

/// Next-bidder pricing: p_i = w_{i+1} b_{i+1} / w_i, zero for the last rank.
/// Inputs must already be in rank order.
std::vector<double> gsp_prices(std::span<const double> ranked_bids,
                               std::span<const double> ranked_weights);

/// Truthful telescoping prices over effective CTRs:
///   p_i = sum_{j=i}^{Ktil} (ctil_{i,j} - ctil_{i,j+1}) w_{j+1} b_{j+1} / (ctil_{i,i} w_i)
/// with b = 0 past the last bidder and p_i = 0 for ranks beyond Ktil.
/// With the one-step effective matrix this is the plain laddered auction.
std::vector<double> laddered_prices(const EffectiveCtrMatrix& eff,
                                    std::span<const double> ranked_weights,
                                    std::span<const double> ranked_bids);

}  // namespace expgsp
