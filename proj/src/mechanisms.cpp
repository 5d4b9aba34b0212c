#include "expgsp/mechanisms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "expgsp/effective_ctr.hpp"

namespace expgsp {

int AllocationSchedule::slot_of(int step, int rank) const {
    const auto& row = occupant[static_cast<size_t>(step) - 1];
    for (int j = 0; j < static_cast<int>(row.size()); ++j) {
        if (row[static_cast<size_t>(j)] == rank) return j + 1;
    }
    return 0;
}

std::vector<int> rank_bidders(std::span<const double> bids, std::span<const double> weights) {
    if (bids.size() != weights.size())
        throw std::invalid_argument("rank_bidders: bids and weights must have equal length");
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("rank_bidders: weights must be positive");
    }
    std::vector<int> order(bids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double sa = weights[static_cast<size_t>(a)] * bids[static_cast<size_t>(a)];
        const double sb = weights[static_cast<size_t>(b)] * bids[static_cast<size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });
    return order;
}

AllocationSchedule build_schedule(int bidders, int slots, int steps, int explore_slots) {
    if (bidders < 1) throw std::invalid_argument("build_schedule: need at least one bidder");
    if (slots < 1) throw std::invalid_argument("build_schedule: need at least one slot");
    if (steps < 1 || steps > bidders)
        throw std::invalid_argument("build_schedule: steps must lie in [1, bidders]");
    if (explore_slots < 0 || explore_slots > std::min(slots, steps))
        throw std::invalid_argument(
            "build_schedule: explore slots must lie in [0, min(slots, steps)]");

    AllocationSchedule sched;
    sched.steps = steps;
    sched.slots = slots;
    sched.explore_slots = explore_slots;
    sched.occupant.assign(static_cast<size_t>(steps), std::vector<int>(static_cast<size_t>(slots), 0));
    sched.explore_active.resize(static_cast<size_t>(steps));

    std::vector<char> active(static_cast<size_t>(bidders) + 1, 0);
    for (int t = 1; t <= steps; ++t) {
        auto& row = sched.occupant[static_cast<size_t>(t) - 1];
        auto& act = sched.explore_active[static_cast<size_t>(t) - 1];
        std::fill(active.begin(), active.end(), 0);

        // Left rotation by t-1: explore position p holds rank ((p-1 + t-1) mod n) + 1.
        for (int p = 1; p <= explore_slots; ++p) {
            const int rank = (p - 1 + t - 1) % steps + 1;
            row[static_cast<size_t>(p) - 1] = rank;
            active[static_cast<size_t>(rank)] = 1;
            act.push_back(rank);
        }
        std::sort(act.begin(), act.end());

        int slot = explore_slots + 1;
        for (int rank = 1; rank <= bidders && slot <= slots; ++rank) {
            if (active[static_cast<size_t>(rank)]) continue;
            row[static_cast<size_t>(slot) - 1] = rank;
            ++slot;
        }
    }
    return sched;
}

std::vector<double> gsp_prices(std::span<const double> ranked_bids,
                               std::span<const double> ranked_weights) {
    if (ranked_bids.size() != ranked_weights.size())
        throw std::invalid_argument("gsp_prices: bids and weights must have equal length");
    for (double w : ranked_weights) {
        if (!(w > 0.0)) throw std::invalid_argument("gsp_prices: weights must be positive");
    }
    std::vector<double> prices(ranked_bids.size(), 0.0);
    for (size_t i = 0; i + 1 < ranked_bids.size(); ++i) {
        prices[i] = ranked_weights[i + 1] * ranked_bids[i + 1] / ranked_weights[i];
    }
    return prices;
}

std::vector<double> laddered_prices(const EffectiveCtrMatrix& eff,
                                    std::span<const double> ranked_weights,
                                    std::span<const double> ranked_bids) {
    if (ranked_bids.size() != ranked_weights.size())
        throw std::invalid_argument("laddered_prices: bids and weights must have equal length");
    const int bidders = static_cast<int>(ranked_bids.size());
    if (eff.bidders() < bidders)
        throw std::invalid_argument("laddered_prices: effective CTR matrix is missing rows");
    for (double w : ranked_weights) {
        if (!(w > 0.0)) throw std::invalid_argument("laddered_prices: weights must be positive");
    }

    const int k_til = eff.effective_slots;
    std::vector<double> prices(static_cast<size_t>(bidders), 0.0);
    for (int i = 1; i <= std::min(bidders, k_til); ++i) {
        const double own = eff.at(i, i);
        if (!(own > 0.0))
            throw std::invalid_argument("laddered_prices: zero effective CTR at own rank");
        double total = 0.0;
        for (int j = i; j <= k_til; ++j) {
            const double diff = eff.at(i, j) - eff.at(i, j + 1);
            const double next_score = (j + 1 <= bidders)
                                          ? ranked_weights[static_cast<size_t>(j)] *
                                                ranked_bids[static_cast<size_t>(j)]
                                          : 0.0;
            total += diff * next_score;
        }
        prices[static_cast<size_t>(i) - 1] =
            total / (own * ranked_weights[static_cast<size_t>(i) - 1]);
    }
    return prices;
}

}  // namespace expgsp
