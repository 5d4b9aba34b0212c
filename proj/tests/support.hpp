#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "expgsp/effective_ctr.hpp"
#include "expgsp/mechanisms.hpp"
#include "expgsp/model.hpp"

namespace testsupport {

// Strictly decreasing values in (0,1]: random positive gaps, suffix-summed
// and scaled so the top entry lands in (0.5, 1].
inline std::vector<double> random_decreasing_probs(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> gap(0.05, 1.0);
    std::uniform_real_distribution<double> top(0.5, 1.0);
    std::vector<double> gaps(static_cast<size_t>(count));
    double total = 0.0;
    for (auto& g : gaps) {
        g = gap(rng);
        total += g;
    }
    const double scale = top(rng) / total;
    std::vector<double> out(static_cast<size_t>(count));
    double suffix = 0.0;
    for (int j = count - 1; j >= 0; --j) {
        suffix += gaps[static_cast<size_t>(j)];
        out[static_cast<size_t>(j)] = suffix * scale;
    }
    return out;
}

struct Config {
    int slots;    // K
    int steps;    // n
    int explore;  // L
};

// Uniformly samples configurations satisfying the monotonicity hypotheses:
// n <= min(K+1, K+L) and 2L <= n-1.
inline Config random_safe_config(std::mt19937_64& rng, int max_slots = 10) {
    std::uniform_int_distribution<int> slot_dist(1, max_slots);
    for (;;) {
        const int slots = slot_dist(rng);
        std::uniform_int_distribution<int> explore_dist(0, std::min(slots, 4));
        const int explore = explore_dist(rng);
        const int lo = (explore == 0) ? 1 : 2 * explore + 1;
        const int hi = (explore == 0) ? slots : slots + 1;
        if (lo > hi) continue;
        std::uniform_int_distribution<int> step_dist(lo, hi);
        return {slots, step_dist(rng), explore};
    }
}

enum class Ordering { none, by_quality_value, by_relevance_value };

inline expgsp::AuctionInstance random_instance(std::mt19937_64& rng, const Config& cfg,
                                               Ordering ordering, int extra_bidders = 0) {
    const int n_bidders = std::max(cfg.slots, cfg.steps) + extra_bidders;
    std::uniform_real_distribution<double> value(0.1, 20.0);
    std::uniform_real_distribution<double> relevance(0.05, 1.0);
    std::uniform_real_distribution<double> quality(0.2, 1.5);

    expgsp::AuctionInstance inst;
    inst.curve = expgsp::PositionCurve(random_decreasing_probs(rng, cfg.slots));
    inst.explore = {cfg.steps, cfg.explore};
    for (int i = 0; i < n_bidders; ++i) {
        expgsp::Bidder b;
        b.id = i + 1;
        b.value = value(rng);
        b.relevance = relevance(rng);
        b.quality = quality(rng);
        b.self_estimate = relevance(rng);
        inst.bidders.push_back(b);
    }
    if (ordering == Ordering::by_quality_value) {
        std::sort(inst.bidders.begin(), inst.bidders.end(),
                  [](const auto& a, const auto& b) { return a.quality * a.value > b.quality * b.value; });
    } else if (ordering == Ordering::by_relevance_value) {
        std::sort(inst.bidders.begin(), inst.bidders.end(), [](const auto& a, const auto& b) {
            return a.relevance * a.value > b.relevance * b.value;
        });
    }
    return inst;
}

inline expgsp::CtrMatrix random_ctr_matrix(std::mt19937_64& rng, int bidders, int slots) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<size_t>(bidders));
    for (int i = 0; i < bidders; ++i) rows.push_back(random_decreasing_probs(rng, slots));
    return expgsp::CtrMatrix(std::move(rows));
}

// Expected profit of one bidder under the exploratory truthful rule when she
// bids `bid` and everyone else bids their value. Re-ranks from scratch, so
// deviations that change the allocation are priced correctly.
inline double exp_laddered_utility(const expgsp::PositionCurve& curve,
                                   const std::vector<double>& relevances,
                                   const std::vector<double>& qualities,
                                   const std::vector<double>& values, int steps,
                                   int explore_slots, int bidder, double bid) {
    const int n_bidders = static_cast<int>(values.size());
    std::vector<double> bids = values;
    bids[static_cast<size_t>(bidder)] = bid;
    const std::vector<int> order = expgsp::rank_bidders(bids, qualities);

    int rank = 0;
    for (int r = 0; r < n_bidders; ++r) {
        if (order[static_cast<size_t>(r)] == bidder) {
            rank = r + 1;
            break;
        }
    }

    const auto eff = expgsp::effective_position_ctrs(curve, steps, explore_slots);
    double payment = 0.0;  // quality-weighted total below this bidder
    for (int j = rank; j <= eff.effective_slots; ++j) {
        const double next = (j + 1 <= n_bidders)
                                ? qualities[static_cast<size_t>(order[static_cast<size_t>(j)])] *
                                      bids[static_cast<size_t>(order[static_cast<size_t>(j)])]
                                : 0.0;
        payment += (eff.theta(j) - eff.theta(j + 1)) * next;
    }
    const double e = relevances[static_cast<size_t>(bidder)];
    return e * eff.theta(rank) * values[static_cast<size_t>(bidder)] -
           e * payment / qualities[static_cast<size_t>(bidder)];
}

}  // namespace testsupport
