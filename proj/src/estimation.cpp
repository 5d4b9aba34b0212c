#include "expgsp/estimation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace expgsp {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

std::uint64_t absorb(std::uint64_t state, std::uint64_t word) {
    return mix64(state + 0x9E3779B97F4A7C15ULL + word * 0xD1342543DE82EF95ULL);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t phase, std::uint64_t step,
                       std::uint64_t bidder, std::uint64_t draw) {
    std::uint64_t h = absorb(seed, phase);
    h = absorb(h, step);
    h = absorb(h, bidder);
    h = absorb(h, draw);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return absorb(absorb(seed, a), b);
}

void ClickLog::write_csv(std::ostream& os) const {
    os << "phase,step,bidder_rank,slot,clicked,converted\n";
    for (const auto& e : events) {
        os << e.phase << ',' << e.step << ',' << e.rank << ',' << e.slot << ','
           << (e.clicked ? 1 : 0) << ',' << (e.converted ? 1 : 0) << '\n';
    }
}

ClickLog simulate_phases(const AuctionInstance& inst, const AllocationSchedule& schedule,
                         int phases, std::span<const double> conversion_rates,
                         std::uint64_t seed) {
    if (phases < 0) throw std::invalid_argument("simulate_phases: phases must be nonnegative");
    const int n_bidders = inst.num_bidders();
    if (!conversion_rates.empty() && static_cast<int>(conversion_rates.size()) != n_bidders)
        throw std::invalid_argument("simulate_phases: conversion rate per bidder required");
    for (double a : conversion_rates) {
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("simulate_phases: conversion rates must lie in [0,1]");
    }

    ClickLog log;
    log.phases = phases;
    log.steps = schedule.steps;
    log.bidders = n_bidders;
    log.clicks.assign(static_cast<size_t>(n_bidders), 0);
    log.conversions.assign(static_cast<size_t>(n_bidders), 0);
    log.events.reserve(static_cast<size_t>(phases) * static_cast<size_t>(schedule.steps) *
                       static_cast<size_t>(schedule.slots));

    for (int phase = 1; phase <= phases; ++phase) {
        for (int step = 1; step <= schedule.steps; ++step) {
            const auto& row = schedule.occupant[static_cast<size_t>(step) - 1];
            for (int slot = 1; slot <= schedule.slots; ++slot) {
                const int rank = row[static_cast<size_t>(slot) - 1];
                if (rank == 0 || rank > n_bidders) continue;
                const double p_click = inst.ctr(rank, slot);
                if (!(p_click >= 0.0 && p_click <= 1.0))
                    throw std::invalid_argument("simulate_phases: CTR outside [0,1]");
                const bool clicked =
                    counter_uniform(seed, static_cast<std::uint64_t>(phase),
                                    static_cast<std::uint64_t>(step),
                                    static_cast<std::uint64_t>(rank), 0) < p_click;
                bool converted = false;
                if (clicked && !conversion_rates.empty()) {
                    const double rate = conversion_rates[static_cast<size_t>(rank) - 1];
                    converted = counter_uniform(seed, static_cast<std::uint64_t>(phase),
                                                static_cast<std::uint64_t>(step),
                                                static_cast<std::uint64_t>(rank), 1) < rate;
                }
                log.events.push_back({phase, step, rank, slot, clicked, converted});
                if (clicked) ++log.clicks[static_cast<size_t>(rank) - 1];
                if (converted) ++log.conversions[static_cast<size_t>(rank) - 1];
            }
        }
    }
    return log;
}

double estimate_relevance(long long clicks, double theta, int phases) {
    if (!(theta > 0.0)) throw std::invalid_argument("estimate_relevance: theta must be positive");
    if (phases < 1) throw std::invalid_argument("estimate_relevance: phases must be positive");
    return static_cast<double>(clicks) / (static_cast<double>(phases) * theta);
}

double phase_bound(double delta, double eps, double theta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("phase_bound: delta must lie in (0,1)");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("phase_bound: eps must lie in (0,1)");
    if (!(theta > 0.0)) throw std::invalid_argument("phase_bound: theta must be positive");
    return 3.0 * std::log(2.0 / eps) / (delta * delta * theta);
}

int required_phases(double delta, double eps, double theta) {
    return static_cast<int>(std::ceil(phase_bound(delta, eps, theta)));
}

double confidence_radius(double theta, double eps, int phases) {
    if (!(theta > 0.0)) throw std::invalid_argument("confidence_radius: theta must be positive");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("confidence_radius: eps must lie in (0,1)");
    if (phases < 1) throw std::invalid_argument("confidence_radius: phases must be positive");
    return std::sqrt(3.0 * std::log(2.0 / eps) / (static_cast<double>(phases) * theta));
}

double estimate_valuation(int steps, int phases, long long clicks, long long conversions,
                          double impression_value, double click_value, double conversion_value,
                          double theta, double relevance_estimate) {
    if (!(theta > 0.0)) throw std::invalid_argument("estimate_valuation: theta must be positive");
    if (!(relevance_estimate > 0.0))
        throw std::invalid_argument("estimate_valuation: relevance estimate must be positive");
    if (phases < 1) throw std::invalid_argument("estimate_valuation: phases must be positive");
    const double numerator = static_cast<double>(phases) * steps * impression_value +
                             static_cast<double>(clicks) * click_value +
                             static_cast<double>(conversions) * conversion_value;
    return numerator / (static_cast<double>(phases) * theta * relevance_estimate);
}

std::vector<double> coverage_test(const AuctionInstance& inst, double delta, double eps,
                                  int trials, std::uint64_t seed) {
    if (trials < 0) throw std::invalid_argument("coverage_test: trials must be nonnegative");
    if (inst.model != CtrModel::separable)
        throw std::invalid_argument("coverage_test: separable CTR model required");
    const int n_bidders = inst.num_bidders();
    const auto schedule = build_schedule(n_bidders, inst.slots(), inst.explore.steps,
                                         inst.explore.explore_slots);
    const auto eff = effective_position_ctrs(inst.curve, inst.explore.steps,
                                             inst.explore.explore_slots);

    std::vector<double> rates(static_cast<size_t>(n_bidders), 0.0);
    if (trials == 0) return rates;  // degenerate by convention

    for (int rank = 1; rank <= n_bidders; ++rank) {
        const double theta = eff.theta(rank);
        if (!(theta > 0.0)) continue;  // never shown; nothing to estimate
        const double relevance = inst.bidders[static_cast<size_t>(rank) - 1].relevance;
        const int phases = required_phases(delta, eps, theta);

        // One phase's slot occupancy for this rank.
        std::vector<int> occupancy(static_cast<size_t>(schedule.slots) + 1, 0);
        for (int step = 1; step <= schedule.steps; ++step) {
            const int slot = schedule.slot_of(step, rank);
            if (slot > 0) ++occupancy[static_cast<size_t>(slot)];
        }

        int failures = 0;
        for (int trial = 1; trial <= trials; ++trial) {
            std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(rank),
                                            static_cast<std::uint64_t>(trial)));
            long long clicks = 0;
            for (int slot = 1; slot <= schedule.slots; ++slot) {
                const int count = occupancy[static_cast<size_t>(slot)];
                if (count == 0) continue;
                const double p = inst.ctr(rank, slot);
                std::binomial_distribution<long long> dist(
                    static_cast<long long>(phases) * count, p);
                clicks += dist(rng);
            }
            const double estimate = estimate_relevance(clicks, theta, phases);
            if (std::fabs(estimate - relevance) > delta) ++failures;
        }
        rates[static_cast<size_t>(rank) - 1] =
            static_cast<double>(failures) / static_cast<double>(trials);
    }
    return rates;
}

}  // namespace expgsp
