#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "expgsp/effective_ctr.hpp"
#include "expgsp/mechanisms.hpp"
#include "expgsp/model.hpp"

namespace expgsp {

/// Stateless counter-based uniform draw: the same (seed, indices) always
/// yields the same value, independent of evaluation order, so phases can run
/// in parallel and still aggregate deterministically.
double counter_uniform(std::uint64_t seed, std::uint64_t phase, std::uint64_t step,
                       std::uint64_t bidder, std::uint64_t draw);

/// Derives an independent 64-bit stream seed from a base seed and up to two
/// indices (used to seed per-trial engines).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

struct ClickEvent {
    int phase = 0;   // 1-based
    int step = 0;    // 1-based within the phase
    int rank = 0;    // bidder rank occupying the slot
    int slot = 0;    // 1-based
    bool clicked = false;
    bool converted = false;
};

/// Raw click/conversion outcomes over l phases of the n-step mechanism,
/// plus per-rank totals. Conversions imply clicks.
struct ClickLog {
    int phases = 0;
    int steps = 0;    // n
    int bidders = 0;  // N
    std::vector<ClickEvent> events;
    std::vector<long long> clicks;       // M_i per rank
    std::vector<long long> conversions;  // Q_i per rank

    /// CSV with header: phase,step,bidder_rank,slot,clicked,converted.
    void write_csv(std::ostream& os) const;
};

/// Bernoulli simulation of every impression in the schedule, repeated for
/// `phases` rounds. A bidder in slot j clicks with her (possibly
/// non-separable) CTR there and converts with her conversion rate given a
/// click. Deterministic given the seed.
ClickLog simulate_phases(const AuctionInstance& inst, const AllocationSchedule& schedule,
                         int phases, std::span<const double> conversion_rates,
                         std::uint64_t seed);

/// Relevance estimate from click counts: clicks / (phases * theta).
double estimate_relevance(long long clicks, double theta, int phases);

/// Required phase count before the raw bound is rounded up.
double phase_bound(double delta, double eps, double theta);

/// Phases needed to estimate relevance within `delta` with probability
/// 1 - eps: ceil(3 ln(2/eps) / (delta^2 theta)).
int required_phases(double delta, double eps, double theta);

/// Additive half-width of the relevance estimate at confidence 1 - eps after
/// l phases: sqrt(3 ln(2/eps) / (l * theta)).
double confidence_radius(double theta, double eps, int phases);

/// Per-click value estimate from impression, click and conversion values:
/// (l n x_impression + M x_click + Q x_conversion) / (l theta f).
double estimate_valuation(int steps, int phases, long long clicks, long long conversions,
                          double impression_value, double click_value, double conversion_value,
                          double theta, double relevance_estimate);

/// Empirical check of the phase-count guarantee: for each ranked bidder with
/// a positive effective CTR, runs `trials` independent estimations at
/// l = required_phases(delta, eps, theta_i) and reports the fraction with
/// |estimate - relevance| > delta (zero rate for trials == 0). Uses binomial
/// draws per (slot, occupancy) rather than per-impression Bernoullis.
std::vector<double> coverage_test(const AuctionInstance& inst, double delta, double eps,
                                  int trials, std::uint64_t seed);

}  // namespace expgsp
