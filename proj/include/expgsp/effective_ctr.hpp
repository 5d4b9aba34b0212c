#pragma once

#include <span>
#include <vector>

#include "expgsp/mechanisms.hpp"
#include "expgsp/model.hpp"

namespace expgsp {

/// Effective position CTRs theta_1..theta_Ktil accumulated over the n steps
/// of one exploratory round, with Ktil = max(K, n). theta_m is the total
/// position CTR a rank-m bidder collects; zero beyond Ktil.
struct EffectiveCurve {
    int steps = 1;           // n
    int explore_slots = 0;   // L
    int slots = 0;           // K
    int effective_slots = 0; // Ktil = max(K, n)
    std::vector<double> thetas;       // size Ktil
    double explore_ctr = 0.0;         // sum of the top-L position CTRs
    std::vector<double> non_explore;  // d_m for m = 1..n

    /// 1-based; 0 beyond Ktil.
    double theta(int rank) const {
        return (rank >= 1 && rank <= effective_slots)
                   ? thetas[static_cast<size_t>(rank) - 1]
                   : 0.0;
    }
};

/// Per-bidder effective CTRs for the non-separable model: row i holds
/// ctil_{i,1}..ctil_{i,Ktil}, the clicks bidder i would accrue at each rank.
struct EffectiveCtrMatrix {
    int steps = 1;
    int explore_slots = 0;
    int slots = 0;
    int effective_slots = 0;
    std::vector<std::vector<double>> rows;   // bidders x Ktil
    std::vector<double> explore_ctrs;        // beta_i = sum of top-L entries of row i

    int bidders() const { return static_cast<int>(rows.size()); }

    /// 1-based (bidder, rank); 0 beyond Ktil.
    double at(int bidder, int rank) const {
        if (rank < 1 || rank > effective_slots) return 0.0;
        return rows[static_cast<size_t>(bidder) - 1][static_cast<size_t>(rank) - 1];
    }
};

/// Closed-form effective position CTRs. For explored ranks m <= n,
/// theta_m = explore_ctr + d_m with d_m given by the cyclic-rotation count of
/// steps spent in each non-explore slot; for m > n, theta_m = n * gamma_m.
/// Position CTRs beyond K count as zero inside every branch sum.
EffectiveCurve effective_position_ctrs(const PositionCurve& curve, int steps, int explore_slots);

/// First differences theta_j - theta_{j+1} for j = 1..Ktil, evaluated by the
/// closed piecewise form rather than subtraction.
std::vector<double> theta_differences(const PositionCurve& curve, int steps, int explore_slots);

/// Non-separable analogue of effective_position_ctrs, applied row by row.
EffectiveCtrMatrix effective_ctr_matrix(const CtrMatrix& ctrs, int steps, int explore_slots);

/// True iff strictly decreasing with margin > tol and the last entry > tol.
bool check_monotone(std::span<const double> values, double tol);

/// Brute-force oracle: walks the schedule and sums the position CTR of every
/// slot each rank occupies. Independent of the closed forms above.
std::vector<double> schedule_oracle_effective_ctrs(const AllocationSchedule& schedule,
                                                   const PositionCurve& curve);

/// Matrix oracle: entry (i, m) sums bidder i's CTR over the slots that rank m
/// occupies across the steps.
std::vector<std::vector<double>> schedule_oracle_effective_ctrs(const AllocationSchedule& schedule,
                                                                const CtrMatrix& ctrs);

}  // namespace expgsp
