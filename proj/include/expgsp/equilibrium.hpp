#pragma once

#include <span>
#include <vector>

#include "expgsp/effective_ctr.hpp"
#include "expgsp/model.hpp"

namespace expgsp {

struct BidProfile {
    enum class Flavor { min_sne, max_sne, explicit_bids };
    std::vector<double> bids;
    Flavor flavor = Flavor::explicit_bids;
};

/// Smallest bid profile consistent with the locally envy-free conditions:
/// theta_i q_{i+1} b_{i+1} = sum_{j=i}^{Ktil} (theta_j - theta_{j+1}) v_{j+1} q_{j+1},
/// solved by back-substitution from the bottom rank. b_1 is unconstrained and
/// set to v_1; bidders whose next rank is past Ktil bid their value.
/// Missing bidders beyond N contribute v = 0. `values` may equally be the
/// bidders' own value estimates; the construction is unchanged.
BidProfile min_sne_bids(const EffectiveCurve& eff, std::span<const double> values,
                        std::span<const double> qualities);

/// Largest such profile: each term uses v_j q_j instead of v_{j+1} q_{j+1}.
BidProfile max_sne_bids(const EffectiveCurve& eff, std::span<const double> values,
                        std::span<const double> qualities);

/// True iff for every rank i the two-sided envy-free chain
///   (theta_i - theta_{i+1}) v_{i+1} q_{i+1} + theta_{i+1} q_{i+2} b_{i+2}
///     <= theta_i q_{i+1} b_{i+1}
///     <= (theta_i - theta_{i+1}) v_i q_i + theta_{i+1} q_{i+2} b_{i+2}
/// holds within additive tolerance tol.
bool verify_sne(std::span<const double> bids, const EffectiveCurve& eff,
                std::span<const double> values, std::span<const double> qualities, double tol);

/// Expected revenue over one round at the minimum envy-free profile:
///   sum_s (e_s/q_s) sum_{j=s}^{Ktil} (theta_j - theta_{j+1}) q_{j+1} v_{j+1}.
/// Pass the one-step curve for the no-exploration baseline.
double expected_revenue(const EffectiveCurve& eff, std::span<const double> relevances,
                        std::span<const double> qualities, std::span<const double> values);

/// Same double sum with the outer index truncated to the top `top` ranks
/// (inner sum still runs to Ktil): the revenue collected from those bidders.
double expected_revenue_top(const EffectiveCurve& eff, std::span<const double> relevances,
                            std::span<const double> qualities, std::span<const double> values,
                            int top);

/// Revenue at an explicit bid vector: sum_i theta_i e_i q_{i+1} b_{i+1} / q_i.
double revenue_at_bids(const EffectiveCurve& eff, std::span<const double> relevances,
                       std::span<const double> qualities, std::span<const double> bids);

/// Revenue of the truthful telescoping rule at explicit bids:
///   sum_i sum_{j=i}^{Ktil} (ctil_{i,j} - ctil_{i,j+1}) w_{j+1} b_{j+1} / w_i.
double laddered_revenue(const EffectiveCtrMatrix& eff, std::span<const double> ranked_weights,
                        std::span<const double> ranked_bids);

/// Relative per-impression revenue loss of exploration:
/// (baseline - explored / steps) / baseline. May be negative; not clamped.
/// Throws std::domain_error when the baseline revenue is not positive.
double cost_of_uncertainty(double baseline_revenue, double explored_revenue, int steps);

struct RevenueBound {
    double ratio_constant = 0.0;  // c; +infinity when the range is empty
    double coarse = 0.0;          // 1 - min(1,c) (1 - 2L/n)
    double refined = 0.0;         // coarse * top_revenue / total_revenue
};

/// Upper bound on the cost of uncertainty. `top_revenue` is the baseline
/// revenue from the top min(steps, K) bidders and `total_revenue` the full
/// baseline revenue; ratios with a zero one-step difference (slots past K)
/// are excluded from the minimum.
RevenueBound cou_bound(const PositionCurve& curve, int steps, int explore_slots,
                       double top_revenue, double total_revenue);

/// Analogue for the truthful rule with non-separable CTRs:
///   c = min_{i <= min(steps,K)} min_{i <= j < steps-L} row ratio.
/// Only the coarse bound exists; `refined` mirrors it.
RevenueBound cou_bound_truthful(const CtrMatrix& ctrs, int steps, int explore_slots);

/// Total realized value sum theta_m e_m v_m (with the one-step curve this is
/// the no-exploration baseline sum gamma_m e_m v_m).
double efficiency(const EffectiveCurve& eff, std::span<const double> relevances,
                  std::span<const double> values);

/// Slot-indexed rearrangement weights: efficiency == sum_m gamma_m y_m.
/// y_m counts how much relevance-weighted value flows through slot m over
/// the n steps.
std::vector<double> y_decomposition(const PositionCurve& curve, std::span<const double> relevances,
                                    std::span<const double> values, int steps, int explore_slots);

struct EfficiencyBound {
    double general = 0.0;   // (1-beta) Ee/E0 + eta Ene/E0
    double ordered = 0.0;   // (1-alpha) Ee/E0 - (L/n) omega Ene/E0; needs ordered e*v
    bool ordered_applicable = false;
    double alpha = 0.0;
    double beta = 0.0;
    double eta = 0.0;
    double omega = 0.0;
    double explore_value = 0.0;      // sum_{m<=L} gamma_m e_m v_m
    double non_explore_value = 0.0;  // sum_{L<m<=n} gamma_m e_m v_m
};

/// Upper bounds on the relative per-impression efficiency loss. Requires
/// e_i v_i > 0 for the top `steps` bidders; with no explore slots both
/// bounds are exactly zero (beta is then 1 by convention).
EfficiencyBound efficiency_loss_bound(const PositionCurve& curve,
                                      std::span<const double> relevances,
                                      std::span<const double> values, int steps,
                                      int explore_slots);

/// Total clickability of the displayed ads: sum theta_m e_m.
double user_experience(const EffectiveCurve& eff, std::span<const double> relevances);

/// Headline comparison of one exploratory configuration against the
/// one-step baseline. rho == (R0 - R/n) / R0 by construction.
struct MetricsReport {
    double baseline_revenue = 0.0;         // R0, per impression
    double explored_revenue = 0.0;         // R, total over the n steps
    double revenue_per_impression = 0.0;   // R / n
    double rho = 0.0;                      // cost of uncertainty
    double baseline_efficiency = 0.0;      // E0
    double explored_efficiency = 0.0;      // E
    double efficiency_loss = 0.0;          // (E0 - E/n) / E0
    double baseline_user_experience = 0.0; // U0
    double explored_user_experience = 0.0; // U
    double user_experience_loss = 0.0;
};

/// The analytic loss bounds and their ingredients. Entries that do not
/// apply to a configuration are NaN.
struct BoundsReport {
    double ratio_constant = 0.0;     // c
    double cou_coarse = 0.0;
    double cou_refined = 0.0;
    double top_revenue = 0.0;        // baseline revenue from the top min(n,K) bidders
    double eff_bound = 0.0;
    double ordered_eff_bound = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double eta = 0.0;
    double omega = 0.0;
    double explore_value = 0.0;
    double non_explore_value = 0.0;
    double truthful_cou_bound = 0.0;
};

}  // namespace expgsp
