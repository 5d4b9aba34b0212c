#include "expgsp/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace expgsp {

namespace {

// Shared back-substitution for both envy-free profiles. `use_upper` picks the
// v_j q_j term (maximum profile) over v_{j+1} q_{j+1} (minimum profile).
BidProfile sne_bids(const EffectiveCurve& eff, std::span<const double> values,
                    std::span<const double> qualities, bool use_upper) {
    if (values.size() != qualities.size())
        throw std::invalid_argument("sne bids: values and qualities must have equal length");
    const int n_bidders = static_cast<int>(values.size());
    if (n_bidders == 0) return {{}, use_upper ? BidProfile::Flavor::max_sne
                                              : BidProfile::Flavor::min_sne};

    const int k_til = eff.effective_slots;
    std::vector<double> bids(static_cast<size_t>(n_bidders), 0.0);
    bids[0] = values[0];
    for (int i = k_til + 1; i <= n_bidders; ++i)
        bids[static_cast<size_t>(i) - 1] = values[static_cast<size_t>(i) - 1];

    double tail = 0.0;  // sum_{j=i}^{Ktil} (theta_j - theta_{j+1}) * term_j
    for (int i = k_til; i >= 1; --i) {
        // The maximum profile binds the upper inequality only at ranks with a
        // successor bidder: a rank-i term with no bidder i+1 has no bid below
        // to absorb it (b = v = 0 past the last bidder).
        double term;
        if (use_upper) {
            term = (i + 1 <= n_bidders)
                       ? values[static_cast<size_t>(i) - 1] * qualities[static_cast<size_t>(i) - 1]
                       : 0.0;
        } else {
            term = (i + 1 <= n_bidders)
                       ? values[static_cast<size_t>(i)] * qualities[static_cast<size_t>(i)]
                       : 0.0;
        }
        tail += (eff.theta(i) - eff.theta(i + 1)) * term;
        if (i + 1 <= n_bidders) {
            const double denom = eff.theta(i) * qualities[static_cast<size_t>(i)];
            if (!(denom > 0.0))
                throw std::domain_error("sne bids: zero effective CTR above an existing bidder");
            bids[static_cast<size_t>(i)] = tail / denom;
        }
    }
    return {std::move(bids),
            use_upper ? BidProfile::Flavor::max_sne : BidProfile::Flavor::min_sne};
}

double value_quality(std::span<const double> values, std::span<const double> qualities, int i) {
    if (i < 1 || i > static_cast<int>(values.size())) return 0.0;
    return values[static_cast<size_t>(i) - 1] * qualities[static_cast<size_t>(i) - 1];
}

}  // namespace

BidProfile min_sne_bids(const EffectiveCurve& eff, std::span<const double> values,
                        std::span<const double> qualities) {
    return sne_bids(eff, values, qualities, false);
}

BidProfile max_sne_bids(const EffectiveCurve& eff, std::span<const double> values,
                        std::span<const double> qualities) {
    return sne_bids(eff, values, qualities, true);
}

bool verify_sne(std::span<const double> bids, const EffectiveCurve& eff,
                std::span<const double> values, std::span<const double> qualities, double tol) {
    const int n_bidders = static_cast<int>(bids.size());
    auto quality_bid = [&](int i) {
        if (i < 1 || i > n_bidders) return 0.0;
        return qualities[static_cast<size_t>(i) - 1] * bids[static_cast<size_t>(i) - 1];
    };
    for (int i = 1; i <= n_bidders; ++i) {
        const double step = eff.theta(i) - eff.theta(i + 1);
        const double carry = eff.theta(i + 1) * quality_bid(i + 2);
        const double lower = step * value_quality(values, qualities, i + 1) + carry;
        const double center = eff.theta(i) * quality_bid(i + 1);
        const double upper = step * value_quality(values, qualities, i) + carry;
        if (lower > center + tol || center > upper + tol) return false;
    }
    return true;
}

double expected_revenue(const EffectiveCurve& eff, std::span<const double> relevances,
                        std::span<const double> qualities, std::span<const double> values) {
    return expected_revenue_top(eff, relevances, qualities, values, eff.effective_slots);
}

double expected_revenue_top(const EffectiveCurve& eff, std::span<const double> relevances,
                            std::span<const double> qualities, std::span<const double> values,
                            int top) {
    if (values.size() != qualities.size() || values.size() != relevances.size())
        throw std::invalid_argument("expected_revenue: input lengths differ");
    const int n_bidders = static_cast<int>(values.size());
    const int k_til = eff.effective_slots;
    const int outer = std::min({top, k_til, n_bidders});

    // Inner tails first: T_s = sum_{j=s}^{Ktil} (theta_j - theta_{j+1}) q_{j+1} v_{j+1}.
    std::vector<double> tails(static_cast<size_t>(k_til) + 1, 0.0);
    for (int j = k_til; j >= 1; --j) {
        tails[static_cast<size_t>(j) - 1] =
            tails[static_cast<size_t>(j)] +
            (eff.theta(j) - eff.theta(j + 1)) * value_quality(values, qualities, j + 1);
    }

    double total = 0.0;
    for (int s = 1; s <= outer; ++s) {
        const double q = qualities[static_cast<size_t>(s) - 1];
        if (!(q > 0.0)) throw std::invalid_argument("expected_revenue: qualities must be positive");
        total += relevances[static_cast<size_t>(s) - 1] / q * tails[static_cast<size_t>(s) - 1];
    }
    return total;
}

double revenue_at_bids(const EffectiveCurve& eff, std::span<const double> relevances,
                       std::span<const double> qualities, std::span<const double> bids) {
    const int n_bidders = static_cast<int>(bids.size());
    double total = 0.0;
    for (int i = 1; i <= n_bidders; ++i) {
        const double next =
            (i + 1 <= n_bidders)
                ? qualities[static_cast<size_t>(i)] * bids[static_cast<size_t>(i)]
                : 0.0;
        total += eff.theta(i) * relevances[static_cast<size_t>(i) - 1] * next /
                 qualities[static_cast<size_t>(i) - 1];
    }
    return total;
}

double laddered_revenue(const EffectiveCtrMatrix& eff, std::span<const double> ranked_weights,
                        std::span<const double> ranked_bids) {
    const int n_bidders = static_cast<int>(ranked_bids.size());
    const int k_til = eff.effective_slots;
    double total = 0.0;
    for (int i = 1; i <= std::min(n_bidders, k_til); ++i) {
        double row = 0.0;
        for (int j = i; j <= k_til; ++j) {
            const double next = (j + 1 <= n_bidders)
                                    ? ranked_weights[static_cast<size_t>(j)] *
                                          ranked_bids[static_cast<size_t>(j)]
                                    : 0.0;
            row += (eff.at(i, j) - eff.at(i, j + 1)) * next;
        }
        total += row / ranked_weights[static_cast<size_t>(i) - 1];
    }
    return total;
}

double cost_of_uncertainty(double baseline_revenue, double explored_revenue, int steps) {
    if (!(baseline_revenue > 0.0))
        throw std::domain_error("cost_of_uncertainty: baseline revenue must be positive");
    if (steps < 1) throw std::invalid_argument("cost_of_uncertainty: steps must be positive");
    return (baseline_revenue - explored_revenue / steps) / baseline_revenue;
}

namespace {

// min over the requested j range of (c_{j+L} - c_{j+1+L}) / (c_j - c_{j+1}),
// skipping 0/0 entries (both slots past K). Infinity when nothing remains.
template <typename Ctr>
double difference_ratio_min(const Ctr& ctr, int lo, int hi, int explore_slots) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = lo; j <= hi; ++j) {
        const double den = ctr(j) - ctr(j + 1);
        const double num = ctr(j + explore_slots) - ctr(j + 1 + explore_slots);
        if (den == 0.0) {
            if (num == 0.0) continue;
            throw std::domain_error("cou bound: zero one-step CTR difference");
        }
        best = std::min(best, num / den);
    }
    return best;
}

double coarse_bound(double ratio_constant, int steps, int explore_slots) {
    return 1.0 - std::min(1.0, ratio_constant) *
                     (1.0 - 2.0 * explore_slots / static_cast<double>(steps));
}

}  // namespace

RevenueBound cou_bound(const PositionCurve& curve, int steps, int explore_slots,
                       double top_revenue, double total_revenue) {
    if (!(total_revenue > 0.0))
        throw std::domain_error("cou_bound: total baseline revenue must be positive");
    RevenueBound out;
    auto ctr = [&](int j) { return curve.at(j); };
    out.ratio_constant = difference_ratio_min(ctr, 1, steps - explore_slots - 1, explore_slots);
    out.coarse = coarse_bound(out.ratio_constant, steps, explore_slots);
    out.refined = out.coarse * top_revenue / total_revenue;
    return out;
}

RevenueBound cou_bound_truthful(const CtrMatrix& ctrs, int steps, int explore_slots) {
    RevenueBound out;
    double best = std::numeric_limits<double>::infinity();
    const int rows = std::min(steps, ctrs.slots());
    for (int i = 1; i <= std::min(rows, ctrs.bidders()); ++i) {
        auto ctr = [&](int j) { return ctrs.at(i, j); };
        best = std::min(best,
                        difference_ratio_min(ctr, i, steps - explore_slots - 1, explore_slots));
    }
    out.ratio_constant = best;
    out.coarse = coarse_bound(best, steps, explore_slots);
    out.refined = out.coarse;
    return out;
}

double efficiency(const EffectiveCurve& eff, std::span<const double> relevances,
                  std::span<const double> values) {
    if (values.size() != relevances.size())
        throw std::invalid_argument("efficiency: input lengths differ");
    const int top = std::min(eff.effective_slots, static_cast<int>(values.size()));
    double total = 0.0;
    for (int m = 1; m <= top; ++m) {
        total += eff.theta(m) * relevances[static_cast<size_t>(m) - 1] *
                 values[static_cast<size_t>(m) - 1];
    }
    return total;
}

std::vector<double> y_decomposition(const PositionCurve& curve, std::span<const double> relevances,
                                    std::span<const double> values, int steps, int explore_slots) {
    const int n = steps;
    const int L = explore_slots;
    const int slots = curve.slots();
    if (n < 1 || L < 0 || L > std::min(slots, n))
        throw std::invalid_argument("y_decomposition: invalid explore configuration");
    if (static_cast<int>(values.size()) < std::max(slots, n))
        throw std::invalid_argument("y_decomposition: need a bidder for every slot and step");

    auto ev = [&](int i) {
        return relevances[static_cast<size_t>(i) - 1] * values[static_cast<size_t>(i) - 1];
    };

    std::vector<double> out(static_cast<size_t>(slots), 0.0);
    double explored_total = 0.0;
    for (int i = 1; i <= n; ++i) explored_total += ev(i);

    for (int m = 1; m <= slots; ++m) {
        double y;
        if (L == 0) {
            y = n * ev(m);  // no rotation: slot m serves bidder m every step
        } else if (m <= L) {
            y = explored_total;
        } else if (m <= n) {
            y = (n - m + 1) * ev(m - L) + (m - L) * ev(m);
            for (int i = m - L + 1; i <= m - 1; ++i) y += ev(i);
        } else {
            y = n * ev(m);
        }
        out[static_cast<size_t>(m) - 1] = y;
    }
    return out;
}

EfficiencyBound efficiency_loss_bound(const PositionCurve& curve,
                                      std::span<const double> relevances,
                                      std::span<const double> values, int steps,
                                      int explore_slots) {
    const int n = steps;
    const int L = explore_slots;
    if (n < 1 || L < 0 || L > std::min(curve.slots(), n))
        throw std::invalid_argument("efficiency_loss_bound: invalid explore configuration");
    if (static_cast<int>(values.size()) < n || values.size() != relevances.size())
        throw std::invalid_argument("efficiency_loss_bound: need the top `steps` bidders");

    auto ev = [&](int i) {
        return relevances[static_cast<size_t>(i) - 1] * values[static_cast<size_t>(i) - 1];
    };
    for (int i = 1; i <= n; ++i) {
        if (!(ev(i) > 0.0))
            throw std::domain_error(
                "efficiency_loss_bound: relevance * value must be positive for explored bidders");
    }

    double baseline = 0.0;
    const int top = std::min(curve.slots(), static_cast<int>(values.size()));
    for (int m = 1; m <= top; ++m) baseline += curve.at(m) * ev(m);
    if (!(baseline > 0.0))
        throw std::domain_error("efficiency_loss_bound: baseline efficiency must be positive");

    EfficiencyBound out;
    for (int m = 1; m <= L; ++m) out.explore_value += curve.at(m) * ev(m);
    for (int m = L + 1; m <= n; ++m) out.non_explore_value += curve.at(m) * ev(m);

    double explored_total = 0.0;
    for (int i = 1; i <= n; ++i) explored_total += ev(i);

    if (L == 0) {
        out.beta = 1.0;  // convention: the explore term vanishes anyway
    } else {
        double best = 0.0;
        for (int m = 1; m <= L; ++m) best = std::max(best, ev(m));
        out.beta = explored_total / (n * best);
    }

    out.eta = 0.0;
    for (int m = L + 1; m <= n; ++m) {
        for (int i = m - L; i <= m; ++i) out.eta = std::max(out.eta, 1.0 - ev(i) / ev(m));
    }
    out.general = (1.0 - out.beta) * (out.explore_value / baseline) +
                  out.eta * (out.non_explore_value / baseline);

    out.ordered_applicable = true;
    for (int m = 1; m < n; ++m) {
        if (ev(m) < ev(m + 1)) {
            out.ordered_applicable = false;
            break;
        }
    }
    out.alpha = explored_total / (n * ev(1));
    if (L == 0 || L >= n) {
        out.omega = 0.0;  // empty range; the paired sum is empty too
    } else {
        out.omega = std::numeric_limits<double>::infinity();
        for (int m = L + 1; m <= n; ++m)
            out.omega = std::min(out.omega, ev(m - 1) / ev(m) - 1.0);
    }
    out.ordered = (1.0 - out.alpha) * (out.explore_value / baseline) -
                  (static_cast<double>(L) / n) * out.omega * (out.non_explore_value / baseline);
    return out;
}

double user_experience(const EffectiveCurve& eff, std::span<const double> relevances) {
    const int top = std::min(eff.effective_slots, static_cast<int>(relevances.size()));
    double total = 0.0;
    for (int m = 1; m <= top; ++m)
        total += eff.theta(m) * relevances[static_cast<size_t>(m) - 1];
    return total;
}

}  // namespace expgsp
