#include "expgsp/effective_ctr.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace expgsp {

namespace {

void check_config(int slots, int steps, int explore_slots, const char* who) {
    if (slots < 1) throw std::invalid_argument(std::string(who) + ": need at least one slot");
    if (steps < 1) throw std::invalid_argument(std::string(who) + ": steps must be positive");
    if (explore_slots < 0 || explore_slots > std::min(slots, steps))
        throw std::invalid_argument(std::string(who) +
                                    ": explore slots must lie in [0, min(slots, steps)]");
}

// The three branch expressions for d_m, kept separate so the overlap at
// m == L and m == n-L can be cross-checked in debug builds.
template <typename Ctr>
double d_top(const Ctr& ctr, int n, int L, int m) {
    double s = (n - L - (m - 1)) * ctr(L + m);
    for (int j = L + 1; j <= L + m - 1; ++j) s += ctr(j);
    return s;
}

template <typename Ctr>
double d_middle(const Ctr& ctr, int n, int L, int m) {
    double s = (m - L) * ctr(m) + (n - m - L + 1) * ctr(m + L);
    for (int j = m + 1; j <= m + L - 1; ++j) s += ctr(j);
    return s;
}

template <typename Ctr>
double d_bottom(const Ctr& ctr, int n, int L, int m) {
    double s = (m - L) * ctr(m);
    for (int j = m + 1; j <= n; ++j) s += ctr(j);
    return s;
}

// Steps-weighted CTR that rank m collects from non-explore slots.
// With L == 0 nothing rotates and rank m keeps slot m for all n steps;
// the branch expressions below assume L >= 1.
template <typename Ctr>
double non_explore_ctr(const Ctr& ctr, int n, int L, int m) {
    if (L == 0) return n * ctr(m);
    if (m < L) return d_top(ctr, n, L, m);
    if (m <= n - L) {
        const double v = d_middle(ctr, n, L, m);
#ifndef NDEBUG
        if (m == L) assert(std::fabs(v - d_top(ctr, n, L, m)) <= 1e-9);
        if (m == n - L) assert(std::fabs(v - d_bottom(ctr, n, L, m)) <= 1e-9);
#endif
        return v;
    }
    return d_bottom(ctr, n, L, m);
}

template <typename Ctr>
void fill_effective_row(const Ctr& ctr, int n, int L, int k_til,
                        std::vector<double>& thetas, double& explore_ctr,
                        std::vector<double>& non_explore) {
    explore_ctr = 0.0;
    for (int j = 1; j <= L; ++j) explore_ctr += ctr(j);

    non_explore.resize(static_cast<size_t>(n));
    thetas.resize(static_cast<size_t>(k_til));
    for (int m = 1; m <= k_til; ++m) {
        if (m <= n) {
            const double d = non_explore_ctr(ctr, n, L, m);
            non_explore[static_cast<size_t>(m) - 1] = d;
            thetas[static_cast<size_t>(m) - 1] = explore_ctr + d;
        } else {
            thetas[static_cast<size_t>(m) - 1] = n * ctr(m);
        }
    }
}

template <typename Ctr>
std::vector<double> differences_row(const Ctr& ctr, int n, int L, int k_til, double explore_ctr) {
    std::vector<double> diffs(static_cast<size_t>(k_til), 0.0);
    for (int j = 1; j <= k_til; ++j) {
        double v;
        if (j < L) {
            v = (n - j - L) * (ctr(j + L) - ctr(j + 1 + L));
        } else if (j < n - L) {
            v = (j - L) * (ctr(j) - ctr(j + 1)) + (n - j - L) * (ctr(j + L) - ctr(j + 1 + L));
        } else if (j < n) {
            v = (j - L) * (ctr(j) - ctr(j + 1));
        } else if (j == n) {
            v = (explore_ctr - L * ctr(n + 1)) + (n - L) * (ctr(n) - ctr(n + 1));
        } else {
            v = n * (ctr(j) - ctr(j + 1));
        }
        diffs[static_cast<size_t>(j) - 1] = v;
    }
    return diffs;
}

}  // namespace

EffectiveCurve effective_position_ctrs(const PositionCurve& curve, int steps, int explore_slots) {
    check_config(curve.slots(), steps, explore_slots, "effective_position_ctrs");
    EffectiveCurve eff;
    eff.steps = steps;
    eff.explore_slots = explore_slots;
    eff.slots = curve.slots();
    eff.effective_slots = std::max(curve.slots(), steps);
    auto ctr = [&](int j) { return curve.at(j); };
    fill_effective_row(ctr, steps, explore_slots, eff.effective_slots, eff.thetas,
                       eff.explore_ctr, eff.non_explore);
    return eff;
}

std::vector<double> theta_differences(const PositionCurve& curve, int steps, int explore_slots) {
    check_config(curve.slots(), steps, explore_slots, "theta_differences");
    const int k_til = std::max(curve.slots(), steps);
    auto ctr = [&](int j) { return curve.at(j); };
    double explore_ctr = 0.0;
    for (int j = 1; j <= explore_slots; ++j) explore_ctr += ctr(j);
    return differences_row(ctr, steps, explore_slots, k_til, explore_ctr);
}

EffectiveCtrMatrix effective_ctr_matrix(const CtrMatrix& ctrs, int steps, int explore_slots) {
    check_config(ctrs.slots(), steps, explore_slots, "effective_ctr_matrix");
    EffectiveCtrMatrix eff;
    eff.steps = steps;
    eff.explore_slots = explore_slots;
    eff.slots = ctrs.slots();
    eff.effective_slots = std::max(ctrs.slots(), steps);
    eff.rows.resize(static_cast<size_t>(ctrs.bidders()));
    eff.explore_ctrs.resize(static_cast<size_t>(ctrs.bidders()));
    std::vector<double> scratch;
    for (int i = 1; i <= ctrs.bidders(); ++i) {
        auto ctr = [&](int j) { return ctrs.at(i, j); };
        fill_effective_row(ctr, steps, explore_slots, eff.effective_slots,
                           eff.rows[static_cast<size_t>(i) - 1],
                           eff.explore_ctrs[static_cast<size_t>(i) - 1], scratch);
    }
    return eff;
}

bool check_monotone(std::span<const double> values, double tol) {
    for (size_t i = 0; i + 1 < values.size(); ++i) {
        if (!(values[i] - values[i + 1] > tol)) return false;
    }
    return values.empty() || values.back() > tol;
}

std::vector<double> schedule_oracle_effective_ctrs(const AllocationSchedule& schedule,
                                                   const PositionCurve& curve) {
    int max_rank = 0;
    for (const auto& row : schedule.occupant)
        for (int rank : row) max_rank = std::max(max_rank, rank);

    std::vector<double> totals(static_cast<size_t>(max_rank), 0.0);
    for (const auto& row : schedule.occupant) {
        for (int j = 1; j <= static_cast<int>(row.size()); ++j) {
            const int rank = row[static_cast<size_t>(j) - 1];
            if (rank > 0) totals[static_cast<size_t>(rank) - 1] += curve.at(j);
        }
    }
    return totals;
}

std::vector<std::vector<double>> schedule_oracle_effective_ctrs(const AllocationSchedule& schedule,
                                                                const CtrMatrix& ctrs) {
    int max_rank = 0;
    for (const auto& row : schedule.occupant)
        for (int rank : row) max_rank = std::max(max_rank, rank);

    std::vector<std::vector<double>> totals(
        static_cast<size_t>(ctrs.bidders()),
        std::vector<double>(static_cast<size_t>(max_rank), 0.0));
    for (const auto& row : schedule.occupant) {
        for (int j = 1; j <= static_cast<int>(row.size()); ++j) {
            const int rank = row[static_cast<size_t>(j) - 1];
            if (rank == 0) continue;
            for (int i = 1; i <= ctrs.bidders(); ++i)
                totals[static_cast<size_t>(i) - 1][static_cast<size_t>(rank) - 1] += ctrs.at(i, j);
        }
    }
    return totals;
}

}  // namespace expgsp
