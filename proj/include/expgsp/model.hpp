#pragma once

#include <string>
#include <vector>

namespace expgsp {

/// One advertiser in a keyword auction. Bidders are stored in rank order
/// (rank 1 first); `id` keeps the original 1-based position so results can
/// be reported back in user order.
struct Bidder {
    int id = 0;
    double value = 0.0;          // true per-click value, >= 0
    double relevance = 0.0;      // true click probability given notice, in (0,1]
    double quality = 0.0;        // auctioneer's relevance estimate, > 0
    double self_estimate = 0.0;  // bidder's own relevance estimate, in (0,1]
    double bid = 0.0;            // reported per-click bid, >= 0
};

/// Position click-through rates gamma_1 > gamma_2 > ... > gamma_K > 0.
/// Slots beyond K have rate 0.
class PositionCurve {
public:
    PositionCurve() = default;
    explicit PositionCurve(std::vector<double> gammas) : gammas_(std::move(gammas)) {}

    int slots() const { return static_cast<int>(gammas_.size()); }

    /// 1-based slot lookup; 0 outside [1, K].
    double at(int slot) const {
        return (slot >= 1 && slot <= slots()) ? gammas_[static_cast<size_t>(slot) - 1] : 0.0;
    }

    const std::vector<double>& gammas() const { return gammas_; }

private:
    std::vector<double> gammas_;
};

/// Exploration parameters: the mechanism runs `steps` rounds and rotates the
/// top `steps` bidders through the top `explore_slots` slots.
struct ExploreConfig {
    int steps = 1;          // n
    int explore_slots = 0;  // L
};

/// The hypotheses under which effective CTRs are guaranteed strictly
/// decreasing: n <= min(K+1, K+L) and 2L <= n-1.
bool sne_safe(const ExploreConfig& cfg, int slots);

/// Per-bidder, per-slot click probabilities for the non-separable model.
/// Each row must be strictly decreasing and positive over the K slots.
class CtrMatrix {
public:
    CtrMatrix() = default;
    explicit CtrMatrix(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {}

    int bidders() const { return static_cast<int>(rows_.size()); }
    int slots() const { return rows_.empty() ? 0 : static_cast<int>(rows_.front().size()); }

    /// 1-based (bidder, slot); 0 for slots beyond K.
    double at(int bidder, int slot) const {
        const auto& row = rows_[static_cast<size_t>(bidder) - 1];
        return (slot >= 1 && slot <= static_cast<int>(row.size()))
                   ? row[static_cast<size_t>(slot) - 1]
                   : 0.0;
    }

    const std::vector<double>& row(int bidder) const {
        return rows_[static_cast<size_t>(bidder) - 1];
    }
    const std::vector<std::vector<double>>& rows() const { return rows_; }

private:
    std::vector<std::vector<double>> rows_;
};

enum class CtrModel { separable, general };

/// Full game description. Immutable after construction; bidders are expected
/// pre-ranked (decreasing quality * bid).
struct AuctionInstance {
    std::vector<Bidder> bidders;
    PositionCurve curve;
    ExploreConfig explore;
    CtrModel model = CtrModel::separable;
    CtrMatrix ctrs;  // used when model == general

    int num_bidders() const { return static_cast<int>(bidders.size()); }
    int slots() const { return model == CtrModel::general ? ctrs.slots() : curve.slots(); }

    /// Click probability of the rank-r bidder in a given slot (1-based).
    double ctr(int rank, int slot) const {
        if (model == CtrModel::general) return ctrs.at(rank, slot);
        return curve.at(slot) * bidders[static_cast<size_t>(rank) - 1].relevance;
    }

    std::vector<double> values() const;
    std::vector<double> relevances() const;
    std::vector<double> qualities() const;
    std::vector<double> self_estimates() const;
    std::vector<double> bids() const;
};

struct ValidationIssue {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool sne_safe = false;

    bool valid() const { return issues.empty(); }
};

/// Checks every structural invariant and reports all violations; never
/// throws. `sne_safe` is reported separately because configurations outside
/// the safe region are still computable.
ValidationReport validate_instance(const AuctionInstance& inst);

}  // namespace expgsp
