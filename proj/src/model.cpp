#include "expgsp/model.hpp"

#include <algorithm>
#include <sstream>

namespace expgsp {

namespace {

std::string fmt_index(const char* what, int i) {
    std::ostringstream os;
    os << what << "[" << i << "]";
    return os.str();
}

}  // namespace

bool sne_safe(const ExploreConfig& cfg, int slots) {
    const int n = cfg.steps;
    const int L = cfg.explore_slots;
    return n <= std::min(slots + 1, slots + L) && 2 * L <= n - 1;
}

std::vector<double> AuctionInstance::values() const {
    std::vector<double> out;
    out.reserve(bidders.size());
    for (const auto& b : bidders) out.push_back(b.value);
    return out;
}

std::vector<double> AuctionInstance::relevances() const {
    std::vector<double> out;
    out.reserve(bidders.size());
    for (const auto& b : bidders) out.push_back(b.relevance);
    return out;
}

std::vector<double> AuctionInstance::qualities() const {
    std::vector<double> out;
    out.reserve(bidders.size());
    for (const auto& b : bidders) out.push_back(b.quality);
    return out;
}

std::vector<double> AuctionInstance::self_estimates() const {
    std::vector<double> out;
    out.reserve(bidders.size());
    for (const auto& b : bidders) out.push_back(b.self_estimate);
    return out;
}

std::vector<double> AuctionInstance::bids() const {
    std::vector<double> out;
    out.reserve(bidders.size());
    for (const auto& b : bidders) out.push_back(b.bid);
    return out;
}

ValidationReport validate_instance(const AuctionInstance& inst) {
    ValidationReport report;
    auto issue = [&](std::string field, std::string message) {
        report.issues.push_back({std::move(field), std::move(message)});
    };

    const int N = inst.num_bidders();
    const int K = inst.slots();

    if (N == 0) issue("bidders", "at least one bidder is required");
    if (K == 0) issue("gamma", "at least one slot is required");
    if (N < K) issue("bidders", "need at least as many bidders as slots");

    const auto& gammas = inst.curve.gammas();
    for (size_t j = 0; j < gammas.size(); ++j) {
        if (!(gammas[j] > 0.0 && gammas[j] <= 1.0))
            issue(fmt_index("gamma", static_cast<int>(j) + 1), "position CTR must lie in (0,1]");
        if (j + 1 < gammas.size() && !(gammas[j] > gammas[j + 1]))
            issue(fmt_index("gamma", static_cast<int>(j) + 1),
                  "position CTRs must be strictly decreasing");
    }

    for (int i = 1; i <= N; ++i) {
        const Bidder& b = inst.bidders[static_cast<size_t>(i) - 1];
        if (!(b.relevance > 0.0 && b.relevance <= 1.0))
            issue(fmt_index("relevances", i), "relevance must lie in (0,1]");
        if (!(b.self_estimate > 0.0 && b.self_estimate <= 1.0))
            issue(fmt_index("self_estimates", i), "self relevance estimate must lie in (0,1]");
        if (!(b.quality > 0.0))
            issue(fmt_index("qualities", i), "ranked bidders need a positive quality score");
        if (!(b.value >= 0.0)) issue(fmt_index("values", i), "value must be nonnegative");
        if (!(b.bid >= 0.0)) issue(fmt_index("bids", i), "bid must be nonnegative");
    }

    // Stored order must agree with the ranking rule whenever bids are present.
    bool any_bid = std::any_of(inst.bidders.begin(), inst.bidders.end(),
                               [](const Bidder& b) { return b.bid > 0.0; });
    if (any_bid) {
        for (int i = 1; i < N; ++i) {
            const Bidder& hi = inst.bidders[static_cast<size_t>(i) - 1];
            const Bidder& lo = inst.bidders[static_cast<size_t>(i)];
            if (hi.quality * hi.bid < lo.quality * lo.bid) {
                issue(fmt_index("bids", i + 1), "bidders are not stored in rank order");
                break;
            }
        }
    }

    const int n = inst.explore.steps;
    const int L = inst.explore.explore_slots;
    if (n < 1) issue("n", "step count must be positive");
    if (n > N) issue("n", "cannot explore more bidders than exist");
    if (L < 0) issue("L", "explore slot count must be nonnegative");
    if (L > K) issue("L", "explore slots cannot exceed slot count");
    if (L > n) issue("L", "explore slots cannot exceed the number of explored bidders");

    if (inst.model == CtrModel::general) {
        if (inst.ctrs.bidders() != N)
            issue("ctr", "CTR matrix needs one row per bidder");
        for (int i = 1; i <= std::min(N, inst.ctrs.bidders()); ++i) {
            const auto& row = inst.ctrs.row(i);
            if (static_cast<int>(row.size()) != K) {
                issue(fmt_index("ctr", i), "CTR row length must equal the slot count");
                continue;
            }
            for (size_t j = 0; j < row.size(); ++j) {
                if (!(row[j] > 0.0 && row[j] <= 1.0)) {
                    issue(fmt_index("ctr", i), "CTR entries must lie in (0,1]");
                    break;
                }
                if (j + 1 < row.size() && !(row[j] > row[j + 1])) {
                    issue(fmt_index("ctr", i), "CTR rows must be strictly decreasing");
                    break;
                }
            }
        }
    }

    report.sne_safe = sne_safe(inst.explore, K);
    return report;
}

}  // namespace expgsp
