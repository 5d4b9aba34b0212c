#include <doctest.h>

#include "expgsp/model.hpp"
#include "support.hpp"

using namespace expgsp;

namespace {

AuctionInstance running_instance() {
    AuctionInstance inst;
    inst.curve = PositionCurve({0.6, 0.3, 0.1});
    inst.explore = {3, 1};
    for (int i = 0; i < 3; ++i) {
        Bidder b;
        b.id = i + 1;
        b.value = std::vector<double>{10.0, 6.0, 4.0}[static_cast<size_t>(i)];
        b.relevance = 1.0;
        b.quality = 1.0;
        b.self_estimate = 1.0;
        inst.bidders.push_back(b);
    }
    return inst;
}

}  // namespace

TEST_CASE("running instance validates and is SNE-safe") {
    const auto report = validate_instance(running_instance());
    CHECK(report.valid());
    CHECK(report.sne_safe);
}

TEST_CASE("one-step configuration degenerates cleanly") {
    auto inst = running_instance();
    inst.explore = {1, 0};
    const auto report = validate_instance(inst);
    CHECK(report.valid());
    CHECK(report.sne_safe);
}

TEST_CASE("increasing position curve is reported") {
    auto inst = running_instance();
    inst.curve = PositionCurve({0.3, 0.6});
    const auto report = validate_instance(inst);
    CHECK_FALSE(report.valid());
    bool mentions_gamma = false;
    for (const auto& issue : report.issues)
        mentions_gamma = mentions_gamma || issue.field.rfind("gamma", 0) == 0;
    CHECK(mentions_gamma);
}

TEST_CASE("zero quality score is rejected for ranked bidders") {
    auto inst = running_instance();
    inst.bidders[1].quality = 0.0;
    CHECK_FALSE(validate_instance(inst).valid());
}

TEST_CASE("relevance and self estimate must be probabilities") {
    auto inst = running_instance();
    inst.bidders[0].relevance = 1.5;
    CHECK_FALSE(validate_instance(inst).valid());

    inst = running_instance();
    inst.bidders[2].self_estimate = 0.0;
    CHECK_FALSE(validate_instance(inst).valid());
}

TEST_CASE("fewer bidders than slots is reported") {
    auto inst = running_instance();
    inst.bidders.pop_back();
    inst.explore = {2, 0};
    CHECK_FALSE(validate_instance(inst).valid());
}

TEST_CASE("stored order must match quality-weighted bids when bids exist") {
    auto inst = running_instance();
    inst.bidders[0].bid = 1.0;
    inst.bidders[1].bid = 5.0;
    inst.bidders[2].bid = 2.0;
    CHECK_FALSE(validate_instance(inst).valid());

    inst.bidders[0].bid = 5.0;
    inst.bidders[1].bid = 4.0;
    inst.bidders[2].bid = 2.0;
    CHECK(validate_instance(inst).valid());
}

TEST_CASE("sne_safe flag follows the stated hypotheses") {
    CHECK(sne_safe({3, 1}, 3));
    CHECK(sne_safe({1, 0}, 3));
    CHECK(sne_safe({4, 1}, 3));        // n = K+1 needs L >= 1
    CHECK_FALSE(sne_safe({4, 0}, 3));  // n <= K when L = 0
    CHECK_FALSE(sne_safe({4, 2}, 3));  // 2L <= n-1 fails
    CHECK_FALSE(sne_safe({2, 1}, 3));
}

TEST_CASE("general model rows are checked per bidder") {
    auto inst = running_instance();
    inst.model = CtrModel::general;
    inst.ctrs = CtrMatrix({{0.6, 0.3, 0.1}, {0.5, 0.3, 0.15}, {0.4, 0.25, 0.1}});
    CHECK(validate_instance(inst).valid());

    inst.ctrs = CtrMatrix({{0.6, 0.3, 0.1}, {0.5, 0.55, 0.15}, {0.4, 0.25, 0.1}});
    CHECK_FALSE(validate_instance(inst).valid());

    inst.ctrs = CtrMatrix({{0.6, 0.3, 0.1}, {0.5, 0.3, 0.15}});
    CHECK_FALSE(validate_instance(inst).valid());
}

TEST_CASE("validation is idempotent") {
    const auto inst = running_instance();
    const auto a = validate_instance(inst);
    const auto b = validate_instance(inst);
    CHECK(a.issues.size() == b.issues.size());
    CHECK(a.sne_safe == b.sne_safe);
}

TEST_CASE("random SNE-safe instances validate") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cfg = testsupport::random_safe_config(rng);
        const auto inst =
            testsupport::random_instance(rng, cfg, testsupport::Ordering::none, trial % 3);
        const auto report = validate_instance(inst);
        CHECK(report.valid());
        CHECK(report.sne_safe);
    }
}
