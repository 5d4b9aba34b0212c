#include <doctest.h>

#include <cmath>
#include <sstream>

#include "expgsp/estimation.hpp"
#include "support.hpp"

using namespace expgsp;

namespace {

AuctionInstance running_instance(std::vector<double> relevances) {
    AuctionInstance inst;
    inst.curve = PositionCurve({0.6, 0.3, 0.1});
    inst.explore = {3, 1};
    for (int i = 0; i < 3; ++i) {
        Bidder b;
        b.id = i + 1;
        b.value = 10.0 - i;
        b.relevance = relevances[static_cast<size_t>(i)];
        b.quality = 1.0;
        b.self_estimate = b.relevance;
        inst.bidders.push_back(b);
    }
    return inst;
}

}  // namespace

TEST_CASE("counter draws are deterministic and index-sensitive") {
    const double a = counter_uniform(42, 1, 2, 3, 0);
    CHECK(a == counter_uniform(42, 1, 2, 3, 0));
    CHECK(a != counter_uniform(42, 1, 2, 3, 1));
    CHECK(a != counter_uniform(43, 1, 2, 3, 0));
    CHECK(a >= 0.0);
    CHECK(a < 1.0);
}

TEST_CASE("simulation is reproducible byte for byte") {
    const auto inst = running_instance({0.9, 0.5, 0.2});
    const auto sched = build_schedule(3, 3, 3, 1);
    const std::vector<double> rates{0.3, 0.3, 0.3};

    const auto log_a = simulate_phases(inst, sched, 50, rates, 7);
    const auto log_b = simulate_phases(inst, sched, 50, rates, 7);
    std::ostringstream csv_a, csv_b;
    log_a.write_csv(csv_a);
    log_b.write_csv(csv_b);
    CHECK(csv_a.str() == csv_b.str());

    const auto log_c = simulate_phases(inst, sched, 50, rates, 8);
    std::ostringstream csv_c;
    log_c.write_csv(csv_c);
    CHECK(csv_a.str() != csv_c.str());
    CHECK(csv_a.str().rfind("phase,step,bidder_rank,slot,clicked,converted\n", 0) == 0);
}

TEST_CASE("click log invariants") {
    const auto inst = running_instance({0.9, 0.5, 0.2});
    const auto sched = build_schedule(3, 3, 3, 1);
    const int phases = 200;
    const auto log = simulate_phases(inst, sched, phases, std::vector<double>{0.5, 0.5, 0.5}, 1);

    for (const auto& event : log.events) {
        if (event.converted) CHECK(event.clicked);
    }
    for (int rank = 1; rank <= 3; ++rank) {
        int occupied = 0;
        for (int step = 1; step <= 3; ++step)
            if (sched.slot_of(step, rank) > 0) ++occupied;
        CHECK(log.clicks[static_cast<size_t>(rank) - 1] <=
              static_cast<long long>(phases) * occupied);
        CHECK(log.conversions[static_cast<size_t>(rank) - 1] <=
              log.clicks[static_cast<size_t>(rank) - 1]);
    }
}

TEST_CASE("zero relevance never clicks, certain clicks always land") {
    auto inst = running_instance({0.9, 0.5, 0.2});
    inst.bidders[1].relevance = 0.0;  // bypasses validation on purpose
    const auto sched = build_schedule(3, 3, 3, 1);
    const auto log = simulate_phases(inst, sched, 100, {}, 3);
    CHECK(log.clicks[1] == 0);

    AuctionInstance sure;
    sure.curve = PositionCurve({1.0});
    sure.explore = {1, 0};
    Bidder b;
    b.id = 1;
    b.value = 1.0;
    b.relevance = 1.0;
    b.quality = 1.0;
    b.self_estimate = 1.0;
    sure.bidders.push_back(b);
    const auto sure_log = simulate_phases(sure, build_schedule(1, 1, 1, 0), 250, {}, 4);
    CHECK(sure_log.clicks[0] == 250);
}

TEST_CASE("relevance estimator arithmetic") {
    CHECK(estimate_relevance(0, 1.0, 10) == doctest::Approx(0.0));
    CHECK(estimate_relevance(480, 1.0, 1000) == doctest::Approx(0.48));
    // Plugging in the expected click count returns the relevance itself.
    CHECK(estimate_relevance(static_cast<long long>(1000 * 1.2 * 0.5), 1.2, 1000) ==
          doctest::Approx(0.5));
    CHECK_THROWS_AS(estimate_relevance(1, 0.0, 10), std::invalid_argument);
}

TEST_CASE("phase requirement matches the corrected bound") {
    CHECK(required_phases(0.1, 0.05, 1.0) == 1107);
    // Doubling theta halves the raw requirement exactly.
    CHECK(phase_bound(0.1, 0.05, 1.0) == doctest::Approx(2.0 * phase_bound(0.1, 0.05, 2.0)));
    CHECK_THROWS_AS(required_phases(0.0, 0.05, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(required_phases(0.1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(required_phases(0.1, 0.05, 0.0), std::invalid_argument);
}

TEST_CASE("confidence radius values and scaling") {
    CHECK(confidence_radius(1.0, 2.0 / std::exp(1.0), 1) == doctest::Approx(std::sqrt(3.0)));
    CHECK(confidence_radius(1.0, 0.05, 4) ==
          doctest::Approx(0.5 * confidence_radius(1.0, 0.05, 1)));
    CHECK(confidence_radius(1.2, 0.05, 1107) == doctest::Approx(0.0913).epsilon(1e-3));
}

TEST_CASE("valuation estimator covers the conversion-only and general forms") {
    // Conversions only, one phase: Q * x / (theta * f).
    CHECK(estimate_valuation(3, 1, 7, 2, 0.0, 0.0, 5.0, 1.25, 0.5) ==
          doctest::Approx(2.0 * 5.0 / (1.25 * 0.5)));

    // Counts at expectation: v -> n x_I / (theta e) + x_C + a x_A.
    const double theta = 1.2, e = 0.5, a = 0.3;
    const int phases = 1000, steps = 3;
    const auto clicks = static_cast<long long>(phases * theta * e);
    const auto conversions = static_cast<long long>(phases * theta * e * a);
    const double estimate =
        estimate_valuation(steps, phases, clicks, conversions, 2.0, 1.5, 4.0, theta, e);
    CHECK(estimate == doctest::Approx(steps * 2.0 / (theta * e) + 1.5 + a * 4.0).epsilon(1e-6));

    CHECK(estimate_valuation(3, 5, 0, 0, 0.0, 1.0, 1.0, 1.0, 0.5) == doctest::Approx(0.0));
    CHECK_THROWS_AS(estimate_valuation(3, 1, 1, 0, 0.0, 0.0, 1.0, 0.0, 0.5),
                    std::invalid_argument);
}

TEST_CASE("estimates are unbiased across trials") {
    const auto inst = running_instance({0.7, 0.5, 0.2});
    const auto sched = build_schedule(3, 3, 3, 1);
    const int phases = 200;
    const int trials = 1000;
    const double theta = 1.2;

    double mean = 0.0;
    for (int trial = 1; trial <= trials; ++trial) {
        const auto log =
            simulate_phases(inst, sched, phases, {}, derive_seed(0xABCDEF, trial, 0));
        mean += estimate_relevance(log.clicks[0], theta, phases);
    }
    mean /= trials;
    const double radius = confidence_radius(theta, 0.05, phases);
    CHECK(std::fabs(mean - 0.7) < 4.0 * radius / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("coverage failure rate stays under epsilon") {
    const auto inst = running_instance({0.9, 0.5, 0.1});
    const auto rates = coverage_test(inst, 0.1, 0.1, 300, 99);
    REQUIRE(rates.size() == 3);
    for (double rate : rates) CHECK(rate <= 0.1);
}

TEST_CASE("zero trials is the degenerate convention") {
    const auto inst = running_instance({0.9, 0.5, 0.1});
    const auto rates = coverage_test(inst, 0.1, 0.1, 0, 99);
    for (double rate : rates) CHECK(rate == 0.0);
}

TEST_CASE("a radius wider than the estimate's range almost never fails") {
    const auto inst = running_instance({0.05, 0.05, 0.05});
    const auto rates = coverage_test(inst, 0.9, 0.1, 200, 5);
    for (double rate : rates) CHECK(rate == 0.0);
}
