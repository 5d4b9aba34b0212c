#include <doctest.h>

#include <cmath>
#include <numeric>

#include "expgsp/effective_ctr.hpp"
#include "support.hpp"

using namespace expgsp;

TEST_CASE("closed-form effective curve matches the worked example") {
    const auto eff = effective_position_ctrs(PositionCurve({0.6, 0.3, 0.1}), 3, 1);
    REQUIRE(eff.effective_slots == 3);
    CHECK(eff.theta(1) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(eff.theta(2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eff.theta(3) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(eff.theta(4) == 0.0);
    CHECK(eff.explore_ctr == doctest::Approx(0.6));
    CHECK(eff.non_explore[0] == doctest::Approx(0.6));
    CHECK(eff.non_explore[1] == doctest::Approx(0.4));
    CHECK(eff.non_explore[2] == doctest::Approx(0.2));
}

TEST_CASE("one step without explore slots is the identity") {
    const PositionCurve curve({0.5, 0.25, 0.2, 0.05});
    const auto eff = effective_position_ctrs(curve, 1, 0);
    for (int m = 1; m <= 4; ++m) CHECK(eff.theta(m) == curve.at(m));
}

TEST_CASE("explored ranks beyond the slot count still earn explore clicks") {
    // n = K+1 with one explore slot: the extra bidder only sees slot 1.
    const auto eff = effective_position_ctrs(PositionCurve({0.6, 0.3}), 3, 1);
    REQUIRE(eff.effective_slots == 3);
    CHECK(eff.theta(1) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(eff.theta(2) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(eff.theta(3) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("conservation: totals equal steps times the curve mass") {
    std::mt19937_64 rng(331);
    for (int trial = 0; trial < 500; ++trial) {
        const auto cfg = testsupport::random_safe_config(rng);
        const PositionCurve curve(testsupport::random_decreasing_probs(rng, cfg.slots));
        const auto eff = effective_position_ctrs(curve, cfg.steps, cfg.explore);
        const double total = std::accumulate(eff.thetas.begin(), eff.thetas.end(), 0.0);
        const double mass =
            std::accumulate(curve.gammas().begin(), curve.gammas().end(), 0.0);
        CHECK(total == doctest::Approx(cfg.steps * mass).epsilon(1e-12));
    }
}

TEST_CASE("difference formula matches subtraction and the example") {
    const PositionCurve curve({0.6, 0.3, 0.1});
    const auto diffs = theta_differences(curve, 3, 1);
    REQUIRE(diffs.size() == 3);
    CHECK(diffs[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(diffs[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(diffs[2] == doctest::Approx(0.8).epsilon(1e-12));

    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const auto cfg = testsupport::random_safe_config(rng);
        const PositionCurve rc(testsupport::random_decreasing_probs(rng, cfg.slots));
        const auto eff = effective_position_ctrs(rc, cfg.steps, cfg.explore);
        const auto d = theta_differences(rc, cfg.steps, cfg.explore);
        REQUIRE(static_cast<int>(d.size()) == eff.effective_slots);
        for (int j = 1; j <= eff.effective_slots; ++j) {
            CHECK(std::fabs(d[static_cast<size_t>(j) - 1] - (eff.theta(j) - eff.theta(j + 1))) <
                  1e-12);
            CHECK(d[static_cast<size_t>(j) - 1] > 0.0);
        }
    }
}

TEST_CASE("differences scale one-step gaps when nothing is explored") {
    const PositionCurve curve({0.9, 0.5, 0.2});
    const auto d = theta_differences(curve, 2, 0);
    CHECK(d[0] == doctest::Approx(2 * 0.4).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(2 * 0.3).epsilon(1e-12));
    CHECK(d[2] == doctest::Approx(2 * 0.2).epsilon(1e-12));
}

TEST_CASE("effective matrix reduces to the scaled curve in the separable case") {
    const PositionCurve curve({0.6, 0.3, 0.1});
    std::vector<std::vector<double>> rows{{0.3, 0.15, 0.05}};  // 0.5 * gamma
    const auto eff = effective_ctr_matrix(CtrMatrix(rows), 3, 1);
    CHECK(eff.at(1, 1) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(eff.at(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eff.at(1, 3) == doctest::Approx(0.4).epsilon(1e-12));

    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cfg = testsupport::random_safe_config(rng, 8);
        const PositionCurve rc(testsupport::random_decreasing_probs(rng, cfg.slots));
        std::uniform_real_distribution<double> rel(0.05, 1.0);
        const double e = rel(rng);
        std::vector<double> row;
        for (int j = 1; j <= cfg.slots; ++j) row.push_back(rc.at(j) * e);
        const auto mat = effective_ctr_matrix(CtrMatrix({row}), cfg.steps, cfg.explore);
        const auto ref = effective_position_ctrs(rc, cfg.steps, cfg.explore);
        for (int m = 1; m <= ref.effective_slots; ++m)
            CHECK(mat.at(1, m) == doctest::Approx(e * ref.theta(m)).epsilon(1e-12));
    }
}

TEST_CASE("one-step effective matrix is the matrix itself") {
    const CtrMatrix ctrs({{0.6, 0.3, 0.1}, {0.5, 0.3, 0.15}});
    const auto eff = effective_ctr_matrix(ctrs, 1, 0);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 3; ++j) CHECK(eff.at(i, j) == ctrs.at(i, j));
}

TEST_CASE("matrix row sums follow conservation") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cfg = testsupport::random_safe_config(rng, 8);
        const int n_bidders = std::max(cfg.slots, cfg.steps);
        const auto ctrs = testsupport::random_ctr_matrix(rng, n_bidders, cfg.slots);
        const auto eff = effective_ctr_matrix(ctrs, cfg.steps, cfg.explore);
        for (int i = 1; i <= n_bidders; ++i) {
            double row_mass = 0.0, base_mass = 0.0;
            for (int m = 1; m <= eff.effective_slots; ++m) row_mass += eff.at(i, m);
            for (int j = 1; j <= cfg.slots; ++j) base_mass += ctrs.at(i, j);
            CHECK(row_mass == doctest::Approx(cfg.steps * base_mass).epsilon(1e-12));
        }
    }
}

TEST_CASE("check_monotone enforces strict decrease and positivity") {
    CHECK(check_monotone(std::vector<double>{1.2, 1.0, 0.8}, 1e-12));
    CHECK_FALSE(check_monotone(std::vector<double>{1.0, 1.0}, 0.0));
    CHECK(check_monotone(std::vector<double>{0.5}, 1e-12));
    CHECK_FALSE(check_monotone(std::vector<double>{0.5, 0.0}, 1e-12));
    CHECK(check_monotone(std::vector<double>{}, 1e-12));
}

TEST_CASE("schedule oracle agrees with the closed forms") {
    // Worked case: rank 1 visits slots (1, 2, 2).
    const auto sched = build_schedule(3, 3, 3, 1);
    const auto totals = schedule_oracle_effective_ctrs(sched, PositionCurve({0.6, 0.3, 0.1}));
    CHECK(totals[0] == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(totals[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(totals[2] == doctest::Approx(0.8).epsilon(1e-12));

    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 300; ++trial) {
        const auto cfg = testsupport::random_safe_config(rng, 8);
        const int n_bidders = std::max(cfg.slots, cfg.steps);
        const PositionCurve rc(testsupport::random_decreasing_probs(rng, cfg.slots));
        const auto eff = effective_position_ctrs(rc, cfg.steps, cfg.explore);
        const auto s = build_schedule(n_bidders, cfg.slots, cfg.steps, cfg.explore);
        const auto oracle = schedule_oracle_effective_ctrs(s, rc);
        for (int m = 1; m <= std::min<int>(eff.effective_slots, static_cast<int>(oracle.size()));
             ++m)
            CHECK(std::fabs(oracle[static_cast<size_t>(m) - 1] - eff.theta(m)) < 1e-12);
    }
}

TEST_CASE("monotonicity holds on SNE-safe configurations") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto cfg = testsupport::random_safe_config(rng);
        const PositionCurve rc(testsupport::random_decreasing_probs(rng, cfg.slots));
        const auto eff = effective_position_ctrs(rc, cfg.steps, cfg.explore);
        CHECK(check_monotone(eff.thetas, 1e-12));
    }
}
