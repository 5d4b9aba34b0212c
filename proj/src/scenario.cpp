#include "expgsp/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "expgsp/mechanisms.hpp"

namespace expgsp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& message) {
    std::ostringstream os;
    os << "line " << line << ": " << key << ": " << message;
    throw ScenarioError(os.str());
}

double parse_double(const std::string& tok, int line, const std::string& key) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) fail(line, key, "expected a number, got '" + tok + "'");
    return v;
}

long long parse_int(const std::string& tok, int line, const std::string& key) {
    long long v = 0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) fail(line, key, "expected an integer, got '" + tok + "'");
    return v;
}

std::vector<double> parse_list(const std::string& value, int line, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split_ws(value)) out.push_back(parse_double(tok, line, key));
    if (out.empty()) fail(line, key, "expected at least one value");
    return out;
}

// Sweep syntax: a single integer, "a:b" (inclusive), or a comma list.
std::vector<int> parse_sweep(const std::string& value, int line, const std::string& key) {
    std::vector<int> out;
    const std::string v = trim(value);
    if (v.find(':') != std::string::npos) {
        const auto pos = v.find(':');
        const long long lo = parse_int(trim(v.substr(0, pos)), line, key);
        const long long hi = parse_int(trim(v.substr(pos + 1)), line, key);
        if (hi < lo) fail(line, key, "range upper bound below lower bound");
        for (long long x = lo; x <= hi; ++x) out.push_back(static_cast<int>(x));
        return out;
    }
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(line, key, "empty sweep entry");
        out.push_back(static_cast<int>(parse_int(item, line, key)));
    }
    if (out.empty()) fail(line, key, "expected at least one value");
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ' ';
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, xs[i]);
        out.append(buf, ptr);
    }
    return out;
}

std::string join_sweep(const std::vector<int>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, ptr);
}

std::string mechanism_name(Mechanism m) {
    switch (m) {
        case Mechanism::gsp: return "gsp";
        case Mechanism::exp_gsp: return "exp-gsp";
        case Mechanism::laddered: return "laddered";
        case Mechanism::exp_laddered: return "exp-laddered";
    }
    return "exp-gsp";
}

Mechanism parse_mechanism(const std::string& name) {
    if (name == "gsp") return Mechanism::gsp;
    if (name == "exp-gsp") return Mechanism::exp_gsp;
    if (name == "laddered") return Mechanism::laddered;
    if (name == "exp-laddered") return Mechanism::exp_laddered;
    throw ScenarioError("mechanism: unknown mechanism '" + name +
                        "' (expected gsp, exp-gsp, laddered or exp-laddered)");
}

Scenario parse_scenario_text(const std::string& text) {
    Scenario s;
    std::vector<std::pair<int, std::vector<double>>> ctr_rows;  // (index, row)

    std::istringstream is(text);
    std::string raw;
    int line = 0;
    bool saw_values = false, saw_relevances = false, saw_curve = false;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string content = trim(raw);
        if (content.empty()) continue;

        const auto eq = content.find('=');
        if (eq == std::string::npos) fail(line, content, "expected 'key = value'");
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (key.empty()) fail(line, "?", "missing key before '='");
        if (value.empty()) fail(line, key, "missing value");

        if (key == "mechanism") {
            try {
                s.mechanism = parse_mechanism(value);
            } catch (const ScenarioError& e) {
                fail(line, key, e.what());
            }
        } else if (key == "gamma") {
            s.gamma = parse_list(value, line, key);
            saw_curve = true;
        } else if (key.rfind("ctr_", 0) == 0) {
            const long long idx = parse_int(key.substr(4), line, key);
            if (idx < 1) fail(line, key, "CTR row indices start at 1");
            ctr_rows.emplace_back(static_cast<int>(idx), parse_list(value, line, key));
            saw_curve = true;
        } else if (key == "values") {
            s.values = parse_list(value, line, key);
            saw_values = true;
        } else if (key == "relevances") {
            s.relevances = parse_list(value, line, key);
            saw_relevances = true;
        } else if (key == "qualities") {
            s.qualities = parse_list(value, line, key);
        } else if (key == "self_estimates") {
            s.self_estimates = parse_list(value, line, key);
        } else if (key == "bids") {
            s.bids = parse_list(value, line, key);
        } else if (key == "conversion_rates") {
            s.conversion_rates = parse_list(value, line, key);
        } else if (key == "n") {
            s.steps_sweep = parse_sweep(value, line, key);
        } else if (key == "L") {
            s.explore_sweep = parse_sweep(value, line, key);
        } else if (key == "phases") {
            s.phases = static_cast<int>(parse_int(value, line, key));
            if (s.phases < 0) fail(line, key, "must be nonnegative");
        } else if (key == "trials") {
            s.trials = static_cast<int>(parse_int(value, line, key));
            if (s.trials < 0) fail(line, key, "must be nonnegative");
        } else if (key == "delta") {
            s.delta = parse_double(value, line, key);
        } else if (key == "epsilon") {
            s.epsilon = parse_double(value, line, key);
        } else if (key == "impression_value") {
            s.impression_value = parse_double(value, line, key);
        } else if (key == "click_value") {
            s.click_value = parse_double(value, line, key);
        } else if (key == "conversion_value") {
            s.conversion_value = parse_double(value, line, key);
        } else if (key == "seed") {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size())
                fail(line, key, "expected an unsigned integer");
            s.seed = v;
        } else if (key == "click_log") {
            if (value == "true") s.click_log = true;
            else if (value == "false") s.click_log = false;
            else fail(line, key, "expected true or false");
        } else if (key == "out") {
            s.out_dir = value;
        } else {
            fail(line, key, "unknown key");
        }
    }

    if (!saw_values) throw ScenarioError("values: required key is missing");
    if (!saw_relevances) throw ScenarioError("relevances: required key is missing");
    if (!saw_curve) throw ScenarioError("gamma: required key is missing (or provide ctr_<i> rows)");
    if (!s.gamma.empty() && !ctr_rows.empty())
        throw ScenarioError("gamma: gamma and ctr_<i> rows are mutually exclusive");

    if (!ctr_rows.empty()) {
        std::sort(ctr_rows.begin(), ctr_rows.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t i = 0; i < ctr_rows.size(); ++i) {
            if (ctr_rows[i].first != static_cast<int>(i) + 1)
                throw ScenarioError("ctr_" + std::to_string(i + 1) +
                                    ": CTR rows must be numbered 1..N without gaps");
            s.ctr_rows.push_back(std::move(ctr_rows[i].second));
        }
    }

    if (s.qualities.empty()) s.qualities = s.relevances;
    if (s.self_estimates.empty()) s.self_estimates = s.relevances;
    if (s.steps_sweep.empty())
        s.steps_sweep = {(s.mechanism == Mechanism::gsp || s.mechanism == Mechanism::laddered)
                             ? 1
                             : static_cast<int>(s.values.size())};
    if (s.explore_sweep.empty())
        s.explore_sweep = {(s.mechanism == Mechanism::gsp || s.mechanism == Mechanism::laddered)
                               ? 0
                               : 1};
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

std::string write_scenario(const Scenario& s) {
    std::ostringstream os;
    os << "# exploratory keyword auction scenario\n";
    os << "mechanism = " << mechanism_name(s.mechanism) << "\n";
    if (!s.gamma.empty()) os << "gamma = " << join(s.gamma) << "\n";
    for (size_t i = 0; i < s.ctr_rows.size(); ++i)
        os << "ctr_" << (i + 1) << " = " << join(s.ctr_rows[i]) << "\n";
    os << "values = " << join(s.values) << "\n";
    os << "relevances = " << join(s.relevances) << "\n";
    os << "qualities = " << join(s.qualities) << "\n";
    os << "self_estimates = " << join(s.self_estimates) << "\n";
    if (!s.bids.empty()) os << "bids = " << join(s.bids) << "\n";
    if (!s.conversion_rates.empty())
        os << "conversion_rates = " << join(s.conversion_rates) << "\n";
    os << "n = " << join_sweep(s.steps_sweep) << "\n";
    os << "L = " << join_sweep(s.explore_sweep) << "\n";
    os << "phases = " << s.phases << "\n";
    os << "trials = " << s.trials << "\n";
    os << "delta = " << join({s.delta}) << "\n";
    os << "epsilon = " << join({s.epsilon}) << "\n";
    os << "impression_value = " << join({s.impression_value}) << "\n";
    os << "click_value = " << join({s.click_value}) << "\n";
    os << "conversion_value = " << join({s.conversion_value}) << "\n";
    os << "seed = " << s.seed << "\n";
    os << "click_log = " << (s.click_log ? "true" : "false") << "\n";
    if (!s.out_dir.empty()) os << "out = " << s.out_dir << "\n";
    return os.str();
}

Scenario example_scenario() {
    Scenario s;
    s.mechanism = Mechanism::exp_gsp;
    s.gamma = {0.6, 0.3, 0.1};
    s.values = {10.0, 6.0, 4.0};
    s.relevances = {1.0, 1.0, 1.0};
    s.qualities = {1.0, 1.0, 1.0};
    s.self_estimates = {1.0, 1.0, 1.0};
    s.conversion_rates = {0.2, 0.2, 0.2};
    s.steps_sweep = {3};
    s.explore_sweep = {0, 1};
    s.phases = 0;
    s.trials = 0;
    s.seed = 42;
    return s;
}

namespace {

struct RankedGame {
    AuctionInstance base;            // explore config filled per sweep point
    std::vector<int> rank_to_user;   // rank -> original 1-based id
    std::vector<double> conversion_rates;  // rank order
    bool has_bids = false;
};

RankedGame rank_scenario(const Scenario& s) {
    const int n_bidders = static_cast<int>(s.values.size());
    auto expect_len = [&](const std::vector<double>& xs, const char* key) {
        if (static_cast<int>(xs.size()) != n_bidders)
            throw ScenarioError(std::string(key) + ": expected one entry per bidder (" +
                                std::to_string(n_bidders) + ")");
    };
    expect_len(s.relevances, "relevances");
    expect_len(s.qualities, "qualities");
    expect_len(s.self_estimates, "self_estimates");
    if (!s.bids.empty()) expect_len(s.bids, "bids");
    if (!s.conversion_rates.empty()) expect_len(s.conversion_rates, "conversion_rates");

    const bool separable_mechanism =
        s.mechanism == Mechanism::gsp || s.mechanism == Mechanism::exp_gsp;
    if (separable_mechanism && s.gamma.empty())
        throw ScenarioError("gamma: " + mechanism_name(s.mechanism) +
                            " requires separable position CTRs");
    if (!s.ctr_rows.empty() && static_cast<int>(s.ctr_rows.size()) != n_bidders)
        throw ScenarioError("ctr: expected one CTR row per bidder");
    if (s.phases > 0 && s.gamma.empty())
        throw ScenarioError("phases: estimation requires the separable model (gamma)");

    // Rank by quality * bid when bids are given, by quality * value otherwise
    // (the order the envy-free profiles presume).
    RankedGame game;
    game.has_bids = !s.bids.empty();
    const std::vector<double>& rank_key = game.has_bids ? s.bids : s.values;
    std::vector<int> order = rank_bidders(rank_key, s.qualities);

    game.base.curve = PositionCurve(s.gamma);
    game.base.model = s.ctr_rows.empty() ? CtrModel::separable : CtrModel::general;
    std::vector<std::vector<double>> ranked_rows;
    for (int rank = 0; rank < n_bidders; ++rank) {
        const int user = order[static_cast<size_t>(rank)];
        Bidder b;
        b.id = user + 1;
        b.value = s.values[static_cast<size_t>(user)];
        b.relevance = s.relevances[static_cast<size_t>(user)];
        b.quality = s.qualities[static_cast<size_t>(user)];
        b.self_estimate = s.self_estimates[static_cast<size_t>(user)];
        b.bid = game.has_bids ? s.bids[static_cast<size_t>(user)] : 0.0;
        game.base.bidders.push_back(b);
        game.rank_to_user.push_back(user + 1);
        if (!s.ctr_rows.empty()) ranked_rows.push_back(s.ctr_rows[static_cast<size_t>(user)]);
        game.conversion_rates.push_back(
            s.conversion_rates.empty() ? 0.0 : s.conversion_rates[static_cast<size_t>(user)]);
    }
    if (!ranked_rows.empty()) game.base.ctrs = CtrMatrix(std::move(ranked_rows));
    return game;
}

void validate_point(const RankedGame& game, int steps, int explore_slots) {
    AuctionInstance inst = game.base;
    inst.explore = {steps, explore_slots};
    const ValidationReport report = validate_instance(inst);
    if (!report.valid()) {
        const auto& issue = report.issues.front();
        std::ostringstream os;
        os << "sweep point (n=" << steps << ", L=" << explore_slots << "): " << issue.field
           << ": " << issue.message;
        throw ScenarioError(os.str());
    }
    if (!report.sne_safe) {
        std::ostringstream os;
        os << "sweep point (n=" << steps << ", L=" << explore_slots
           << "): not SNE-safe (need n <= min(K+1, K+L) and 2L <= n-1)";
        throw ScenarioError(os.str());
    }
}

// Welfare and clickability sums for the non-separable model, where the
// per-bidder CTR already folds in the relevance.
double general_welfare(const EffectiveCtrMatrix& eff, std::span<const double> values) {
    const int top = std::min(eff.effective_slots, static_cast<int>(values.size()));
    double total = 0.0;
    for (int m = 1; m <= std::min(top, eff.bidders()); ++m)
        total += eff.at(m, m) * values[static_cast<size_t>(m) - 1];
    return total;
}

double general_clickability(const EffectiveCtrMatrix& eff, int n_bidders) {
    double total = 0.0;
    for (int m = 1; m <= std::min({eff.effective_slots, eff.bidders(), n_bidders}); ++m)
        total += eff.at(m, m);
    return total;
}

CtrMatrix separable_matrix(const PositionCurve& curve, std::span<const double> relevances) {
    std::vector<std::vector<double>> rows;
    rows.reserve(relevances.size());
    for (double e : relevances) {
        std::vector<double> row;
        row.reserve(static_cast<size_t>(curve.slots()));
        for (int j = 1; j <= curve.slots(); ++j) row.push_back(curve.at(j) * e);
        rows.push_back(std::move(row));
    }
    return CtrMatrix(std::move(rows));
}

SweepResult evaluate_point(const Scenario& s, const RankedGame& game, int steps,
                           int explore_slots, bool want_click_log) {
    SweepResult out;
    out.steps = steps;
    out.explore_slots = explore_slots;

    AuctionInstance inst = game.base;
    inst.explore = {steps, explore_slots};

    const std::vector<double> values = inst.values();
    const std::vector<double> relevances = inst.relevances();
    const std::vector<double> qualities = inst.qualities();
    const int n_bidders = inst.num_bidders();
    const bool sne_pricing = s.mechanism == Mechanism::gsp || s.mechanism == Mechanism::exp_gsp;
    const bool separable = inst.model == CtrModel::separable;

    MetricsReport& m = out.metrics;
    BoundsReport& b = out.bounds;

    EffectiveCurve eff, eff0;
    if (separable) {
        eff = effective_position_ctrs(inst.curve, steps, explore_slots);
        eff0 = effective_position_ctrs(inst.curve, 1, 0);
    }

    if (sne_pricing) {
        BidProfile min_profile = min_sne_bids(eff, values, qualities);
        BidProfile max_profile = max_sne_bids(eff, values, qualities);
        out.min_bids = min_profile.bids;
        out.max_bids = max_profile.bids;
        out.prices = gsp_prices(min_profile.bids, qualities);

        m.baseline_revenue = expected_revenue(eff0, relevances, qualities, values);
        m.explored_revenue = expected_revenue(eff, relevances, qualities, values);
        m.rho = cost_of_uncertainty(m.baseline_revenue, m.explored_revenue, steps);

        const double top_rev = expected_revenue_top(eff0, relevances, qualities, values,
                                                    std::min(steps, inst.slots()));
        const RevenueBound rb =
            cou_bound(inst.curve, steps, explore_slots, top_rev, m.baseline_revenue);
        b.ratio_constant = rb.ratio_constant;
        b.cou_coarse = rb.coarse;
        b.cou_refined = rb.refined;
        b.top_revenue = top_rev;
        b.truthful_cou_bound =
            cou_bound_truthful(separable_matrix(inst.curve, relevances), steps, explore_slots)
                .coarse;

        // Maximum-profile revenue comparison, reported informationally.
        const BidProfile max0 = max_sne_bids(eff0, values, qualities);
        const double r0_max = revenue_at_bids(eff0, relevances, qualities, max0.bids);
        const double r_max = revenue_at_bids(eff, relevances, qualities, max_profile.bids);
        out.rho_at_max_sne =
            r0_max > 0.0 ? (r0_max - r_max / steps) / r0_max : kNaN;
    } else {
        // Truthful telescoping prices; bids default to the (dominant) values.
        const std::vector<double> pricing_bids = game.has_bids ? inst.bids() : values;
        const CtrMatrix ctrs =
            separable ? separable_matrix(inst.curve, relevances) : inst.ctrs;
        const EffectiveCtrMatrix effm = effective_ctr_matrix(ctrs, steps, explore_slots);
        const EffectiveCtrMatrix effm0 = effective_ctr_matrix(ctrs, 1, 0);
        out.prices = laddered_prices(effm, qualities, pricing_bids);

        m.baseline_revenue = laddered_revenue(effm0, qualities, pricing_bids);
        m.explored_revenue = laddered_revenue(effm, qualities, pricing_bids);
        m.rho = cost_of_uncertainty(m.baseline_revenue, m.explored_revenue, steps);

        const RevenueBound rb = cou_bound_truthful(ctrs, steps, explore_slots);
        b.ratio_constant = rb.ratio_constant;
        b.cou_coarse = rb.coarse;
        b.cou_refined = kNaN;  // no refined form for the truthful rule
        b.top_revenue = kNaN;
        b.truthful_cou_bound = rb.coarse;
        out.rho_at_max_sne = kNaN;
    }

    if (separable) {
        m.baseline_efficiency = efficiency(eff0, relevances, values);
        m.explored_efficiency = efficiency(eff, relevances, values);
        m.baseline_user_experience = user_experience(eff0, relevances);
        m.explored_user_experience = user_experience(eff, relevances);
    } else {
        const EffectiveCtrMatrix effm = effective_ctr_matrix(inst.ctrs, steps, explore_slots);
        const EffectiveCtrMatrix effm0 = effective_ctr_matrix(inst.ctrs, 1, 0);
        m.baseline_efficiency = general_welfare(effm0, values);
        m.explored_efficiency = general_welfare(effm, values);
        m.baseline_user_experience = general_clickability(effm0, n_bidders);
        m.explored_user_experience = general_clickability(effm, n_bidders);
    }
    m.revenue_per_impression = m.explored_revenue / steps;
    m.efficiency_loss = (m.baseline_efficiency - m.explored_efficiency / steps) /
                        m.baseline_efficiency;
    m.user_experience_loss =
        (m.baseline_user_experience - m.explored_user_experience / steps) /
        m.baseline_user_experience;

    b.eff_bound = kNaN;
    b.ordered_eff_bound = kNaN;
    b.alpha = b.beta = b.eta = b.omega = kNaN;
    b.explore_value = b.non_explore_value = kNaN;
    if (separable) {
        bool positive = true;
        for (int i = 0; i < steps; ++i)
            positive = positive && relevances[static_cast<size_t>(i)] *
                                           values[static_cast<size_t>(i)] >
                                       0.0;
        if (positive) {
            const EfficiencyBound er =
                efficiency_loss_bound(inst.curve, relevances, values, steps, explore_slots);
            b.eff_bound = er.general;
            b.ordered_eff_bound = er.ordered_applicable ? er.ordered : kNaN;
            b.alpha = er.alpha;
            b.beta = er.beta;
            b.eta = er.eta;
            b.omega = er.omega;
            b.explore_value = er.explore_value;
            b.non_explore_value = er.non_explore_value;
        }
    }

    if (s.phases > 0) {
        const AllocationSchedule schedule =
            build_schedule(n_bidders, inst.slots(), steps, explore_slots);
        const std::uint64_t point_seed =
            derive_seed(s.seed, static_cast<std::uint64_t>(steps),
                        static_cast<std::uint64_t>(explore_slots));
        const ClickLog log =
            simulate_phases(inst, schedule, s.phases, game.conversion_rates, point_seed);

        EstimationOutput& est = out.estimation;
        est.enabled = true;
        est.phases = s.phases;
        est.epsilon = s.epsilon;
        est.clicks = log.clicks;
        est.conversions = log.conversions;
        est.relevance_estimate.assign(static_cast<size_t>(n_bidders), kNaN);
        est.radius.assign(static_cast<size_t>(n_bidders), kNaN);
        est.valuation_estimate.assign(static_cast<size_t>(n_bidders), kNaN);
        for (int rank = 1; rank <= n_bidders; ++rank) {
            const double theta = eff.theta(rank);
            if (!(theta > 0.0)) continue;
            const double e_hat =
                estimate_relevance(log.clicks[static_cast<size_t>(rank) - 1], theta, s.phases);
            est.relevance_estimate[static_cast<size_t>(rank) - 1] = e_hat;
            est.radius[static_cast<size_t>(rank) - 1] =
                confidence_radius(theta, s.epsilon, s.phases);
            if (e_hat > 0.0) {
                est.valuation_estimate[static_cast<size_t>(rank) - 1] = estimate_valuation(
                    steps, s.phases, log.clicks[static_cast<size_t>(rank) - 1],
                    log.conversions[static_cast<size_t>(rank) - 1], s.impression_value,
                    s.click_value, s.conversion_value, theta, e_hat);
            }
        }
        if (s.trials > 0)
            est.coverage_rate = coverage_test(inst, s.delta, s.epsilon, s.trials, point_seed);
        if (want_click_log) {
            std::ostringstream os;
            log.write_csv(os);
            out.click_log_csv = os.str();
        }
    }
    return out;
}

const std::vector<std::string>& metric_columns() {
    static const std::vector<std::string> cols = {
        "R0",        "R",         "R_per_impression", "rho",       "c",
        "cou_bound_coarse", "cou_bound_refined", "E0", "E",        "eff_loss",
        "eff_bound", "ordered_eff_bound",         "U0", "U"};
    return cols;
}

double metric_value(const SweepResult& p, const std::string& name) {
    const MetricsReport& m = p.metrics;
    const BoundsReport& b = p.bounds;
    if (name == "R0") return m.baseline_revenue;
    if (name == "R") return m.explored_revenue;
    if (name == "R_per_impression") return m.revenue_per_impression;
    if (name == "rho") return m.rho;
    if (name == "c") return b.ratio_constant;
    if (name == "cou_bound_coarse") return b.cou_coarse;
    if (name == "cou_bound_refined") return b.cou_refined;
    if (name == "E0") return m.baseline_efficiency;
    if (name == "E") return m.explored_efficiency;
    if (name == "eff_loss") return m.efficiency_loss;
    if (name == "eff_bound") return b.eff_bound;
    if (name == "ordered_eff_bound") return b.ordered_eff_bound;
    if (name == "U0") return m.baseline_user_experience;
    if (name == "U") return m.explored_user_experience;
    return kNaN;
}

std::string results_csv(const RunResult& result, const Scenario& s, int n_bidders) {
    std::ostringstream os;
    os << "n,L";
    for (const auto& col : metric_columns()) os << ',' << col;
    const bool with_estimates = s.phases > 0;
    if (with_estimates) {
        for (int u = 1; u <= n_bidders; ++u) os << ",e_hat_" << u;
        for (int u = 1; u <= n_bidders; ++u) os << ",e_radius_" << u;
        for (int u = 1; u <= n_bidders; ++u) os << ",v_hat_" << u;
    }
    os << '\n';

    // rank -> user order inversion for the per-bidder columns
    std::vector<int> user_to_rank(static_cast<size_t>(n_bidders) + 1, 0);
    for (int rank = 1; rank <= static_cast<int>(result.rank_to_user.size()); ++rank)
        user_to_rank[static_cast<size_t>(result.rank_to_user[static_cast<size_t>(rank) - 1])] =
            rank;

    for (const auto& p : result.points) {
        os << p.steps << ',' << p.explore_slots;
        for (const auto& col : metric_columns()) os << ',' << format_number(metric_value(p, col));
        if (with_estimates) {
            auto emit = [&](const std::vector<double>& xs) {
                for (int u = 1; u <= n_bidders; ++u) {
                    const int rank = user_to_rank[static_cast<size_t>(u)];
                    const double v = (p.estimation.enabled && rank >= 1)
                                         ? xs[static_cast<size_t>(rank) - 1]
                                         : kNaN;
                    os << ',' << format_number(v);
                }
            };
            emit(p.estimation.relevance_estimate);
            emit(p.estimation.radius);
            emit(p.estimation.valuation_estimate);
        }
        os << '\n';
    }
    return os.str();
}

nlohmann::json scenario_json(const Scenario& s) {
    nlohmann::json j;
    j["mechanism"] = mechanism_name(s.mechanism);
    if (!s.gamma.empty()) j["gamma"] = s.gamma;
    if (!s.ctr_rows.empty()) j["ctr"] = s.ctr_rows;
    j["values"] = s.values;
    j["relevances"] = s.relevances;
    j["qualities"] = s.qualities;
    j["self_estimates"] = s.self_estimates;
    if (!s.bids.empty()) j["bids"] = s.bids;
    if (!s.conversion_rates.empty()) j["conversion_rates"] = s.conversion_rates;
    j["n"] = s.steps_sweep;
    j["L"] = s.explore_sweep;
    j["phases"] = s.phases;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    return j;
}

nlohmann::json point_json(const SweepResult& p) {
    nlohmann::json j;
    j["n"] = p.steps;
    j["L"] = p.explore_slots;
    for (const auto& col : metric_columns()) {
        const double v = metric_value(p, col);
        j[col] = std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
    }
    j["rho_at_max_sne"] =
        std::isnan(p.rho_at_max_sne) ? nlohmann::json() : nlohmann::json(p.rho_at_max_sne);
    if (!p.min_bids.empty()) j["min_sne_bids"] = p.min_bids;
    if (!p.max_bids.empty()) j["max_sne_bids"] = p.max_bids;
    j["prices"] = p.prices;
    if (p.estimation.enabled) {
        nlohmann::json e;
        e["phases"] = p.estimation.phases;
        e["epsilon"] = p.estimation.epsilon;
        e["clicks"] = p.estimation.clicks;
        e["conversions"] = p.estimation.conversions;
        auto sanitize = [](const std::vector<double>& xs) {
            nlohmann::json arr = nlohmann::json::array();
            for (double x : xs) arr.push_back(std::isnan(x) ? nlohmann::json() : nlohmann::json(x));
            return arr;
        };
        e["relevance_estimate"] = sanitize(p.estimation.relevance_estimate);
        e["radius"] = sanitize(p.estimation.radius);
        e["valuation_estimate"] = sanitize(p.estimation.valuation_estimate);
        if (!p.estimation.coverage_rate.empty())
            e["coverage_rate"] = p.estimation.coverage_rate;
        j["estimation"] = e;
    }
    return j;
}

}  // namespace

void verify_scenario(const Scenario& scenario) {
    const RankedGame game = rank_scenario(scenario);
    if ((scenario.mechanism == Mechanism::gsp || scenario.mechanism == Mechanism::laddered) &&
        (scenario.steps_sweep != std::vector<int>{1} ||
         scenario.explore_sweep != std::vector<int>{0}))
        throw ScenarioError("n: " + mechanism_name(scenario.mechanism) +
                            " fixes n = 1 and L = 0");
    for (int steps : scenario.steps_sweep)
        for (int explore : scenario.explore_sweep) validate_point(game, steps, explore);
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    verify_scenario(scenario);
    const RankedGame game = rank_scenario(scenario);

    std::vector<std::pair<int, int>> grid;
    for (int steps : scenario.steps_sweep)
        for (int explore : scenario.explore_sweep) grid.emplace_back(steps, explore);

    RunResult result;
    result.rank_to_user = game.rank_to_user;
    result.points.resize(grid.size());

    const bool want_log = scenario.click_log || options.collect_click_log;
    const int threads = std::max(1, options.threads);
    if (threads == 1 || grid.size() <= 1) {
        for (size_t i = 0; i < grid.size(); ++i)
            result.points[i] =
                evaluate_point(scenario, game, grid[i].first, grid[i].second, want_log);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
                        result.points[i] = evaluate_point(scenario, game, grid[i].first,
                                                          grid[i].second, want_log);
                } catch (...) {
                    errors[static_cast<size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    result.results_csv = results_csv(result, scenario, static_cast<int>(scenario.values.size()));
    result.plot_csv = emit_plot_data(result.points);

    nlohmann::json summary;
    summary["scenario"] = scenario_json(scenario);
    summary["results"] = nlohmann::json::array();
    for (const auto& p : result.points) summary["results"].push_back(point_json(p));
    result.summary_json = summary.dump(2) + "\n";
    return result;
}

std::string emit_plot_data(const std::vector<SweepResult>& points) {
    std::ostringstream os;
    os << "n,L,metric,value\n";
    for (const auto& p : points) {
        for (const auto& col : metric_columns()) {
            os << p.steps << ',' << p.explore_slots << ',' << col << ','
               << format_number(metric_value(p, col)) << '\n';
        }
    }
    return os.str();
}

void write_outputs(const RunResult& result, const Scenario& scenario, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto dump = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file '" + name + "'");
        out << content;
    };
    dump("results.csv", result.results_csv);
    dump("plot_data.csv", result.plot_csv);
    dump("summary.json", result.summary_json);
    for (const auto& p : result.points) {
        if (p.click_log_csv.empty()) continue;
        std::ostringstream name;
        name << "clicks_n" << p.steps << "_L" << p.explore_slots << ".csv";
        dump(name.str(), p.click_log_csv);
    }
    (void)scenario;
}

}  // namespace expgsp
