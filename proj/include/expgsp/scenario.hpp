#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "expgsp/equilibrium.hpp"
#include "expgsp/estimation.hpp"
#include "expgsp/model.hpp"

namespace expgsp {

/// Parse or validation failure; the CLI maps it to exit code 2.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mechanism { gsp, exp_gsp, laddered, exp_laddered };

std::string mechanism_name(Mechanism m);
Mechanism parse_mechanism(const std::string& name);

/// One experiment description: the game, the mechanism flavor, the (n, L)
/// sweep, and the simulation knobs. Bidder lists are in user order.
struct Scenario {
    Mechanism mechanism = Mechanism::exp_gsp;
    std::vector<double> gamma;                  // separable position CTRs
    std::vector<std::vector<double>> ctr_rows;  // non-separable per-bidder CTRs
    std::vector<double> values;
    std::vector<double> relevances;
    std::vector<double> qualities;       // defaults to relevances
    std::vector<double> self_estimates;  // defaults to relevances
    std::vector<double> bids;            // optional; equilibrium bids otherwise
    std::vector<double> conversion_rates;
    std::vector<int> steps_sweep{};      // n values; defaults per mechanism
    std::vector<int> explore_sweep{};    // L values
    int phases = 0;
    int trials = 0;
    double delta = 0.1;
    double epsilon = 0.05;
    double impression_value = 0.0;
    double click_value = 0.0;
    double conversion_value = 1.0;
    std::uint64_t seed = 0;
    bool click_log = false;
    std::string out_dir;

    bool operator==(const Scenario&) const = default;
};

/// Flat key = value text, one key per line, `#` comments. Throws
/// ScenarioError with the offending line and key on malformed input.
Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

/// Canonical serialization; parse_scenario_text(write_scenario(s)) == s.
std::string write_scenario(const Scenario& s);

/// The small worked example shipped with `init --example`.
Scenario example_scenario();

struct EstimationOutput {
    bool enabled = false;
    int phases = 0;
    double epsilon = 0.0;
    std::vector<double> relevance_estimate;  // per rank; NaN when never shown
    std::vector<double> radius;
    std::vector<double> valuation_estimate;
    std::vector<long long> clicks;
    std::vector<long long> conversions;
    std::vector<double> coverage_rate;  // only when trials > 0
};

struct SweepResult {
    int steps = 1;
    int explore_slots = 0;
    MetricsReport metrics;
    BoundsReport bounds;
    std::vector<double> min_bids;        // rank order; empty for truthful rules
    std::vector<double> max_bids;
    std::vector<double> prices;          // per-click prices at the evaluated bids
    double rho_at_max_sne = 0.0;         // informational only
    EstimationOutput estimation;
    std::string click_log_csv;           // populated when requested
};

struct RunOptions {
    int threads = 1;
    bool collect_click_log = false;  // overrides Scenario::click_log when true
};

struct RunResult {
    std::vector<SweepResult> points;        // ordered by sweep index
    std::vector<int> rank_to_user;          // rank -> original 1-based id
    std::string results_csv;
    std::string plot_csv;
    std::string summary_json;
};

/// Ranks the bidders, validates every sweep point, then evaluates metrics,
/// bounds, equilibrium bids and (when phases > 0) the estimation report for
/// each point. Throws ScenarioError for invalid configurations and
/// std::domain_error for numeric failures (exit codes 2 and 3).
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Long-format table (n, L, metric, value) with one row per CSV cell so
/// actual and bound series can be overlaid by metric name.
std::string emit_plot_data(const std::vector<SweepResult>& points);

/// Validation-only pass over every sweep point; throws ScenarioError on the
/// first failure.
void verify_scenario(const Scenario& scenario);

/// Writes results.csv, plot_data.csv, summary.json and any click logs under
/// `dir`, creating it if needed.
void write_outputs(const RunResult& result, const Scenario& scenario, const std::string& dir);

/// Locale-independent number formatting used across all outputs:
/// 12 significant digits, '.' decimal separator.
std::string format_number(double v);

}  // namespace expgsp
