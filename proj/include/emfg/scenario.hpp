// Scenario ingestion and result persistence: structured-text scenario files,
// demand CSVs, policy application, model assembly and the run output bundle.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "emfg/mfg.hpp"

namespace emfg {

// Resolved scenario: every knob a run needs, with units in the field names
// where they are not dimensionless.
struct ScenarioConfig {
    // processes
    double k_per_year = 0.5;
    double cost_mean_gbp_mwh = 33.4;
    double cost_std_gbp_mwh = 11.0;
    double k_bar_per_year = 0.5;
    double factor_mean = 0.4261;
    double factor_std = 0.0443;

    // grids
    int cost_n_x = 60;
    double cost_x_max_gbp_mwh = -1.0;  // <= 0 means mean + 10 std
    int factor_n_x = 60;
    int n_t = 60;
    double horizon_years = 15.0;

    // market
    MarketParams market;

    // economics (as quoted in their native units)
    double rho_per_year = 0.086;
    double kappa_c_gbp_per_mw_year = 30.0;
    double salvage_gbp_per_kw = 0.0;
    double gamma_c_per_year = 0.1;
    double capital_gbp_per_kw = 1377.0;
    double om_fraction_of_capital = 0.0125;
    double gamma_r_per_year = 0.069314718055994531;

    // policy
    double renewable_subsidy_fraction = 0.0;
    double capacity_payment_gbp_per_kw_year = 0.0;

    // demand
    std::string demand_file;  // resolved to an absolute-ish path at load time
    std::vector<std::pair<std::string, double>> segment_weights;

    // fictitious play
    int max_iters = 300;
    double exploitability_target_gbp = 0.0;
};

// Parse a scenario file ([section] headers, key = value lines, # comments).
// Unknown keys are errors; missing sections fall back to the defaults above.
ScenarioConfig load_scenario(const std::string& path);

// Subsidy scales the build cost, the capacity payment offsets the conventional
// fixed cost; everything converts to per-GW units here.
std::pair<ConventionalEconomics, RenewableEconomics> apply_policy(const ScenarioConfig& cfg);

// Demand CSV with columns time_index,segment,demand_gw; every configured
// segment must cover time indices 0..n_times-1 exactly once.
std::vector<DemandSegment> load_demand(const std::string& path, int n_times,
                                       const std::vector<std::pair<std::string, double>>& weights);

// Calibrated processes plus the assembled model.
struct AssembledModel {
    ModelInstance model;
    CIRParams cost_process;
    JacobiParams factor_process;
    std::vector<std::string> warnings;
};

AssembledModel assemble_model(const ScenarioConfig& cfg);

// Write prices.csv, capacities.csv, exploitability.csv, the three flow CSVs,
// a reloadable config echo and manifest.txt into out_dir; returns the manifest
// path. All CSVs are byte-deterministic for identical inputs.
std::string write_results(const EquilibriumResult& result, const ScenarioConfig& cfg,
                          const AssembledModel& assembled, const std::string& out_dir,
                          const std::string& scenario_path, double wall_time_seconds);

void write_config_echo(const ScenarioConfig& cfg, const std::string& path);

// Readers for the bundle (used by compare and the round-trip tests).
std::map<std::string, std::vector<double>> read_prices_csv(const std::string& path);
struct CapacitySeries {
    std::vector<double> conventional_gw;
    std::vector<double> renewable_entered_gw;
};
CapacitySeries read_capacities_csv(const std::string& path);

}  // namespace emfg
