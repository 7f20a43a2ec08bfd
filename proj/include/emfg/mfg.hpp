// Two-population equilibrium computation: price trajectories from the current
// flows, exploitability monitors, and damped fictitious play over LP best
// responses.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emfg/best_response.hpp"
#include "emfg/grids.hpp"
#include "emfg/market.hpp"
#include "emfg/payoffs.hpp"

namespace emfg {

// Everything the equilibrium loop needs, already discretized.
struct ModelInstance {
    GridSpec cost_grid;
    GridSpec factor_grid;
    TransitionOperator cost_transition;
    TransitionOperator factor_transition;
    std::vector<double> omega0;    // conventional fleet by cost, GW
    std::vector<double> eta0;      // not-yet-entered projects by capacity factor, GW
    std::vector<double> eta_bar0;  // all projects (installed + potential), GW
    MeasureFlow eta_bar;           // equality evolution of eta_bar0, never stops
    std::vector<DemandSegment> segments;
    MarketParams market;
    ConventionalEconomics conv_econ;
    RenewableEconomics ren_econ;
};

struct FPConfig {
    int max_iters = 300;
    double exploitability_target = 0.0;  // GBP; loop stops when both monitors are <= this
    int threads = 2;
    bool validate_iterates = false;      // feasibility-check every averaged iterate
    double validate_tol = 1e-8;
    std::optional<MeasureFlow> seed_omega;  // default: immediate-stop flow from omega0
    std::optional<MeasureFlow> seed_eta;    // seeds shape iteration-1 prices only
};

struct ExploitabilityPair {
    double e_c = 0.0;
    double e_r = 0.0;
};

struct EquilibriumResult {
    MeasureFlow omega;
    MeasureFlow eta;
    MeasureFlow eta_bar;
    PriceTrajectories prices;  // aligned with model segments
    std::vector<ExploitabilityPair> history;  // entry i: exploitability at the top of iteration i+1
    ExploitabilityPair final_exploitability;  // of the returned flows
    std::vector<double> conventional_capacity_gw;  // per time step
    std::vector<double> renewable_entered_gw;
    int iterations = 0;
    std::string termination_reason;
    int feasibility_violations = 0;  // populated when validate_iterates is on
};

// Segment prices at every time step for the given flows.
PriceTrajectories price_trajectories(const ModelInstance& model, const MeasureFlow& omega,
                                     const MeasureFlow& eta, int threads = 1);

// Best-response gain over the current flows at the prices those flows induce;
// each component is >= 0 up to solver tolerance and is clamped at 0.
ExploitabilityPair exploitability(const ModelInstance& model, const MeasureFlow& omega,
                                  const MeasureFlow& eta, const PriceTrajectories& prices,
                                  int threads = 1);

EquilibriumResult fictitious_play(const ModelInstance& model, const FPConfig& cfg);

// Convert a total discounted gain in GBP to GBP per MW of installed capacity
// per hour of the horizon.
double exploitability_per_mw_hour(double e_gbp, double capacity_gw, double horizon_years);

}  // namespace emfg
