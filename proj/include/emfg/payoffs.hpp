// Producer economics: time-dependent gain terms, reward-rate matrices over the
// space-time grid, and discounted objective values of measure flows.
//
// Unit conventions: masses are GW of installed capacity, prices GBP/MWh, time
// in years. Cost parameters are stored per GW. Energy revenue converts via
// kMwhPerGwYear so every reward rate below is GBP per GW per year.
#pragma once

#include <vector>

#include "emfg/grids.hpp"
#include "emfg/market.hpp"

namespace emfg {

// MWh produced by 1 GW running for one year at full output.
inline constexpr double kMwhPerGwYear = 8760.0 * 1000.0;

struct ConventionalEconomics {
    double rho;      // discount rate, 1/year
    double kappa_c;  // fixed running cost, GBP per GW per year
    double k_c;      // decommissioning salvage at exit, GBP per GW
    double gamma_c;  // salvage decay rate, 1/year
};

struct RenewableEconomics {
    double rho;
    double kappa_r;  // operation and maintenance, GBP per GW per year
    double k_r;      // build cost at entry, GBP per GW
    double gamma_r;  // build-cost decay rate, 1/year
};

// Holding rate of an active conventional producer net of the salvage
// opportunity: f(t) = -kappa_c - e^{-gamma_c t} k_c (rho + gamma_c).
double conventional_gain_term(double t, const ConventionalEconomics& e);

// Rate earned by a project that has not entered yet, i.e. the avoided cost of
// ownership: f(t) = kappa_r + rho k_r + gamma_r k_r e^{-(rho+gamma_r)(T-t)}.
double renewable_gain_term(double t, double horizon, const RenewableEconomics& e);

// Prices per segment per time step: one vector of length n_times per segment,
// aligned with the segments vector passed alongside.
using PriceTrajectories = std::vector<std::vector<double>>;

// Reward rate r(i, j) in GBP per GW per year, row-major (n_times x n_nodes).
// Conventional: hours-weighted profit at the segment prices plus the gain term.
std::vector<double> conventional_reward_matrix(const PriceTrajectories& prices,
                                               const std::vector<DemandSegment>& segments,
                                               const GridSpec& cost_grid,
                                               const ConventionalEconomics& e,
                                               const MarketParams& mp);

// Renewable (for the not-yet-entered measure): hours-weighted foregone energy
// revenue -P * S plus the gain term.
std::vector<double> renewable_reward_matrix(const PriceTrajectories& prices,
                                            const std::vector<DemandSegment>& segments,
                                            const GridSpec& factor_grid,
                                            const RenewableEconomics& e,
                                            const MarketParams& mp);

// sum_i e^{-rho t_i} dt sum_j r(i, j) flow(i, j); the value every best
// response and exploitability below is measured in (GBP).
double discounted_flow_value(const MeasureFlow& flow, const std::vector<double>& rewards,
                             double rho, double dt);

double conventional_objective(const MeasureFlow& omega, const PriceTrajectories& prices,
                              const std::vector<DemandSegment>& segments,
                              const GridSpec& cost_grid, const ConventionalEconomics& e,
                              const MarketParams& mp);

double renewable_objective(const MeasureFlow& eta, const PriceTrajectories& prices,
                           const std::vector<DemandSegment>& segments,
                           const GridSpec& factor_grid, const RenewableEconomics& e,
                           const MarketParams& mp);

}  // namespace emfg
