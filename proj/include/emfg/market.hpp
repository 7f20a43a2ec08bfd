// Merit-order clearing: smoothed bid fractions, the profit function they
// integrate to, baseline supply, renewable output and the two price
// constructions (bisection on the supply curve, and its discretized bound).
#pragma once

#include <span>
#include <string>
#include <vector>

#include "emfg/grids.hpp"

namespace emfg {

struct MarketParams {
    double epsilon = 0.5;                   // bid smoothing width, GBP/MWh
    double price_cap = 150.0;               // GBP/MWh
    double baseline_max_gw = 12.1;          // baseline supply at the cap
    double conventional_capacity_gw = 35.9;
    double renewable_installed_gw = 35.6;
    double renewable_potential_gw = 47.0;
    double price_tol_rel = 1e-6;            // bisection width target, fraction of the cap
};

// One demand segment (e.g. peak vs off-peak): the fraction of calendar hours
// it covers and its average demand at each time step.
struct DemandSegment {
    std::string label;
    double hours_weight = 0.0;
    std::vector<double> demand_gw;
};

// Fraction of a unit bid that clears at margin x: 0 below 0, 1 above epsilon,
// sine bridge in between. Continuous and nondecreasing.
double bid_fraction(double x, double epsilon);

// Integral of bid_fraction from 0 to x: 0 for x <= 0, x - epsilon/2 for
// x >= epsilon, x/2 - (epsilon/2 pi) sin(pi x / epsilon) on the bridge.
// 1-Lipschitz and convex-free of kinks.
double profit(double x, double epsilon);

// Always-on supply ramp: baseline_max_gw * p / price_cap, clamped to [0, cap].
double baseline_supply(double p, const MarketParams& mp);

// Total renewable generation of the entered projects: sum of node values
// weighted by (eta_bar - eta); tiny negative rounding results clamp to 0.
double renewable_output(std::span<const double> eta_bar_row, std::span<const double> eta_row,
                        const GridSpec& factor_grid);

// Conventional capacity offered at price p given the cost distribution omega.
double conventional_supply(std::span<const double> omega_row, double p,
                           const GridSpec& cost_grid, const MarketParams& mp);

// inf{ p : supply(p) >= max(residual_demand, 0) } capped at price_cap, found
// by bisection to within price_tol_rel * price_cap. residual_demand arrives
// with renewable output already subtracted; the positive part happens here.
double clearing_price(std::span<const double> omega_row, double residual_demand,
                      const GridSpec& cost_grid, const MarketParams& mp);

// Inverse-supply quadrature on n price levels; differs from clearing_price by
// at most price_cap / n.
double discretized_price(std::span<const double> omega_row, double residual_demand,
                         const GridSpec& cost_grid, const MarketParams& mp, int n);

}  // namespace emfg
