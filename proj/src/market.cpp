#include "emfg/market.hpp"

#include <algorithm>
#include <cmath>

namespace emfg {

double bid_fraction(double x, double epsilon) {
    if (x <= 0.0) return 0.0;
    if (x >= epsilon) return 1.0;
    constexpr double pi = 3.14159265358979323846;
    return 0.5 * (1.0 + std::sin(-pi / 2.0 + pi * x / epsilon));
}

double profit(double x, double epsilon) {
    if (x <= 0.0) return 0.0;
    if (x >= epsilon) return x - 0.5 * epsilon;
    constexpr double pi = 3.14159265358979323846;
    return 0.5 * x - (epsilon / (2.0 * pi)) * std::sin(pi * x / epsilon);
}

double baseline_supply(double p, const MarketParams& mp) {
    const double pc = std::clamp(p, 0.0, mp.price_cap);
    return mp.baseline_max_gw * pc / mp.price_cap;
}

double renewable_output(std::span<const double> eta_bar_row, std::span<const double> eta_row,
                        const GridSpec& factor_grid) {
    double r = 0.0;
    for (int j = 0; j < factor_grid.n_nodes(); ++j)
        r += factor_grid.node(j) * (eta_bar_row[j] - eta_row[j]);
    return std::max(r, 0.0);
}

double conventional_supply(std::span<const double> omega_row, double p,
                           const GridSpec& cost_grid, const MarketParams& mp) {
    double s = 0.0;
    for (int j = 0; j < cost_grid.n_nodes(); ++j)
        s += bid_fraction(p - cost_grid.node(j), mp.epsilon) * omega_row[j];
    return s;
}

namespace {

double total_supply(std::span<const double> omega_row, double p, const GridSpec& g,
                    const MarketParams& mp) {
    return conventional_supply(omega_row, p, g, mp) + baseline_supply(p, mp);
}

}  // namespace

double clearing_price(std::span<const double> omega_row, double residual_demand,
                      const GridSpec& cost_grid, const MarketParams& mp) {
    const double y = std::max(residual_demand, 0.0);
    if (y <= 0.0) return 0.0;
    if (total_supply(omega_row, mp.price_cap, cost_grid, mp) < y) return mp.price_cap;
    double lo = 0.0;              // supply(lo) < y
    double hi = mp.price_cap;     // supply(hi) >= y
    const double tol = mp.price_tol_rel * mp.price_cap;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (total_supply(omega_row, mid, cost_grid, mp) >= y)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double discretized_price(std::span<const double> omega_row, double residual_demand,
                         const GridSpec& cost_grid, const MarketParams& mp, int n) {
    if (n < 1) throw ValidationError("discretized_price: need at least one price level");
    const double y = std::max(residual_demand, 0.0);
    const double step = mp.price_cap / n;
    double theta = 0.0;
    double x_k = total_supply(omega_row, 0.0, cost_grid, mp);
    for (int k = 0; k < n; ++k) {
        const double x_next = total_supply(omega_row, (k + 1) * step, cost_grid, mp);
        const double gap = x_next - x_k;
        double term;
        if (gap <= 1e-300)
            term = (y > x_k) ? 1.0 : 0.0;  // flat stretch: limit of the ratio
        else
            term = std::min(std::max(y - x_k, 0.0) / gap, 1.0);
        theta += term;
        x_k = x_next;
    }
    return theta * step;
}

}  // namespace emfg
