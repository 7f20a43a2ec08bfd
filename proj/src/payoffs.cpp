#include "emfg/payoffs.hpp"

#include <cmath>

namespace emfg {

double conventional_gain_term(double t, const ConventionalEconomics& e) {
    return -e.kappa_c - std::exp(-e.gamma_c * t) * e.k_c * (e.rho + e.gamma_c);
}

double renewable_gain_term(double t, double horizon, const RenewableEconomics& e) {
    return e.kappa_r + e.rho * e.k_r
         + e.gamma_r * e.k_r * std::exp(-(e.rho + e.gamma_r) * (horizon - t));
}

namespace {

void require_aligned(const PriceTrajectories& prices, const std::vector<DemandSegment>& segments,
                     const GridSpec& g) {
    if (prices.size() != segments.size())
        throw ValidationError("reward matrix: price trajectories do not match segments");
    for (const auto& p : prices)
        if (static_cast<int>(p.size()) != g.n_times())
            throw ValidationError("reward matrix: price series length does not match grid");
}

}  // namespace

std::vector<double> conventional_reward_matrix(const PriceTrajectories& prices,
                                               const std::vector<DemandSegment>& segments,
                                               const GridSpec& cost_grid,
                                               const ConventionalEconomics& e,
                                               const MarketParams& mp) {
    require_aligned(prices, segments, cost_grid);
    const int nt = cost_grid.n_times();
    const int nn = cost_grid.n_nodes();
    std::vector<double> r(static_cast<size_t>(nt) * nn);
    for (int i = 0; i < nt; ++i) {
        const double gain = conventional_gain_term(cost_grid.time(i), e);
        for (int j = 0; j < nn; ++j) {
            double energy = 0.0;
            for (size_t s = 0; s < segments.size(); ++s)
                energy += segments[s].hours_weight
                        * profit(prices[s][i] - cost_grid.node(j), mp.epsilon);
            r[static_cast<size_t>(i) * nn + j] = energy * kMwhPerGwYear + gain;
        }
    }
    return r;
}

std::vector<double> renewable_reward_matrix(const PriceTrajectories& prices,
                                            const std::vector<DemandSegment>& segments,
                                            const GridSpec& factor_grid,
                                            const RenewableEconomics& e,
                                            const MarketParams&) {
    require_aligned(prices, segments, factor_grid);
    const int nt = factor_grid.n_times();
    const int nn = factor_grid.n_nodes();
    std::vector<double> r(static_cast<size_t>(nt) * nn);
    for (int i = 0; i < nt; ++i) {
        const double gain = renewable_gain_term(factor_grid.time(i), factor_grid.t_horizon, e);
        double price_mix = 0.0;
        for (size_t s = 0; s < segments.size(); ++s)
            price_mix += segments[s].hours_weight * prices[s][i];
        for (int j = 0; j < nn; ++j)
            r[static_cast<size_t>(i) * nn + j] =
                -price_mix * factor_grid.node(j) * kMwhPerGwYear + gain;
    }
    return r;
}

double discounted_flow_value(const MeasureFlow& flow, const std::vector<double>& rewards,
                             double rho, double dt) {
    if (rewards.size() != flow.values.size())
        throw ValidationError("discounted_flow_value: reward matrix does not match flow shape");
    double v = 0.0;
    for (int i = 0; i < flow.n_times; ++i) {
        const double disc = std::exp(-rho * dt * i) * dt;
        double row = 0.0;
        for (int j = 0; j < flow.n_nodes; ++j)
            row += rewards[static_cast<size_t>(i) * flow.n_nodes + j] * flow.at(i, j);
        v += disc * row;
    }
    return v;
}

double conventional_objective(const MeasureFlow& omega, const PriceTrajectories& prices,
                              const std::vector<DemandSegment>& segments,
                              const GridSpec& cost_grid, const ConventionalEconomics& e,
                              const MarketParams& mp) {
    return discounted_flow_value(
        omega, conventional_reward_matrix(prices, segments, cost_grid, e, mp), e.rho,
        cost_grid.dt());
}

double renewable_objective(const MeasureFlow& eta, const PriceTrajectories& prices,
                           const std::vector<DemandSegment>& segments,
                           const GridSpec& factor_grid, const RenewableEconomics& e,
                           const MarketParams& mp) {
    return discounted_flow_value(
        eta, renewable_reward_matrix(prices, segments, factor_grid, e, mp), e.rho,
        factor_grid.dt());
}

}  // namespace emfg
