#include "emfg/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace emfg {

namespace {

struct BestResponseOutcome {
    MeasureFlow flow;
    double value = 0.0;
};

BestResponseOutcome conventional_best_response(const ModelInstance& m,
                                               const std::vector<double>& rewards) {
    LPProblem lp = build_stopping_lp(rewards, m.conv_econ.rho, m.cost_transition, m.omega0,
                                     m.cost_grid.n_t);
    auto [flow, value] = solve_best_response(lp, m.cost_grid.n_times(), m.cost_grid.n_nodes());
    return {std::move(flow), value};
}

BestResponseOutcome renewable_best_response(const ModelInstance& m,
                                            const std::vector<double>& rewards) {
    LPProblem lp = build_stopping_lp(rewards, m.ren_econ.rho, m.factor_transition, m.eta0,
                                     m.factor_grid.n_t);
    auto [flow, value] = solve_best_response(lp, m.factor_grid.n_times(), m.factor_grid.n_nodes());
    return {std::move(flow), value};
}

struct IterationMonitors {
    BestResponseOutcome br_c;
    BestResponseOutcome br_r;
    double cur_c = 0.0;
    double cur_r = 0.0;
    ExploitabilityPair e;
};

IterationMonitors evaluate_responses(const ModelInstance& m, const MeasureFlow& omega,
                                     const MeasureFlow& eta, const PriceTrajectories& prices,
                                     int threads) {
    IterationMonitors out;
    const auto rewards_c =
        conventional_reward_matrix(prices, m.segments, m.cost_grid, m.conv_econ, m.market);
    const auto rewards_r =
        renewable_reward_matrix(prices, m.segments, m.factor_grid, m.ren_econ, m.market);
    if (threads >= 2) {
        auto fut = std::async(std::launch::async,
                              [&] { return renewable_best_response(m, rewards_r); });
        out.br_c = conventional_best_response(m, rewards_c);
        out.br_r = fut.get();
    } else {
        out.br_c = conventional_best_response(m, rewards_c);
        out.br_r = renewable_best_response(m, rewards_r);
    }
    out.cur_c = discounted_flow_value(omega, rewards_c, m.conv_econ.rho, m.cost_grid.dt());
    out.cur_r = discounted_flow_value(eta, rewards_r, m.ren_econ.rho, m.factor_grid.dt());

    // A best response can only undershoot the current value by solver error.
    const double slack_c = 1e-6 * (1.0 + std::abs(out.br_c.value));
    const double slack_r = 1e-6 * (1.0 + std::abs(out.br_r.value));
    const double raw_c = out.br_c.value - out.cur_c;
    const double raw_r = out.br_r.value - out.cur_r;
    if (raw_c < -slack_c || raw_r < -slack_r)
        throw NumericalError("exploitability: best response below current value beyond tolerance");
    out.e.e_c = std::max(0.0, raw_c);
    out.e.e_r = std::max(0.0, raw_r);
    return out;
}

void validate_iterate(const ModelInstance& m, const MeasureFlow& omega, const MeasureFlow& eta,
                      double tol, int& violations) {
    if (!check_feasible(omega, m.cost_transition, m.omega0, tol)) ++violations;
    if (!check_feasible(eta, m.factor_transition, m.eta0, tol)) ++violations;
}

}  // namespace

PriceTrajectories price_trajectories(const ModelInstance& model, const MeasureFlow& omega,
                                     const MeasureFlow& eta, int threads) {
    const int nt = model.cost_grid.n_times();
    if (omega.n_times != nt || eta.n_times != model.factor_grid.n_times()
        || omega.n_nodes != model.cost_grid.n_nodes()
        || eta.n_nodes != model.factor_grid.n_nodes())
        throw ValidationError("price_trajectories: flow shapes do not match the grids");
    PriceTrajectories prices(model.segments.size(), std::vector<double>(nt, 0.0));

    auto solve_one = [&](int s, int i) {
        const double renew =
            renewable_output(model.eta_bar.row(i), eta.row(i), model.factor_grid);
        const double residual = model.segments[s].demand_gw[i] - renew;
        prices[s][i] = clearing_price(omega.row(i), residual, model.cost_grid, model.market);
    };

    const int total = static_cast<int>(model.segments.size()) * nt;
    if (threads >= 2 && total >= 64) {
        const int workers = std::min<int>(threads, std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int k = w; k < total; k += workers) solve_one(k / nt, k % nt);
            });
        }
        for (auto& th : pool) th.join();
    } else {
        for (int k = 0; k < total; ++k) solve_one(k / nt, k % nt);
    }
    return prices;
}

ExploitabilityPair exploitability(const ModelInstance& model, const MeasureFlow& omega,
                                  const MeasureFlow& eta, const PriceTrajectories& prices,
                                  int threads) {
    return evaluate_responses(model, omega, eta, prices, threads).e;
}

EquilibriumResult fictitious_play(const ModelInstance& model, const FPConfig& cfg) {
    if (cfg.max_iters < 1)
        throw ValidationError("fictitious_play: need at least one iteration");

    EquilibriumResult res;
    res.eta_bar = model.eta_bar;

    // Machine-precision feasible for any operator; the centered scheme's
    // equality evolution is not once drift dominates diffusion on coarse
    // cells. The seed only shapes iteration-1 prices: step 1/i overwrites
    // it entirely at i = 1, so every averaged iterate mixes best responses.
    MeasureFlow omega = cfg.seed_omega
        ? *cfg.seed_omega
        : immediate_stop_flow(model.omega0, model.cost_grid.n_t);
    MeasureFlow eta = cfg.seed_eta
        ? *cfg.seed_eta
        : immediate_stop_flow(model.eta0, model.factor_grid.n_t);
    if (!check_feasible(omega, model.cost_transition, model.omega0, 1e-7))
        throw ValidationError("fictitious_play: conventional seed flow is infeasible");
    if (!check_feasible(eta, model.factor_transition, model.eta0, 1e-7))
        throw ValidationError("fictitious_play: renewable seed flow is infeasible");

    bool reached_target = false;
    ExploitabilityPair last{};
    for (int it = 1; it <= cfg.max_iters; ++it) {
        const PriceTrajectories prices = price_trajectories(model, omega, eta, cfg.threads);
        IterationMonitors mon = evaluate_responses(model, omega, eta, prices, cfg.threads);
        res.history.push_back(mon.e);
        res.iterations = it;
        last = mon.e;
        if (mon.e.e_c <= cfg.exploitability_target && mon.e.e_r <= cfg.exploitability_target) {
            reached_target = true;
            break;
        }
        const double w = 1.0 / it;  // damping schedule; it = 1 adopts the response outright
        omega.mix_in(mon.br_c.flow, w);
        eta.mix_in(mon.br_r.flow, w);
        if (cfg.validate_iterates)
            validate_iterate(model, omega, eta, cfg.validate_tol, res.feasibility_violations);
    }

    res.prices = price_trajectories(model, omega, eta, cfg.threads);
    if (reached_target) {
        res.termination_reason = "exploitability_target";
        res.final_exploitability = last;
    } else {
        res.termination_reason = "max_iters";
        res.final_exploitability =
            evaluate_responses(model, omega, eta, res.prices, cfg.threads).e;
    }

    const int nt = model.cost_grid.n_times();
    res.conventional_capacity_gw.resize(nt);
    res.renewable_entered_gw.resize(nt);
    for (int i = 0; i < nt; ++i) {
        res.conventional_capacity_gw[i] = omega.row_total(i);
        res.renewable_entered_gw[i] = model.eta_bar.row_total(i) - eta.row_total(i);
    }
    res.omega = std::move(omega);
    res.eta = std::move(eta);
    return res;
}

double exploitability_per_mw_hour(double e_gbp, double capacity_gw, double horizon_years) {
    const double mw = capacity_gw * 1000.0;
    const double hours = horizon_years * 8760.0;
    if (mw <= 0.0 || hours <= 0.0) return 0.0;
    return e_gbp / (mw * hours);
}

}  // namespace emfg
