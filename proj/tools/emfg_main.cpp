// Command-line front end: calibrate, run, compare, oracle-check.
// Exit codes: 0 success, 2 input error, 3 solver or numerical failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emfg/best_response.hpp"
#include "emfg/errors.hpp"
#include "emfg/grids.hpp"
#include "emfg/lp.hpp"
#include "emfg/market.hpp"
#include "emfg/mfg.hpp"
#include "emfg/payoffs.hpp"
#include "emfg/processes.hpp"
#include "emfg/scenario.hpp"

namespace fs = std::filesystem;
using namespace emfg;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// ---------------------------------------------------------------- calibrate

// Flat key = value file: k_per_year, cost_mean_gbp_mwh, cost_std_gbp_mwh,
// k_bar_per_year, factor_mean, factor_std. Every key optional; # comments.
std::map<std::string, double> read_moments_file(const std::string& path) {
    static const std::vector<std::string> known = {
        "k_per_year", "cost_mean_gbp_mwh", "cost_std_gbp_mwh",
        "k_bar_per_year", "factor_mean", "factor_std"};
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open moments file: " + path);
    std::map<std::string, double> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        const std::string where = path + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw ParseError(where + ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ParseError(where + ": unknown key '" + key + "'");
        if (out.count(key)) throw ParseError(where + ": duplicate key '" + key + "'");
        char* end = nullptr;
        double v = std::strtod(value.c_str(), &end);
        if (end != value.c_str() + value.size() || !std::isfinite(v))
            throw ParseError(where + ": cannot parse '" + value + "' as a number");
        out[key] = v;
    }
    return out;
}

struct CalibrateArgs {
    std::string moments_file;
    std::string out_file;
    double k = 0.5;
    double k_bar = 0.5;
    std::optional<double> cost_mean, cost_std, factor_mean, factor_std;
};

int cmd_calibrate(const CalibrateArgs& a) {
    double k = a.k;
    double k_bar = a.k_bar;
    std::optional<double> cm = a.cost_mean, cs = a.cost_std;
    std::optional<double> fm = a.factor_mean, fst = a.factor_std;
    if (!a.moments_file.empty()) {
        auto m = read_moments_file(a.moments_file);
        if (m.count("k_per_year")) k = m["k_per_year"];
        if (m.count("k_bar_per_year")) k_bar = m["k_bar_per_year"];
        if (m.count("cost_mean_gbp_mwh")) cm = m["cost_mean_gbp_mwh"];
        if (m.count("cost_std_gbp_mwh")) cs = m["cost_std_gbp_mwh"];
        if (m.count("factor_mean")) fm = m["factor_mean"];
        if (m.count("factor_std")) fst = m["factor_std"];
    }
    const bool have_cost = cm.has_value() || cs.has_value();
    const bool have_factor = fm.has_value() || fst.has_value();
    if (!have_cost && !have_factor)
        throw ValidationError("no moments given: pass --moments or inline moment flags");
    if (have_cost && (!cm || !cs))
        throw ValidationError("cost moments need both a mean and a std");
    if (have_factor && (!fm || !fst))
        throw ValidationError("capacity factor moments need both a mean and a std");

    std::ofstream out;
    if (!a.out_file.empty()) {
        out.open(a.out_file);
        if (!out) throw IngestionError("cannot write " + a.out_file);
    }

    if (have_cost) {
        CIRParams p = calibrate_cir({*cm, *cs}, k);
        std::cout << "cost process: k = " << fmt(p.k) << ", theta = " << fmt(p.theta)
                  << ", delta = " << fmt(p.delta) << "\n";
        std::cout << "  stays positive (2 k theta >= delta^2): "
                  << (feller_condition_holds(p) ? "yes" : "no") << "\n";
        if (p.delta > 0.0) {
            StationaryMoments q = cir_stationary_moments(p);
            std::cout << "  stationary round-trip: mean = " << fmt(q.mean) << " (residual "
                      << fmt(q.mean - *cm) << "), std = " << fmt(q.std_dev) << " (residual "
                      << fmt(q.std_dev - *cs) << ")\n";
        } else {
            std::cout << "  degenerate: zero volatility, stationary law is a point mass at "
                      << fmt(p.theta) << "\n";
        }
        if (out) {
            out << "cost_k = " << fmt(p.k) << "\ncost_theta = " << fmt(p.theta)
                << "\ncost_delta = " << fmt(p.delta) << "\n";
        }
    }
    if (have_factor) {
        JacobiParams p = calibrate_jacobi({*fm, *fst}, k_bar);
        std::cout << "capacity factor process: k_bar = " << fmt(p.k_bar) << ", theta_bar = "
                  << fmt(p.theta_bar) << ", delta_bar = " << fmt(p.delta_bar) << "\n";
        if (p.delta_bar > 0.0) {
            StationaryMoments q = jacobi_stationary_moments(p);
            std::cout << "  stationary round-trip: mean = " << fmt(q.mean) << " (residual "
                      << fmt(q.mean - *fm) << "), std = " << fmt(q.std_dev) << " (residual "
                      << fmt(q.std_dev - *fst) << ")\n";
        } else {
            std::cout << "  degenerate: zero volatility, stationary law is a point mass at "
                      << fmt(p.theta_bar) << "\n";
        }
        if (out) {
            out << "factor_k = " << fmt(p.k_bar) << "\nfactor_theta = " << fmt(p.theta_bar)
                << "\nfactor_delta = " << fmt(p.delta_bar) << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------- run

struct RunArgs {
    std::string scenario;
    std::string out_dir;
    int iters = -1;
    double target = -1.0;
    int threads = 2;
    std::string seed_flows;
    bool validate = false;
};

std::string default_out_dir(const std::string& scenario_path) {
    const char* root = std::getenv("EMFG_OUT_ROOT");
    fs::path base = root && *root ? fs::path(root) : fs::path("runs");
    return (base / fs::path(scenario_path).stem()).string();
}

void write_failure_manifest(const std::string& out_dir, const std::string& scenario_path,
                            const std::string& message) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream out(fs::path(out_dir) / "manifest.txt");
    out << "scenario_path = " << scenario_path << "\n";
    out << "scenario_name = " << fs::path(scenario_path).stem().string() << "\n";
    out << "status = solver_failure\n";
    out << "error = " << message << "\n";
}

int cmd_run(const RunArgs& a) {
    const std::string out_dir = a.out_dir.empty() ? default_out_dir(a.scenario) : a.out_dir;
    ScenarioConfig cfg = load_scenario(a.scenario);
    if (a.iters > 0) cfg.max_iters = a.iters;
    if (a.target >= 0.0) cfg.exploitability_target_gbp = a.target;

    AssembledModel assembled = assemble_model(cfg);
    for (const std::string& w : assembled.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "scenario " << fs::path(a.scenario).stem().string() << ": cost grid "
              << assembled.model.cost_grid.n_nodes() << " nodes, factor grid "
              << assembled.model.factor_grid.n_nodes() << " nodes, " << cfg.n_t
              << " time steps, up to " << cfg.max_iters << " iterations\n";

    FPConfig fp;
    fp.max_iters = cfg.max_iters;
    fp.exploitability_target = cfg.exploitability_target_gbp;
    fp.threads = a.threads;
    fp.validate_iterates = a.validate;
    if (!a.seed_flows.empty()) {
        fp.seed_omega = read_measure_flow_csv((fs::path(a.seed_flows) / "omega.csv").string());
        fp.seed_eta = read_measure_flow_csv((fs::path(a.seed_flows) / "eta.csv").string());
    }

    const auto t0 = std::chrono::steady_clock::now();
    EquilibriumResult result;
    try {
        result = fictitious_play(assembled.model, fp);
    } catch (const SolverFailure& e) {
        write_failure_manifest(out_dir, a.scenario, e.what());
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "partial manifest written to " << out_dir << "\n";
        return kExitSolver;
    } catch (const NumericalError& e) {
        write_failure_manifest(out_dir, a.scenario, e.what());
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "partial manifest written to " << out_dir << "\n";
        return kExitSolver;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string manifest = write_results(result, cfg, assembled, out_dir, a.scenario, wall);
    const ExploitabilityPair& fin = result.final_exploitability;
    std::cout << "iterations: " << result.iterations << " (" << result.termination_reason << ")\n";
    std::cout << "final exploitability: conventional " << fmt(fin.e_c) << " GBP ("
              << fmt(exploitability_per_mw_hour(fin.e_c, cfg.market.conventional_capacity_gw,
                                                cfg.horizon_years))
              << " GBP/MW/h), renewable " << fmt(fin.e_r) << " GBP ("
              << fmt(exploitability_per_mw_hour(fin.e_r, cfg.market.renewable_potential_gw,
                                                cfg.horizon_years))
              << " GBP/MW/h)\n";
    std::cout << "wall time: " << fmt(wall) << " s\n";
    std::cout << "results: " << manifest << "\n";
    return 0;
}

// ------------------------------------------------------------------ compare

struct RunBundle {
    std::string name;
    std::map<std::string, std::vector<double>> prices;
    CapacitySeries capacities;
};

int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& out_path) {
    if (run_dirs.size() < 2) throw ValidationError("compare needs at least two run directories");
    std::vector<RunBundle> runs;
    for (const std::string& dir : run_dirs) {
        RunBundle b;
        b.name = fs::path(dir).filename().string();
        if (b.name.empty()) b.name = fs::path(dir).parent_path().filename().string();
        for (const auto& prev : runs)
            if (prev.name == b.name) b.name += "_" + std::to_string(runs.size());
        b.prices = read_prices_csv((fs::path(dir) / "prices.csv").string());
        b.capacities = read_capacities_csv((fs::path(dir) / "capacities.csv").string());
        runs.push_back(std::move(b));
    }
    const RunBundle& base = runs.front();
    const size_t n_times = base.capacities.conventional_gw.size();
    for (const RunBundle& b : runs) {
        if (b.capacities.conventional_gw.size() != n_times)
            throw ValidationError("run '" + b.name + "' has " +
                                  std::to_string(b.capacities.conventional_gw.size()) +
                                  " time steps, expected " + std::to_string(n_times));
        if (b.prices.size() != base.prices.size())
            throw ValidationError("run '" + b.name + "' has a different segment set");
        for (const auto& [label, series] : base.prices) {
            auto it = b.prices.find(label);
            if (it == b.prices.end())
                throw ValidationError("run '" + b.name + "' is missing segment '" + label + "'");
            if (it->second.size() != n_times)
                throw ValidationError("run '" + b.name + "' segment '" + label +
                                      "' has a different length");
        }
    }

    std::ofstream out(out_path);
    if (!out) throw IngestionError("cannot write " + out_path);
    auto fmt17 = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "quantity,label,time_index";
    for (const RunBundle& b : runs) out << "," << b.name;
    for (size_t r = 1; r < runs.size(); ++r) out << ",delta_" << runs[r].name;
    out << "\n";
    auto emit = [&](const std::string& quantity, const std::string& label,
                    auto getter) {
        for (size_t i = 0; i < n_times; ++i) {
            out << quantity << "," << label << "," << i;
            double b0 = getter(runs[0], i);
            for (const RunBundle& b : runs) out << "," << fmt17(getter(b, i));
            for (size_t r = 1; r < runs.size(); ++r)
                out << "," << fmt17(getter(runs[r], i) - b0);
            out << "\n";
        }
    };
    for (const auto& [label, series] : base.prices) {
        emit("price_gbp_mwh", label,
             [&label](const RunBundle& b, size_t i) { return b.prices.at(label)[i]; });
    }
    emit("capacity_gw", "conventional",
         [](const RunBundle& b, size_t i) { return b.capacities.conventional_gw[i]; });
    emit("capacity_gw", "renewable_entered",
         [](const RunBundle& b, size_t i) { return b.capacities.renewable_entered_gw[i]; });
    out.close();

    for (const RunBundle& b : runs) {
        std::cout << b.name << ": final conventional " << fmt(b.capacities.conventional_gw.back())
                  << " GW, final renewable entered "
                  << fmt(b.capacities.renewable_entered_gw.back()) << " GW";
        for (const auto& [label, series] : b.prices) {
            double mean = 0.0;
            for (double p : series) mean += p;
            mean /= static_cast<double>(series.size());
            std::cout << ", mean " << label << " price " << fmt(mean) << " GBP/MWh";
        }
        std::cout << "\n";
    }
    auto argmax = [&](auto metric) {
        size_t best = 0;
        for (size_t r = 1; r < runs.size(); ++r)
            if (metric(runs[r]) > metric(runs[best])) best = r;
        return runs[best].name;
    };
    std::cout << "highest final renewable entry: "
              << argmax([](const RunBundle& b) { return b.capacities.renewable_entered_gw.back(); })
              << "\n";
    std::cout << "highest final conventional capacity: "
              << argmax([](const RunBundle& b) { return b.capacities.conventional_gw.back(); })
              << "\n";
    for (const auto& [label, series] : base.prices) {
        std::cout << "highest final " << label << " price: "
                  << argmax([&label](const RunBundle& b) { return b.prices.at(label).back(); })
                  << "\n";
    }
    std::cout << "report: " << out_path << "\n";
    return 0;
}

// --------------------------------------------------------------- oracle-check

struct OracleArgs {
    std::string scenario;
    int max_size = 8;
    int trials = 5;
    unsigned long seed = 12345;
    bool corrupt_transition = false;
};

struct OracleReport {
    int failures = 0;
    void check(bool ok, const std::string& name, const std::string& detail) {
        if (ok) {
            std::cout << "[ok]   " << name << ": " << detail << "\n";
        } else {
            std::cout << "[FAIL] " << name << ": " << detail << "\n";
            ++failures;
        }
    }
};

// Random chain whose implicit-step matrix is column-diagonally dominant with
// nonnegative inverse, so the LP and the dynamic program must agree exactly.
TransitionOperator random_m_matrix_operator(std::mt19937_64& rng, const GridSpec& g) {
    std::uniform_real_distribution<double> w(0.05, 1.0);
    std::uniform_real_distribution<double> v(-0.5, 0.5);
    const int n = g.n_nodes();
    const double dx = g.dx();
    const double dt = g.dt();
    std::vector<double> drift(n), half_diff(n);
    for (int j = 0; j < n; ++j) {
        half_diff[j] = w(rng) * dx * dx / dt;
        // |mu| dx / 2 < a keeps both off-diagonal signs nonpositive.
        drift[j] = v(rng) * 1.8 * half_diff[j] / dx;
    }
    return build_transition_from_coefficients(drift, half_diff, g);
}

double max_interior_colsum_deviation(const TransitionOperator& op) {
    double dev = 0.0;
    for (int j = 1; j + 1 < op.n_nodes(); ++j)
        dev = std::max(dev, std::abs(op.column_sum(j) - 1.0));
    return dev;
}

void lp_dp_check(OracleReport& rep, const std::string& tag, const std::vector<double>& rewards,
                 double rho, const TransitionOperator& op, const std::vector<double>& initial,
                 int n_t, bool also_simplex) {
    LPProblem lp = build_stopping_lp(rewards, rho, op, initial, n_t);
    LPSolution sol = solve_lp(lp);
    StoppingValue v = dp_stopping_value(rewards, rho, op, n_t);
    const double dp = stopping_value_inner(v, initial);
    const double tol = 1e-6 * (1.0 + std::abs(dp));
    rep.check(std::abs(sol.objective - dp) <= tol, tag + " LP value equals DP value",
              "|lp - dp| = " + fmt(std::abs(sol.objective - dp)) + " (tol " + fmt(tol) + ")");
    if (also_simplex && static_cast<long>(lp.n_rows) * lp.n_vars <= 20000) {
        LPSolution sx = solve_lp_simplex(lp);
        rep.check(std::abs(sol.objective - sx.objective) <= tol,
                  tag + " interior-point equals simplex",
                  "|ipm - simplex| = " + fmt(std::abs(sol.objective - sx.objective)));
    }
    // Averaging two feasible flows must stay inside the constraint set.
    MeasureFlow br = solution_to_flow(sol, n_t + 1, op.n_nodes());
    MeasureFlow eq = evolve_equality(initial, op, n_t);
    eq.mix_in(br, 0.37);
    rep.check(check_feasible(eq, op, initial, 1e-7), tag + " averaged flow stays feasible",
              "mix of equality evolution and best response");
}

// Calibrated operators can carry positive off-diagonals near the boundaries
// (drift dominates diffusion on coarse cells), so the obstacle recursion does
// not apply there. The LP is still cross-checked against itself: the reported
// optimum must equal the discounted value of the returned flow, and the flow
// must satisfy every transition constraint.
void lp_consistency_check(OracleReport& rep, const std::string& tag,
                          const std::vector<double>& rewards, double rho,
                          const TransitionOperator& op, const std::vector<double>& initial,
                          int n_t) {
    LPProblem lp = build_stopping_lp(rewards, rho, op, initial, n_t);
    LPSolution sol = solve_lp(lp);
    MeasureFlow br = solution_to_flow(sol, n_t + 1, op.n_nodes());
    rep.check(check_feasible(br, op, initial, 1e-7), tag + " best response feasible",
              "LP flow satisfies the transition constraints");
    const double value = discounted_flow_value(br, rewards, rho, op.dt);
    const double tol = 1e-6 * (1.0 + std::abs(sol.objective));
    rep.check(std::abs(sol.objective - value) <= tol, tag + " LP objective matches its flow",
              "|objective - recomputed| = " + fmt(std::abs(sol.objective - value)) + " (tol " +
                  fmt(tol) + ")");
    // The equality evolution is not feasible for non-monotone operators, so
    // the mixing partner here is the universally feasible immediate stop.
    MeasureFlow stop = immediate_stop_flow(initial, n_t);
    stop.mix_in(br, 0.37);
    rep.check(check_feasible(stop, op, initial, 1e-7), tag + " averaged flow stays feasible",
              "mix of immediate stop and best response");
}

int cmd_oracle_check(const OracleArgs& a) {
    if (a.max_size < 1 || a.max_size > 12)
        throw ValidationError("--max-size must lie in [1, 12] (exhaustive checks only)");
    std::mt19937_64 rng(a.seed);
    OracleReport rep;

    // Random M-matrix chains, including the n_x = 1 degenerate grid.
    for (int trial = 0; trial < a.trials; ++trial) {
        std::uniform_int_distribution<int> nx_d(1, a.max_size);
        std::uniform_int_distribution<int> nt_d(1, 8);
        std::uniform_real_distribution<double> r_d(-2.0, 2.0);
        std::uniform_real_distribution<double> m_d(0.0, 1.0);
        // Trial 0 pins the degenerate grid; the corruption hook needs an
        // interior column to break, so it bumps trial 0 to three nodes.
        const int n_x = trial == 0 ? (a.corrupt_transition ? 2 : 1) : nx_d(rng);
        const int n_t = nt_d(rng);
        GridSpec g(0.0, 1.0, n_x, 0.25 * (n_t + 1), n_t);
        TransitionOperator op = random_m_matrix_operator(rng, g);
        if (a.corrupt_transition && trial == 0) {
            // Test hook: break one interior mass budget. Pushing the
            // off-diagonal further negative keeps the operator monotone, so
            // the failure lands on the named column-sum check.
            const int mid = op.n_nodes() / 2;
            op.sub[mid + 1] -= 0.05;
        }
        const double dev = max_interior_colsum_deviation(op);
        rep.check(dev <= 1e-12,
                  "trial " + std::to_string(trial) + " transition mass budget",
                  "interior column sums must equal 1, max |sum - 1| = " + fmt(dev));
        std::vector<double> rewards(static_cast<size_t>(n_t + 1) * g.n_nodes());
        for (double& r : rewards) r = r_d(rng);
        std::vector<double> initial(static_cast<size_t>(g.n_nodes()));
        for (double& m : initial) m = m_d(rng);
        lp_dp_check(rep, "trial " + std::to_string(trial), rewards, 0.086, op, initial, n_t,
                    true);
    }

    // Discretized-price bound on a calibrated cost grid.
    {
        CIRParams cir = calibrate_cir({33.4, 11.0}, 0.5);
        MarketParams mp;
        const int n_x = std::max(a.max_size, 4);
        GridSpec g(0.0, cir.theta + 10.0 * 11.0, n_x, 1.0, 1);
        std::vector<double> omega = discretize_density(
            [cir](double x) { return cir_stationary_density(cir, x); }, g,
            mp.conventional_capacity_gw);
        double worst = 0.0;
        bool ok = true;
        for (double residual : {-5.0, 0.0, 3.0, 17.0, 30.0, 60.0}) {
            const double p = clearing_price(omega, residual, g, mp);
            for (int n : {7, 50, 400}) {
                const double theta_n = discretized_price(omega, residual, g, mp, n);
                const double gap = std::abs(theta_n - p);
                const double bound = mp.price_cap / n + 2.0 * mp.price_tol_rel * mp.price_cap;
                worst = std::max(worst, gap - mp.price_cap / n);
                if (gap > bound) ok = false;
            }
        }
        rep.check(ok, "discretized price bound",
                  "|theta_n - p| <= cap/n for n in {7,50,400}, worst slack " + fmt(worst));
    }

    // Scenario-derived instance at reduced size: real rewards, real prices.
    if (!a.scenario.empty()) {
        ScenarioConfig cfg = load_scenario(a.scenario);
        cfg.cost_n_x = std::min(cfg.cost_n_x, a.max_size);
        cfg.factor_n_x = std::min(cfg.factor_n_x, a.max_size);
        cfg.n_t = std::min(cfg.n_t, 6);
        cfg.max_iters = 1;
        AssembledModel am = assemble_model(cfg);
        const ModelInstance& m = am.model;
        MeasureFlow omega = evolve_equality(m.omega0, m.cost_transition, cfg.n_t);
        MeasureFlow eta = evolve_equality(m.eta0, m.factor_transition, cfg.n_t);
        PriceTrajectories prices = price_trajectories(m, omega, eta, 1);
        std::vector<double> rc =
            conventional_reward_matrix(prices, m.segments, m.cost_grid, m.conv_econ, m.market);
        std::vector<double> rr =
            renewable_reward_matrix(prices, m.segments, m.factor_grid, m.ren_econ, m.market);
        lp_consistency_check(rep, "scenario conventional", rc, m.conv_econ.rho,
                             m.cost_transition, m.omega0, cfg.n_t);
        lp_consistency_check(rep, "scenario renewable", rr, m.ren_econ.rho, m.factor_transition,
                             m.eta0, cfg.n_t);
    }

    if (rep.failures > 0) {
        std::cout << rep.failures << " check(s) failed\n";
        return kExitSolver;
    }
    std::cout << "all checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium solver for conventional exit and renewable entry in a "
                 "merit-order electricity market"};
    app.require_subcommand(1);

    CalibrateArgs cal;
    CLI::App* c_cal = app.add_subcommand(
        "calibrate", "Fit process parameters to stationary moments and report round-trip error");
    c_cal->add_option("--moments", cal.moments_file, "Moments file (key = value lines)");
    c_cal->add_option("--out", cal.out_file, "Write calibrated parameters to this file");
    c_cal->add_option("--k", cal.k, "Cost mean-reversion rate (1/year)");
    c_cal->add_option("--k-bar", cal.k_bar, "Capacity factor mean-reversion rate (1/year)");
    c_cal->add_option("--cost-mean", cal.cost_mean, "Stationary cost mean (GBP/MWh)");
    c_cal->add_option("--cost-std", cal.cost_std, "Stationary cost std (GBP/MWh)");
    c_cal->add_option("--factor-mean", cal.factor_mean, "Stationary capacity factor mean");
    c_cal->add_option("--factor-std", cal.factor_std, "Stationary capacity factor std");

    RunArgs run;
    CLI::App* c_run =
        app.add_subcommand("run", "Solve a scenario to equilibrium and write the result bundle");
    c_run->add_option("--scenario", run.scenario, "Scenario file")->required();
    c_run->add_option("--out", run.out_dir,
                      "Output directory (default: $EMFG_OUT_ROOT/<scenario name> or "
                      "runs/<scenario name>)");
    c_run->add_option("--iters", run.iters, "Override the scenario iteration budget");
    c_run->add_option("--target", run.target, "Override the exploitability stopping target (GBP)");
    c_run->add_option("--threads", run.threads, "Worker thread cap")->check(CLI::Range(1, 64));
    c_run->add_option("--seed-flows", run.seed_flows,
                      "Directory of a previous run; its omega.csv/eta.csv seed the iteration");
    c_run->add_flag("--validate", run.validate, "Feasibility-check every averaged iterate");

    std::vector<std::string> cmp_runs;
    std::string cmp_out = "report.csv";
    CLI::App* c_cmp =
        app.add_subcommand("compare", "Align two or more result bundles and report deltas");
    c_cmp->add_option("--runs", cmp_runs, "Run directories (first is the reference)")
        ->required()
        ->expected(2, -1);
    c_cmp->add_option("--out", cmp_out, "Report CSV path");

    OracleArgs ora;
    CLI::App* c_ora = app.add_subcommand(
        "oracle-check", "Cross-check the LP solver, the dynamic program and the price formulas");
    c_ora->add_option("--scenario", ora.scenario, "Scenario to derive a reduced instance from");
    c_ora->add_option("--max-size", ora.max_size, "Largest grid interior size (<= 12)");
    c_ora->add_option("--trials", ora.trials, "Random chain trials")->check(CLI::Range(1, 100));
    c_ora->add_option("--seed", ora.seed, "Random seed");
    c_ora->add_flag("--corrupt-transition", ora.corrupt_transition,
                    "Test hook: corrupt one transition column and expect a named failure")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (c_cal->parsed()) return cmd_calibrate(cal);
        if (c_run->parsed()) return cmd_run(run);
        if (c_cmp->parsed()) return cmd_compare(cmp_runs, cmp_out);
        if (c_ora->parsed()) return cmd_oracle_check(ora);
    } catch (const SolverFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
