#include "emfg/best_response.hpp"

#include <cmath>

namespace emfg {

LPProblem build_stopping_lp(const std::vector<double>& rewards, double rho,
                            const TransitionOperator& op, const std::vector<double>& initial,
                            int n_t) {
    const int n = op.n_nodes();
    if (static_cast<int>(initial.size()) != n)
        throw ValidationError("build_stopping_lp: initial mass size mismatch");
    if (rewards.size() != static_cast<size_t>(n_t + 1) * n)
        throw ValidationError("build_stopping_lp: reward matrix size mismatch");
    for (double b : initial)
        if (b < 0.0) throw ValidationError("build_stopping_lp: negative initial mass");

    LPProblem lp;
    lp.n_vars = (n_t + 1) * n;
    lp.n_rows = n + n_t * n;  // initial rows, then one block per time step
    lp.rhs.assign(lp.n_rows, 0.0);
    for (int j = 0; j < n; ++j) lp.rhs[j] = initial[j];
    lp.objective.resize(lp.n_vars);
    const double dt = op.dt;
    for (int i = 0; i <= n_t; ++i) {
        const double disc = std::exp(-rho * dt * i) * dt;
        for (int j = 0; j < n; ++j)
            lp.objective[static_cast<size_t>(i) * n + j] =
                disc * rewards[static_cast<size_t>(i) * n + j];
    }

    // Variable (i, j) appears with -1 in its own constraint block i (if i < n_t)
    // and with the operator column j in block i-1 (if i > 0); variables at time
    // zero additionally face the initial-mass row j.
    const auto block_row = [n](int i, int j) { return n + i * n + j; };
    lp.col_ptr.assign(lp.n_vars + 1, 0);
    for (int i = 0; i <= n_t; ++i) {
        for (int j = 0; j < n; ++j) {
            int cnt = 0;
            if (i == 0) ++cnt;
            if (i > 0) {
                if (j > 0) ++cnt;
                ++cnt;
                if (j + 1 < n) ++cnt;
            }
            if (i < n_t) ++cnt;
            lp.col_ptr[static_cast<size_t>(i) * n + j + 1] = cnt;
        }
    }
    for (int v = 0; v < lp.n_vars; ++v) lp.col_ptr[v + 1] += lp.col_ptr[v];
    lp.row_idx.resize(lp.col_ptr.back());
    lp.value.resize(lp.col_ptr.back());
    for (int i = 0; i <= n_t; ++i) {
        for (int j = 0; j < n; ++j) {
            int k = lp.col_ptr[static_cast<size_t>(i) * n + j];
            if (i == 0) {
                lp.row_idx[k] = j;
                lp.value[k] = 1.0;
                ++k;
            }
            if (i > 0) {
                // T's column j: row j-1 sees sup[j-1], row j sees diag[j],
                // row j+1 sees sub[j+1].
                if (j > 0) {
                    lp.row_idx[k] = block_row(i - 1, j - 1);
                    lp.value[k] = op.sup[j - 1];
                    ++k;
                }
                lp.row_idx[k] = block_row(i - 1, j);
                lp.value[k] = op.diag[j];
                ++k;
                if (j + 1 < n) {
                    lp.row_idx[k] = block_row(i - 1, j + 1);
                    lp.value[k] = op.sub[j + 1];
                    ++k;
                }
            }
            if (i < n_t) {
                lp.row_idx[k] = block_row(i, j);
                lp.value[k] = -1.0;
                ++k;
            }
        }
    }
    lp.validate();
    return lp;
}

LPProblem build_conventional_lp(const PriceTrajectories& prices,
                                const std::vector<DemandSegment>& segments,
                                const GridSpec& cost_grid, const ConventionalEconomics& e,
                                const MarketParams& mp, const TransitionOperator& op,
                                const std::vector<double>& initial) {
    return build_stopping_lp(conventional_reward_matrix(prices, segments, cost_grid, e, mp),
                             e.rho, op, initial, cost_grid.n_t);
}

LPProblem build_renewable_lp(const PriceTrajectories& prices,
                             const std::vector<DemandSegment>& segments,
                             const GridSpec& factor_grid, const RenewableEconomics& e,
                             const MarketParams& mp, const TransitionOperator& op,
                             const std::vector<double>& initial) {
    return build_stopping_lp(renewable_reward_matrix(prices, segments, factor_grid, e, mp),
                             e.rho, op, initial, factor_grid.n_t);
}

MeasureFlow solution_to_flow(const LPSolution& sol, int n_times, int n_nodes) {
    if (sol.x.size() != static_cast<size_t>(n_times) * n_nodes)
        throw ValidationError("solution_to_flow: size mismatch");
    MeasureFlow flow(n_times, n_nodes);
    flow.values = sol.x;
    return flow;
}

std::pair<MeasureFlow, double> solve_best_response(const LPProblem& lp, int n_times, int n_nodes,
                                                   const IPMOptions& opt) {
    LPSolution sol = solve_lp(lp, opt);
    return {solution_to_flow(sol, n_times, n_nodes), sol.objective};
}

namespace {

// Tridiagonal solve with identity rows substituted where keep[j] is false
// (those unknowns are pinned to zero).
std::vector<double> solve_masked_tridiag(const std::vector<double>& sub,
                                         const std::vector<double>& diag,
                                         const std::vector<double>& sup,
                                         const std::vector<double>& rhs,
                                         const std::vector<char>& keep) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> b(n), d(n), c(n);
    for (int j = 0; j < n; ++j) {
        b[j] = keep[j] ? diag[j] : 1.0;
        c[j] = keep[j] ? sup[j] : 0.0;
        d[j] = keep[j] ? rhs[j] : 0.0;
    }
    for (int j = 1; j < n; ++j) {
        const double a = keep[j] ? sub[j] : 0.0;
        if (std::abs(b[j - 1]) < 1e-300)
            throw NumericalError("obstacle step: vanishing pivot in tridiagonal solve");
        const double f = a / b[j - 1];
        b[j] -= f * c[j - 1];
        d[j] -= f * d[j - 1];
    }
    std::vector<double> x(n);
    if (std::abs(b[n - 1]) < 1e-300)
        throw NumericalError("obstacle step: vanishing pivot in tridiagonal solve");
    x[n - 1] = d[n - 1] / b[n - 1];
    for (int j = n - 2; j >= 0; --j) x[j] = (d[j] - c[j] * x[j + 1]) / b[j];
    return x;
}

// Componentwise-minimal mu with mu >= 0 and B mu >= w, for tridiagonal B with
// nonpositive off-diagonals. Primal-dual active-set iteration: keep rows solve
// (B mu)_j = w_j, the rest pin mu_j = 0; a node leaves the keep set when its
// value turns negative and enters it when its constraint is violated.
std::vector<double> minimal_supersolution(const std::vector<double>& sub,
                                          const std::vector<double>& diag,
                                          const std::vector<double>& sup,
                                          const std::vector<double>& w) {
    const int n = static_cast<int>(diag.size());
    double scale = 1.0;
    for (double v : w) scale = std::max(scale, std::abs(v));
    const double tiny = 1e-13 * scale;

    std::vector<char> keep(n);
    for (int j = 0; j < n; ++j) keep[j] = w[j] > 0.0 ? 1 : 0;
    std::vector<double> mu, s(n);
    const int max_passes = 3 * n + 10;
    for (int pass = 0; pass < max_passes; ++pass) {
        mu = solve_masked_tridiag(sub, diag, sup, w, keep);
        for (int j = 0; j < n; ++j) {
            double t = diag[j] * mu[j] - w[j];
            if (j > 0) t += sub[j] * mu[j - 1];
            if (j + 1 < n) t += sup[j] * mu[j + 1];
            s[j] = t;
        }
        bool changed = false;
        for (int j = 0; j < n; ++j) {
            if (keep[j] && mu[j] < -tiny) {
                keep[j] = 0;
                changed = true;
            } else if (!keep[j] && s[j] < -tiny) {
                keep[j] = 1;
                changed = true;
            }
        }
        if (!changed) {
            const double tol = 1e-10 * scale;
            for (int j = 0; j < n; ++j) {
                if (mu[j] < -tol || s[j] < -tol || std::min(std::abs(mu[j]), std::abs(s[j])) > tol)
                    throw NumericalError(
                        "obstacle step: complementarity not reached (operator off-diagonals "
                        "must be nonpositive)");
                if (mu[j] < 0.0) mu[j] = 0.0;
            }
            return mu;
        }
    }
    throw NumericalError("obstacle step: active-set iteration did not settle");
}

}  // namespace

StoppingValue dp_stopping_value(const std::vector<double>& rewards, double rho,
                                const TransitionOperator& op, int n_t) {
    const int n = op.n_nodes();
    if (rewards.size() != static_cast<size_t>(n_t + 1) * n)
        throw ValidationError("dp_stopping_value: reward matrix size mismatch");

    // B = T': row j couples sup[j-1], diag[j], sub[j+1].
    std::vector<double> bsub(n, 0.0), bdiag(n), bsup(n, 0.0);
    for (int j = 0; j < n; ++j) {
        bdiag[j] = op.diag[j];
        if (j > 0) bsub[j] = op.sup[j - 1];
        if (j + 1 < n) bsup[j] = op.sub[j + 1];
    }

    StoppingValue sv;
    sv.n_times = n_t + 1;
    sv.n_nodes = n;
    sv.values.assign(static_cast<size_t>(n_t + 1) * n, 0.0);
    sv.stop.assign(static_cast<size_t>(n_t + 1) * n, 0);

    const double dt = op.dt;
    std::vector<double> mu(n, 0.0), w(n);
    for (int i = n_t; i >= 1; --i) {
        const double disc = std::exp(-rho * dt * i) * dt;
        for (int j = 0; j < n; ++j)
            w[j] = disc * rewards[static_cast<size_t>(i) * n + j] + mu[j];
        mu = minimal_supersolution(bsub, bdiag, bsup, w);
        for (int j = 0; j < n; ++j) {
            const size_t k = static_cast<size_t>(i) * n + j;
            sv.values[k] = mu[j];
            if (mu[j] == 0.0) sv.stop[k] = 1;
        }
    }
    for (int j = 0; j < n; ++j) {
        const double v0 = dt * rewards[j] + mu[j];
        if (v0 > 0.0) {
            sv.values[j] = v0;
        } else {
            sv.values[j] = 0.0;
            sv.stop[j] = 1;
        }
    }
    return sv;
}

double stopping_value_inner(const StoppingValue& v, const std::vector<double>& initial) {
    if (static_cast<int>(initial.size()) != v.n_nodes)
        throw ValidationError("stopping_value_inner: initial mass size mismatch");
    double s = 0.0;
    for (int j = 0; j < v.n_nodes; ++j) s += v.value(0, j) * initial[j];
    return s;
}

}  // namespace emfg
