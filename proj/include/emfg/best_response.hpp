// Best responses to a fixed price environment: the constraint-set LP over
// measure flows, and an independent dynamic-programming oracle on the chain
// induced by the inverse implicit-scheme step.
#pragma once

#include <utility>
#include <vector>

#include "emfg/grids.hpp"
#include "emfg/lp.hpp"
#include "emfg/payoffs.hpp"

namespace emfg {

// LP over variables omega(i, j), i = 0..n_t, j = 0..n_x:
//   maximize sum_ij e^{-rho t_i} dt r(i, j) omega(i, j)
//   s.t. omega(0, .) <= initial          (initial rows, listed first)
//        T omega(i+1, .) <= omega(i, .)  (one block per time step)
//        omega >= 0
// Row ordering keeps the normal-equation bandwidth at n_nodes + 2.
LPProblem build_stopping_lp(const std::vector<double>& rewards, double rho,
                            const TransitionOperator& op, const std::vector<double>& initial,
                            int n_t);

LPProblem build_conventional_lp(const PriceTrajectories& prices,
                                const std::vector<DemandSegment>& segments,
                                const GridSpec& cost_grid, const ConventionalEconomics& e,
                                const MarketParams& mp, const TransitionOperator& op,
                                const std::vector<double>& initial);

LPProblem build_renewable_lp(const PriceTrajectories& prices,
                             const std::vector<DemandSegment>& segments,
                             const GridSpec& factor_grid, const RenewableEconomics& e,
                             const MarketParams& mp, const TransitionOperator& op,
                             const std::vector<double>& initial);

// Reshape an LP solution vector into a flow.
MeasureFlow solution_to_flow(const LPSolution& sol, int n_times, int n_nodes);

std::pair<MeasureFlow, double> solve_best_response(const LPProblem& lp, int n_times, int n_nodes,
                                                   const IPMOptions& opt = {});

// Backward induction values v(i, j) and the stop region (ties stop).
struct StoppingValue {
    int n_times = 0;
    int n_nodes = 0;
    std::vector<double> values;
    std::vector<unsigned char> stop;

    double value(int i, int j) const { return values[static_cast<size_t>(i) * n_nodes + j]; }
    bool stops(int i, int j) const { return stop[static_cast<size_t>(i) * n_nodes + j] != 0; }
};

// Exact dual of the stopping LP, computed backward in time. With discounted
// step rewards c_i = e^{-rho t_i} dt r(i, .), row i >= 1 holds the
// componentwise-minimal mu_i with
//   mu_i >= 0,  T' mu_i >= c_i + mu_{i+1},  mu_{n_t+1} = 0,
// (a tridiagonal obstacle problem, solved by an active-set iteration) and row
// 0 holds max(0, c_0 + mu_1). Stopping mass at one node tightens the flow
// constraints of its neighbours, so the value is an implicit solve per step,
// not a kernel average. Minimality needs the off-diagonals of T to be <= 0;
// the solve verifies complementarity and throws NumericalError otherwise.
StoppingValue dp_stopping_value(const std::vector<double>& rewards, double rho,
                                const TransitionOperator& op, int n_t);

// <v(0, .), initial>: the DP estimate of the LP optimum.
double stopping_value_inner(const StoppingValue& v, const std::vector<double>& initial);

}  // namespace emfg
