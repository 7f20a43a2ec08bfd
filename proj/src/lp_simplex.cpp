#include "emfg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

// Dense tableau simplex for  max c'x : Ax <= b, x >= 0  with b >= 0, so the
// all-slack basis starts feasible and no phase one is needed. Bland's rule on
// both the entering and leaving choice guarantees termination despite the
// heavy degeneracy of the zero-rhs constraint rows.

namespace emfg {

LPSolution solve_lp_simplex(const LPProblem& lp, long max_pivots) {
    lp.validate();
    const int m = lp.n_rows;
    const int n = lp.n_vars;
    for (double b : lp.rhs)
        if (b < 0.0)
            throw ValidationError("solve_lp_simplex: negative rhs, slack basis infeasible");

    const int cols = n + m + 1;  // structural, slack, rhs
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
    for (int c = 0; c < n; ++c)
        for (int k = lp.col_ptr[c]; k < lp.col_ptr[c + 1]; ++k)
            t[lp.row_idx[k]][c] = lp.value[k];
    for (int r = 0; r < m; ++r) {
        t[r][n + r] = 1.0;
        t[r][cols - 1] = lp.rhs[r];
    }
    for (int c = 0; c < n; ++c) t[m][c] = lp.objective[c];

    double cnorm = 0.0;
    for (double c : lp.objective) cnorm = std::max(cnorm, std::abs(c));
    const double rc_tol = 1e-9 * (1.0 + cnorm);

    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) basis[r] = n + r;

    for (long pivots = 0; pivots < max_pivots; ++pivots) {
        int enter = -1;
        for (int c = 0; c < n + m; ++c) {
            if (t[m][c] > rc_tol) { enter = c; break; }
        }
        if (enter < 0) {
            LPSolution sol;
            sol.x.assign(n, 0.0);
            for (int r = 0; r < m; ++r)
                if (basis[r] < n) sol.x[basis[r]] = std::max(0.0, t[r][cols - 1]);
            sol.objective = -t[m][cols - 1];
            sol.iterations = static_cast<int>(std::min<long>(pivots, 1 << 30));
            return sol;
        }
        int leave = -1;
        double best_ratio = 0.0;
        for (int r = 0; r < m; ++r) {
            if (t[r][enter] > 1e-11) {
                const double ratio = t[r][cols - 1] / t[r][enter];
                if (leave < 0 || ratio < best_ratio - 1e-15
                    || (std::abs(ratio - best_ratio) <= 1e-15 && basis[r] < basis[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
        }
        if (leave < 0)
            throw NumericalError("solve_lp_simplex: unbounded column, feasible set not compact");

        const double piv = t[leave][enter];
        for (int c = 0; c < cols; ++c) t[leave][c] /= piv;
        for (int r = 0; r <= m; ++r) {
            if (r == leave) continue;
            const double f = t[r][enter];
            if (f == 0.0) continue;
            for (int c = 0; c < cols; ++c) t[r][c] -= f * t[leave][c];
        }
        basis[leave] = enter;
    }
    throw SolverFailure("solve_lp_simplex: pivot limit reached", 0.0, 0.0, 0.0);
}

}  // namespace emfg
