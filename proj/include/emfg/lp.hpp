// Linear programs of the form  max c'x  s.t.  A x <= b, x >= 0  with A sparse
// and banded row coupling (the Fokker-Planck constraint structure). Solved by
// a Mehrotra predictor-corrector interior-point method whose normal equations
// are factorized as a banded Cholesky; a dense Bland-rule simplex covers tiny
// instances and serves as an independent cross-check.
#pragma once

#include <string>
#include <vector>

#include "emfg/errors.hpp"

namespace emfg {

// Column-compressed sparse A plus rhs/objective. Row indices inside each
// column must be strictly increasing.
struct LPProblem {
    int n_rows = 0;
    int n_vars = 0;
    std::vector<int> col_ptr;   // size n_vars + 1
    std::vector<int> row_idx;   // size nnz
    std::vector<double> value;  // size nnz
    std::vector<double> rhs;        // size n_rows, all >= 0 for the flows we build
    std::vector<double> objective;  // size n_vars, maximized

    void validate() const;
    // Largest row-index spread inside any column; the normal matrix A D A' has
    // exactly this half-bandwidth.
    int coupling_bandwidth() const;
    // Free-form MPS dump for external cross-checks.
    void write_mps(const std::string& path, const std::string& name) const;
};

struct LPSolution {
    std::vector<double> x;
    double objective = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double complementarity_gap = 0.0;  // relative
};

struct IPMOptions {
    double tol_gap = 1e-8;   // relative complementarity gap
    double tol_feas = 1e-8;  // residual tolerance, relative to 1 + |input| scale
    int max_iters = 250;     // degenerate faces shorten steps; iterations are cheap
    bool trace = false;      // per-iteration diagnostics on stderr
};

LPSolution solve_lp_interior_point(const LPProblem& lp, const IPMOptions& opt = {});

// Dense tableau simplex with Bland's rule; intended for small cross-check
// instances (rhs must be nonnegative so the slack basis is feasible).
LPSolution solve_lp_simplex(const LPProblem& lp, long max_pivots = 2000000);

// Interior point with an automatic simplex fallback on tiny instances if the
// iteration limit is hit.
LPSolution solve_lp(const LPProblem& lp, const IPMOptions& opt = {});

}  // namespace emfg
