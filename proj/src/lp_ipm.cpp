#include "emfg/lp.hpp"
#include <cstdio>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

// Primal-dual interior point for  max c'x : Ax <= b, x >= 0.
//
// With slacks w >= 0 and duals (y, z) >= 0 the KKT system is
//     A x + w = b,   A'y - z = c,   XZe = 0,   WYe = 0.
// Newton steps on the mu-perturbed system reduce, after eliminating
// dz = (rxz - Z dx)/X and dw = (rwy - W dy)/Y, to the normal equations
//     (A Dx A' + Dw) dy = A Dx (rd + rxz/x) + rwy/y - rp
// with Dx = diag(x/z), Dw = diag(w/y), rp = b - Ax - w, rd = c - A'y + z.
// The constraint rows couple only within a fixed band (time-adjacent
// Fokker-Planck blocks), so A Dx A' + Dw is banded and a banded Cholesky
// factorization solves each step in O(n_rows * bandwidth^2).
//
// Mehrotra predictor-corrector: an affine step (rxz = -XZe) picks the
// centering weight sigma = (mu_aff/mu)^3, the corrector re-solves with
// rxz = sigma mu e - XZe - dXaff dZaff e reusing the factorization.

namespace emfg {

namespace {

struct BandedMatrix {
    int n = 0;
    int kb = 0;                // half bandwidth
    std::vector<double> band;  // entry (i, j), i >= j, at band[(i-j)*n + j]

    void reset(int n_, int kb_) {
        n = n_;
        kb = kb_;
        band.assign(static_cast<size_t>(kb + 1) * n, 0.0);
    }
    double& at(int i, int j) { return band[static_cast<size_t>(i - j) * n + j]; }

    // In-place lower Cholesky; returns false on a non-positive pivot.
    bool factorize() {
        for (int j = 0; j < n; ++j) {
            double d = at(j, j);
            const int k0 = std::max(0, j - kb);
            for (int k = k0; k < j; ++k) {
                const double l = at(j, k);
                d -= l * l;
            }
            if (!(d > 0.0)) return false;
            const double ljj = std::sqrt(d);
            at(j, j) = ljj;
            const int imax = std::min(n - 1, j + kb);
            for (int i = j + 1; i <= imax; ++i) {
                double s = at(i, j);
                const int kk0 = std::max(0, i - kb);
                for (int k = std::max(kk0, k0); k < j; ++k) s -= at(i, k) * at(j, k);
                at(i, j) = s / ljj;
            }
        }
        return true;
    }

    void solve(std::vector<double>& x) const {
        for (int i = 0; i < n; ++i) {
            double s = x[i];
            const int k0 = std::max(0, i - kb);
            for (int k = k0; k < i; ++k)
                s -= band[static_cast<size_t>(i - k) * n + k] * x[k];
            x[i] = s / band[static_cast<size_t>(0) * n + i];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = x[i];
            const int kmax = std::min(n - 1, i + kb);
            for (int k = i + 1; k <= kmax; ++k)
                s -= band[static_cast<size_t>(k - i) * n + i] * x[k];
            x[i] = s / band[static_cast<size_t>(0) * n + i];
        }
    }
};

void mat_vec(const LPProblem& lp, const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (int c = 0; c < lp.n_vars; ++c) {
        const double xc = x[c];
        if (xc == 0.0) continue;
        for (int k = lp.col_ptr[c]; k < lp.col_ptr[c + 1]; ++k)
            y[lp.row_idx[k]] += lp.value[k] * xc;
    }
}

void mat_t_vec(const LPProblem& lp, const std::vector<double>& y, std::vector<double>& z) {
    for (int c = 0; c < lp.n_vars; ++c) {
        double s = 0.0;
        for (int k = lp.col_ptr[c]; k < lp.col_ptr[c + 1]; ++k)
            s += lp.value[k] * y[lp.row_idx[k]];
        z[c] = s;
    }
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Largest alpha in (0, 1] with v + alpha dv >= (1 - eta) fraction margin.
double max_step(const std::vector<double>& v, const std::vector<double>& dv) {
    double a = 1.0;
    for (size_t i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
}

}  // namespace

LPSolution solve_lp_interior_point(const LPProblem& lp, const IPMOptions& opt) {
    lp.validate();
    const int m = lp.n_rows;
    const int n = lp.n_vars;
    const int kb = lp.coupling_bandwidth();

    // Work on a unit-scaled objective; value is rescaled on exit.
    double cscale = 0.0;
    for (double c : lp.objective) cscale = std::max(cscale, std::abs(c));
    if (cscale == 0.0) cscale = 1.0;
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = lp.objective[i] / cscale;

    const double bnorm = inf_norm(lp.rhs);
    std::vector<double> x(n), w(m), y(m), z(n);

    std::vector<double> rp(m), rd(n), ax(m), aty(n);
    std::vector<double> dx_scale(n), rhs_y(m), tmp_n(n), tmp_m(m);
    std::vector<double> dx(n), dw(m), dy(m), dz(n);
    std::vector<double> dx_aff(n), dw_aff(m), dy_aff(m), dz_aff(n);
    std::vector<double> rxz(n), rwy(m);
    BandedMatrix nm;

    // Least-squares starting point: ridge solves against AA' + I give the
    // minimum-norm primal pair (x, w) ~ Ax + w = b and dual y ~ A'y = c,
    // then a positive shift centers the four blocks away from the boundary.
    {
        nm.reset(m, kb);
        for (int col = 0; col < n; ++col) {
            for (int k1 = lp.col_ptr[col]; k1 < lp.col_ptr[col + 1]; ++k1) {
                const double v1 = lp.value[k1];
                const int r1 = lp.row_idx[k1];
                for (int k2 = k1; k2 < lp.col_ptr[col + 1]; ++k2)
                    nm.at(lp.row_idx[k2], r1) += v1 * lp.value[k2];
            }
        }
        for (int r = 0; r < m; ++r) nm.at(r, r) += 1.0;
        if (!nm.factorize())
            throw SolverFailure("interior point: start system not positive definite", 0, 0, 0);
        std::vector<double> u(lp.rhs);
        nm.solve(u);
        mat_t_vec(lp, u, x);  // x = A'(AA'+I)^-1 b, w = the same solve's slack part
        w = u;
        mat_vec(lp, c, tmp_m);
        y = tmp_m;
        nm.solve(y);
        mat_t_vec(lp, y, z);
        for (int i = 0; i < n; ++i) z[i] -= c[i];  // reduced costs A'y - c

        double pmin = 0.0, dmin = 0.0;
        for (double v : x) pmin = std::min(pmin, v);
        for (double v : w) pmin = std::min(pmin, v);
        for (double v : z) dmin = std::min(dmin, v);
        for (double v : y) dmin = std::min(dmin, v);
        double dp = -1.5 * pmin, dd = -1.5 * dmin;
        double cross = 0.0, psum = 0.0, dsum = 0.0;
        for (int i = 0; i < n; ++i) cross += (x[i] + dp) * (z[i] + dd);
        for (int r = 0; r < m; ++r) cross += (w[r] + dp) * (y[r] + dd);
        for (int i = 0; i < n; ++i) dsum += z[i] + dd;
        for (int r = 0; r < m; ++r) dsum += y[r] + dd;
        for (int i = 0; i < n; ++i) psum += x[i] + dp;
        for (int r = 0; r < m; ++r) psum += w[r] + dp;
        const double floor_p = 1e-8 * std::max(1.0, bnorm);
        dp += (dsum > 0.0 ? 0.5 * cross / dsum : 1.0);
        dd += (psum > 0.0 ? 0.5 * cross / psum : 1.0);
        dp = std::max(dp, floor_p);
        dd = std::max(dd, 1e-8);
        for (int i = 0; i < n; ++i) x[i] += dp;
        for (int r = 0; r < m; ++r) w[r] += dp;
        for (int i = 0; i < n; ++i) z[i] += dd;
        for (int r = 0; r < m; ++r) y[r] += dd;
    }

    LPSolution sol;
    double reg = 0.0;

    // Best iterate by worst tolerance-scaled violation; floating point puts a
    // floor under the dual residual, so the final sweeps can oscillate and the
    // best point is not always the last one.
    std::vector<double> best_x;
    double best_score = std::numeric_limits<double>::infinity();
    double best_pinf = 0.0, best_dinf = 0.0, best_gap = 0.0;
    int best_iter = 0;

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        mat_vec(lp, x, ax);
        for (int r = 0; r < m; ++r) rp[r] = lp.rhs[r] - ax[r] - w[r];
        mat_t_vec(lp, y, aty);
        for (int i = 0; i < n; ++i) rd[i] = c[i] - aty[i] + z[i];

        const double mu = (dot(x, z) + dot(w, y)) / (n + m);
        const double cx = dot(c, x);
        const double pinf = inf_norm(rp) / (1.0 + bnorm);
        const double dinf = inf_norm(rd) / 2.0;  // c has unit norm
        const double relgap = (dot(x, z) + dot(w, y)) / (1.0 + std::abs(cx));

        sol.iterations = iter;
        sol.primal_residual = pinf;
        sol.dual_residual = dinf;
        sol.complementarity_gap = relgap;
        if (opt.trace)
            std::fprintf(stderr, "ipm %3d mu=%.3e pinf=%.3e dinf=%.3e gap=%.3e cx=%.6e\n", iter,
                         mu, pinf, dinf, relgap, cx * cscale);
        if (pinf <= opt.tol_feas && dinf <= opt.tol_feas && relgap <= opt.tol_gap) {
            sol.x = x;
            sol.objective = dot(lp.objective, x);
            return sol;
        }

        const double score = std::max({pinf / opt.tol_feas, dinf / opt.tol_feas,
                                       relgap / opt.tol_gap});
        if (score < best_score) {
            best_score = score;
            best_x = x;
            best_pinf = pinf;
            best_dinf = dinf;
            best_gap = relgap;
            best_iter = iter;
        }
        // Once mu is below double-precision resolution of the residuals, or the
        // iterate has blown far past the best point, further steps only amplify
        // roundoff through the 1/x, 1/y scalings.
        if (mu < 1e-18 || score > 1e4 * best_score) break;

        // Normal matrix assembly: A Dx A' + Dw (+ tiny static regularization).
        for (int i = 0; i < n; ++i) dx_scale[i] = x[i] / z[i];
        nm.reset(m, kb);
        for (int col = 0; col < n; ++col) {
            const double d = dx_scale[col];
            for (int k1 = lp.col_ptr[col]; k1 < lp.col_ptr[col + 1]; ++k1) {
                const double v1 = d * lp.value[k1];
                const int r1 = lp.row_idx[k1];
                for (int k2 = k1; k2 < lp.col_ptr[col + 1]; ++k2)
                    nm.at(lp.row_idx[k2], r1) += v1 * lp.value[k2];
            }
        }
        double max_diag = 0.0;
        for (int r = 0; r < m; ++r) {
            nm.at(r, r) += w[r] / y[r];
            max_diag = std::max(max_diag, nm.at(r, r));
        }
        if (reg > 0.0)
            for (int r = 0; r < m; ++r) nm.at(r, r) += reg * (1.0 + max_diag);
        {
            BandedMatrix trial = nm;
            while (!trial.factorize()) {
                reg = (reg == 0.0) ? 1e-12 : reg * 100.0;
                if (reg > 1e-4)
                    throw SolverFailure("interior point: normal matrix not positive definite",
                                        pinf, dinf, relgap);
                trial = nm;
                for (int r = 0; r < m; ++r) trial.at(r, r) += reg * (1.0 + max_diag);
            }
            nm = trial;
        }

        auto solve_step = [&](const std::vector<double>& r_xz, const std::vector<double>& r_wy,
                              std::vector<double>& ox, std::vector<double>& ow,
                              std::vector<double>& oy, std::vector<double>& oz) {
            // rhs_y = A (Dx (rd + rxz/x)) + rwy/y - rp
            for (int i = 0; i < n; ++i) tmp_n[i] = dx_scale[i] * (rd[i] + r_xz[i] / x[i]);
            mat_vec(lp, tmp_n, rhs_y);
            for (int r = 0; r < m; ++r) rhs_y[r] += r_wy[r] / y[r] - rp[r];
            oy = rhs_y;
            nm.solve(oy);
            mat_t_vec(lp, oy, tmp_n);
            for (int i = 0; i < n; ++i)
                ox[i] = dx_scale[i] * (rd[i] + r_xz[i] / x[i] - tmp_n[i]);
            for (int i = 0; i < n; ++i) oz[i] = (r_xz[i] - z[i] * ox[i]) / x[i];
            for (int r = 0; r < m; ++r) ow[r] = (r_wy[r] - w[r] * oy[r]) / y[r];
        };

        // Predictor.
        for (int i = 0; i < n; ++i) rxz[i] = -x[i] * z[i];
        for (int r = 0; r < m; ++r) rwy[r] = -w[r] * y[r];
        solve_step(rxz, rwy, dx_aff, dw_aff, dy_aff, dz_aff);

        const double ap_aff = std::min(max_step(x, dx_aff), max_step(w, dw_aff));
        const double ad_aff = std::min(max_step(z, dz_aff), max_step(y, dy_aff));
        double mu_aff = 0.0;
        for (int i = 0; i < n; ++i)
            mu_aff += (x[i] + ap_aff * dx_aff[i]) * (z[i] + ad_aff * dz_aff[i]);
        for (int r = 0; r < m; ++r)
            mu_aff += (w[r] + ap_aff * dw_aff[r]) * (y[r] + ad_aff * dy_aff[r]);
        mu_aff /= (n + m);
        double sigma = std::pow(mu_aff / mu, 3);
        sigma = std::clamp(sigma, 1e-8, 1.0);
        // While notably infeasible, keep centering: letting the products
        // x z collapse on the boundary strands the iterate at tiny steps
        // with the residuals frozen.
        if (pinf > 10.0 * opt.tol_feas || dinf > 10.0 * opt.tol_feas)
            sigma = std::max(sigma, 0.1);

        // Corrector reuses the factorization.
        for (int i = 0; i < n; ++i)
            rxz[i] = sigma * mu - x[i] * z[i] - dx_aff[i] * dz_aff[i];
        for (int r = 0; r < m; ++r)
            rwy[r] = sigma * mu - w[r] * y[r] - dw_aff[r] * dy_aff[r];
        solve_step(rxz, rwy, dx, dw, dy, dz);

        const double eta = 0.99995;
        const double ap = std::min(1.0, eta * std::min(max_step(x, dx), max_step(w, dw)));
        const double ad = std::min(1.0, eta * std::min(max_step(z, dz), max_step(y, dy)));
        for (int i = 0; i < n; ++i) x[i] += ap * dx[i];
        for (int r = 0; r < m; ++r) w[r] += ap * dw[r];
        for (int r = 0; r < m; ++r) y[r] += ad * dy[r];
        for (int i = 0; i < n; ++i) z[i] += ad * dz[i];
    }

    // Accept the best stored iterate if it is primal-feasible to tolerance and
    // within a small factor on the dual side: the primal point is what flows
    // downstream, the dual residual and gap only bound objective accuracy.
    if (!best_x.empty() && best_pinf <= opt.tol_feas && best_dinf <= 10.0 * opt.tol_feas &&
        best_gap <= 10.0 * opt.tol_gap) {
        sol.x = std::move(best_x);
        sol.objective = dot(lp.objective, sol.x);
        sol.iterations = best_iter;
        sol.primal_residual = best_pinf;
        sol.dual_residual = best_dinf;
        sol.complementarity_gap = best_gap;
        return sol;
    }
    throw SolverFailure("interior point: no iterate within tolerance", best_pinf, best_dinf,
                        best_gap);
}

LPSolution solve_lp(const LPProblem& lp, const IPMOptions& opt) {
    try {
        return solve_lp_interior_point(lp, opt);
    } catch (const SolverFailure&) {
        // Tiny instances occasionally sit on degenerate faces the interior
        // method dislikes; the exact pivot method settles them.
        if (static_cast<long>(lp.n_rows) * lp.n_vars <= 20000) return solve_lp_simplex(lp);
        throw;
    }
}

}  // namespace emfg
