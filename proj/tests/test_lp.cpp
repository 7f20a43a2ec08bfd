#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "emfg/best_response.hpp"
#include "emfg/grids.hpp"
#include "emfg/lp.hpp"

using namespace emfg;

namespace {

// A stopping LP on a diffusion-dominated chain: off-diagonals stay <= 0, so
// both the simplex cross-check and the backward induction are valid on it.
struct Instance {
    GridSpec grid;
    TransitionOperator op;
    std::vector<double> rewards;
    std::vector<double> initial;
    int n_t;
};

Instance random_instance(std::mt19937_64& rng, int n_x, int n_t) {
    GridSpec g(0.0, 1.0, n_x, 1.0, n_t);
    std::uniform_real_distribution<double> mu(-1.0, 1.0), diff(0.5, 1.5);
    std::uniform_real_distribution<double> rew(-1.0, 1.0), mass(0.1, 1.0);
    const int n = g.n_nodes();
    std::vector<double> drift(n), half(n);
    for (int j = 0; j < n; ++j) {
        drift[j] = mu(rng);
        half[j] = diff(rng);  // a / dx >= 5 >> |mu| / 2 keeps the scheme monotone
    }
    Instance inst{g, build_transition_from_coefficients(drift, half, g), {}, {}, n_t};
    inst.rewards.resize(static_cast<size_t>(g.n_times()) * n);
    for (double& r : inst.rewards) r = rew(rng);
    inst.initial.resize(n);
    for (double& m : inst.initial) m = mass(rng);
    return inst;
}

}  // namespace

TEST_CASE("stopping LP has the documented shape") {
    GridSpec g(0.0, 1.0, 1, 1.0, 1);  // two nodes, one time step
    TransitionOperator op = build_transition_from_coefficients({0.0, 0.0}, {0.5, 0.5}, g);
    std::vector<double> rewards(4, 1.0);
    std::vector<double> initial = {1.0, 2.0};
    LPProblem lp = build_stopping_lp(rewards, 0.1, op, initial, 1);
    CHECK(lp.n_rows == 4);   // 2 initial rows + 2 transition rows
    CHECK(lp.n_vars == 4);   // (n_t + 1) * n_nodes
    CHECK_NOTHROW(lp.validate());
    CHECK(lp.rhs[0] == 1.0);
    CHECK(lp.rhs[1] == 2.0);
    CHECK(lp.rhs[2] == 0.0);
    CHECK(lp.coupling_bandwidth() <= op.n_nodes() + 2);
}

TEST_CASE("interior point and simplex agree on random stopping instances") {
    std::mt19937_64 rng(20260816);
    for (int trial = 0; trial < 10; ++trial) {
        Instance inst = random_instance(rng, 4 + trial % 3, 3 + trial % 4);
        LPProblem lp = build_stopping_lp(inst.rewards, 0.1, inst.op, inst.initial, inst.n_t);
        LPSolution ip = solve_lp_interior_point(lp);
        LPSolution sx = solve_lp_simplex(lp);
        CHECK(std::abs(ip.objective - sx.objective)
              <= 1e-6 * (1.0 + std::abs(sx.objective)));
        CHECK(ip.primal_residual <= 1e-7);
        CHECK(ip.complementarity_gap <= 1e-6);
    }
}

TEST_CASE("reported solution satisfies the constraints") {
    std::mt19937_64 rng(5);
    Instance inst = random_instance(rng, 6, 5);
    LPProblem lp = build_stopping_lp(inst.rewards, 0.1, inst.op, inst.initial, inst.n_t);
    LPSolution sol = solve_lp(lp);
    REQUIRE(static_cast<int>(sol.x.size()) == lp.n_vars);
    for (double v : sol.x) CHECK(v >= -1e-9);
    // A x <= b, accumulated column-wise.
    std::vector<double> ax(lp.n_rows, 0.0);
    for (int c = 0; c < lp.n_vars; ++c)
        for (int k = lp.col_ptr[c]; k < lp.col_ptr[c + 1]; ++k)
            ax[lp.row_idx[k]] += lp.value[k] * sol.x[c];
    for (int r = 0; r < lp.n_rows; ++r) CHECK(ax[r] <= lp.rhs[r] + 1e-7);
    // Objective recomputes from the solution vector.
    double obj = 0.0;
    for (int c = 0; c < lp.n_vars; ++c) obj += lp.objective[c] * sol.x[c];
    CHECK(obj == doctest::Approx(sol.objective).epsilon(1e-9));
}

TEST_CASE("degenerate options surface as solver failure") {
    std::mt19937_64 rng(11);
    Instance inst = random_instance(rng, 4, 3);
    LPProblem lp = build_stopping_lp(inst.rewards, 0.1, inst.op, inst.initial, inst.n_t);
    IPMOptions opt;
    opt.max_iters = 0;
    CHECK_THROWS_AS(solve_lp_interior_point(lp, opt), SolverFailure);
    try {
        solve_lp_interior_point(lp, opt);
    } catch (const SolverFailure& e) {
        CHECK(std::string(e.what()).find("interior point") != std::string::npos);
    }
}

TEST_CASE("sparse storage validation catches malformed problems") {
    LPProblem lp;
    lp.n_rows = 2;
    lp.n_vars = 2;
    lp.col_ptr = {0, 1, 2};
    lp.row_idx = {0, 1};
    lp.value = {1.0, 1.0};
    lp.rhs = {1.0, 1.0};
    lp.objective = {1.0, 1.0};
    CHECK_NOTHROW(lp.validate());

    LPProblem bad = lp;
    bad.col_ptr = {0, 2, 2};
    bad.row_idx = {1, 0};  // not strictly increasing inside the column
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = lp;
    bad.row_idx = {0, 5};  // out of range
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = lp;
    bad.rhs = {1.0};
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = lp;
    bad.n_vars = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("MPS dump carries the problem sections") {
    LPProblem lp;
    lp.n_rows = 1;
    lp.n_vars = 2;
    lp.col_ptr = {0, 1, 2};
    lp.row_idx = {0, 0};
    lp.value = {1.0, 2.0};
    lp.rhs = {3.0};
    lp.objective = {1.0, 0.5};
    const std::string path =
        (std::filesystem::temp_directory_path() / "emfg_dump.mps").string();
    lp.write_mps(path, "toy");
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    for (const char* needle : {"NAME toy", "OBJSENSE", "MAX", "ROWS", "COLUMNS",
                               "RHS", "ENDATA", "X0", "X1", "R0"})
        CHECK(text.find(needle) != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("tiny-instance fallback still solves when the iteration cap is hit") {
    // solve_lp retries on the simplex when the interior point runs out of
    // iterations and the instance is small enough.
    std::mt19937_64 rng(3);
    Instance inst = random_instance(rng, 3, 2);
    LPProblem lp = build_stopping_lp(inst.rewards, 0.1, inst.op, inst.initial, inst.n_t);
    IPMOptions opt;
    opt.max_iters = 1;
    LPSolution via_fallback = solve_lp(lp, opt);
    LPSolution direct = solve_lp_simplex(lp);
    CHECK(via_fallback.objective
          == doctest::Approx(direct.objective).epsilon(1e-9));
}
