#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "emfg/best_response.hpp"
#include "emfg/grids.hpp"
#include "emfg/processes.hpp"

using namespace emfg;

namespace {

struct Instance {
    GridSpec grid;
    TransitionOperator op;
    std::vector<double> rewards;
    std::vector<double> initial;
    int n_t;
};

// Diffusion-dominated chain: off-diagonals <= 0, so the backward induction
// is an exact dual of the LP.
Instance random_instance(std::mt19937_64& rng, int n_x, int n_t) {
    GridSpec g(0.0, 1.0, n_x, 1.0, n_t);
    std::uniform_real_distribution<double> mu(-1.0, 1.0), diff(0.5, 1.5);
    std::uniform_real_distribution<double> rew(-1.0, 1.0), mass(0.1, 1.0);
    const int n = g.n_nodes();
    std::vector<double> drift(n), half(n);
    for (int j = 0; j < n; ++j) {
        drift[j] = mu(rng);
        half[j] = diff(rng);
    }
    Instance inst{g, build_transition_from_coefficients(drift, half, g), {}, {}, n_t};
    inst.rewards.resize(static_cast<size_t>(g.n_times()) * n);
    for (double& r : inst.rewards) r = rew(rng);
    inst.initial.resize(n);
    for (double& m : inst.initial) m = mass(rng);
    return inst;
}

double lp_value(const Instance& inst, double rho) {
    LPProblem lp = build_stopping_lp(inst.rewards, rho, inst.op, inst.initial, inst.n_t);
    auto [flow, value] = solve_best_response(lp, inst.grid.n_times(), inst.op.n_nodes());
    return value;
}

double dp_value(const Instance& inst, double rho) {
    StoppingValue v = dp_stopping_value(inst.rewards, rho, inst.op, inst.n_t);
    return stopping_value_inner(v, inst.initial);
}

}  // namespace

TEST_CASE("LP optimum equals the backward induction value") {
    std::mt19937_64 rng(20260816);
    for (int trial = 0; trial < 12; ++trial) {
        Instance inst = random_instance(rng, 4 + trial % 4, 3 + trial % 5);
        const double lp = lp_value(inst, 0.1);
        const double dp = dp_value(inst, 0.1);
        CHECK(std::abs(lp - dp) <= 1e-6 * (1.0 + std::abs(dp)));
    }
}

TEST_CASE("all-negative rewards make immediate stopping optimal") {
    std::mt19937_64 rng(2);
    Instance inst = random_instance(rng, 5, 4);
    for (double& r : inst.rewards) r = -std::abs(r) - 0.1;
    CHECK(dp_value(inst, 0.1) == 0.0);
    CHECK(lp_value(inst, 0.1) <= 1e-8);
    StoppingValue v = dp_stopping_value(inst.rewards, 0.1, inst.op, inst.n_t);
    for (int i = 0; i < v.n_times; ++i)
        for (int j = 0; j < v.n_nodes; ++j) {
            CHECK(v.value(i, j) == 0.0);
            CHECK(v.stops(i, j));
        }
}

TEST_CASE("zero rewards are worth zero") {
    std::mt19937_64 rng(3);
    Instance inst = random_instance(rng, 4, 3);
    for (double& r : inst.rewards) r = 0.0;
    CHECK(dp_value(inst, 0.1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(lp_value(inst, 0.1)) <= 1e-8);
}

TEST_CASE("frozen chain reduces to a per-node discounted sum") {
    // Zero drift and diffusion: the implicit step is the identity, so the LP
    // decouples node by node and keeping mass pays the geometric sum.
    GridSpec g(0.0, 1.0, 1, 1.0, 2);  // nodes {0, 1}, dt = 0.5
    TransitionOperator op = build_transition_from_coefficients({0.0, 0.0}, {0.0, 0.0}, g);
    const double rho = 0.1;
    const double dt = g.dt();
    const double d = std::exp(-rho * dt);
    // Node 0 earns 1 forever; node 1 pays 1 up front, then earns 2 twice.
    std::vector<double> rewards = {1.0, -1.0, 1.0, 2.0, 1.0, 2.0};
    std::vector<double> initial = {3.0, 5.0};
    Instance inst{g, op, rewards, initial, 2};
    const double keep0 = 3.0 * dt * (1.0 + d + d * d);
    const double keep1 = 5.0 * dt * (-1.0 + 2.0 * d + 2.0 * d * d);
    CHECK(keep1 > 0.0);  // staying beats stopping despite the up-front loss
    const double expect = keep0 + keep1;
    CHECK(dp_value(inst, rho) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(lp_value(inst, rho) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("optimal value is homogeneous in the initial mass") {
    std::mt19937_64 rng(7);
    Instance inst = random_instance(rng, 5, 4);
    const double base = lp_value(inst, 0.1);
    Instance scaled = inst;
    for (double& m : scaled.initial) m *= 3.5;
    CHECK(lp_value(scaled, 0.1) == doctest::Approx(3.5 * base).epsilon(1e-6));
}

TEST_CASE("best-response flow is feasible and consistent with its value") {
    std::mt19937_64 rng(13);
    Instance inst = random_instance(rng, 6, 5);
    LPProblem lp = build_stopping_lp(inst.rewards, 0.1, inst.op, inst.initial, inst.n_t);
    auto [flow, value] = solve_best_response(lp, inst.grid.n_times(), inst.op.n_nodes());
    CHECK(flow.n_times == inst.grid.n_times());
    CHECK(flow.n_nodes == inst.op.n_nodes());
    CHECK(check_feasible(flow, inst.op, inst.initial, 1e-7));
    CHECK(discounted_flow_value(flow, inst.rewards, 0.1, inst.grid.dt())
          == doctest::Approx(value).epsilon(1e-9));
}

TEST_CASE("backward induction refuses when complementarity cannot settle") {
    // Strong advection against weak diffusion flips off-diagonal signs in the
    // centered scheme; the obstacle step is then no longer monotone and its
    // active-set iteration can cycle. The induction must refuse rather than
    // return an unverified value. Coefficients frozen from a failing draw.
    GridSpec g(0.0, 1.0, 8, 1.0, 2);
    std::vector<double> mu = {
        -7.3668955864821495, 0.67655951988167295, 2.1044539921592147,
        5.4761682429725766,  -1.2296293526152793, 6.8868975829868493,
        -3.9261591180291253, 4.643030303831809,   0.92288850868219363};
    std::vector<double> half = {
        0.121511459225461,    0.016146159335738104, 0.087596253321493567,
        0.18172877144856564,  0.132827540664094,    0.072155183867317563,
        0.091710826764704934, 0.14060697929076113,  0.061048936375634202};
    std::vector<double> rewards = {
        -1.4167365729800059,   0.3170562203957652,   0.25819851306007457,
        -1.4143275210876132,   -1.3993386686394582,  -1.9202642994097132,
        0.2176304641166964,    0.74932871474758711,  -0.44738779538928286,
        1.7151552430597703,    -1.2808244818702959,  -1.2403684243905311,
        -0.095325765559581832, -0.97164187753855003, 1.9216295753612624,
        1.9418820618008965,    -1.3618280324947127,  0.68026134806219662,
        1.0710852029691198,    1.3527317907999254,   -1.3097698095613486,
        -1.4798796694190286,   -0.73308109580436365, 1.5314439492824392,
        -0.40078486631590104,  -0.32850103666849617, 0.063759630117762089};
    TransitionOperator op = build_transition_from_coefficients(mu, half, g);
    CHECK_THROWS_AS(dp_stopping_value(rewards, 0.1, op, g.n_t), NumericalError);
}

TEST_CASE("solution reshaping preserves layout") {
    LPSolution sol;
    sol.x = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    MeasureFlow flow = solution_to_flow(sol, 3, 2);
    CHECK(flow.n_times == 3);
    CHECK(flow.n_nodes == 2);
    CHECK(flow.at(0, 0) == 1.0);
    CHECK(flow.at(0, 1) == 2.0);
    CHECK(flow.at(2, 1) == 6.0);
}
