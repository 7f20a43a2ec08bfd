#include <cmath>
#include <vector>

#include "doctest.h"
#include "emfg/processes.hpp"

using namespace emfg;

namespace {

// Composite Simpson quadrature of f over [lo, hi].
template <typename F>
double simpson(F f, double lo, double hi, int n_intervals) {
    const double h = (hi - lo) / n_intervals;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < n_intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("cost calibration reproduces the frozen volatility") {
    // delta = sqrt(2 k std^2 / mean) with k = 0.5, mean = 33.4, std = 11.
    CIRParams p = calibrate_cir({33.4, 11.0}, 0.5);
    CHECK(p.theta == doctest::Approx(33.4).epsilon(1e-15));
    CHECK(p.k == 0.5);
    CHECK(p.delta == doctest::Approx(1.9033534855664525).epsilon(1e-12));
    CHECK(feller_condition_holds(p));
}

TEST_CASE("capacity factor calibration reproduces the frozen volatility") {
    // delta_bar^2 = 2 k std^2 / (mean (1 - mean) - std^2).
    JacobiParams p = calibrate_jacobi({0.4261, 0.0443}, 0.5);
    CHECK(p.theta_bar == doctest::Approx(0.4261).epsilon(1e-15));
    CHECK(p.delta_bar == doctest::Approx(0.08994552115141817).epsilon(1e-12));
}

TEST_CASE("calibration round-trips through the closed-form stationary moments") {
    for (double mean : {10.0, 33.4, 80.0}) {
        for (double sd : {2.0, 11.0}) {
            CIRParams p = calibrate_cir({mean, sd}, 0.5);
            StationaryMoments m = cir_stationary_moments(p);
            CHECK(m.mean == doctest::Approx(mean).epsilon(1e-12));
            CHECK(m.std_dev == doctest::Approx(sd).epsilon(1e-12));
        }
    }
    for (double mean : {0.2, 0.4261, 0.7}) {
        for (double sd : {0.02, 0.0443}) {
            JacobiParams p = calibrate_jacobi({mean, sd}, 0.5);
            StationaryMoments m = jacobi_stationary_moments(p);
            CHECK(m.mean == doctest::Approx(mean).epsilon(1e-12));
            CHECK(m.std_dev == doctest::Approx(sd).epsilon(1e-12));
        }
    }
}

TEST_CASE("stationary densities integrate to the calibrated moments") {
    CIRParams c = calibrate_cir({33.4, 11.0}, 0.5);
    auto cw = [&](double x) { return cir_stationary_density(c, x); };
    const double hi = 33.4 + 20 * 11.0;
    const double mass = simpson(cw, 1e-9, hi, 20000);
    const double mean = simpson([&](double x) { return x * cw(x); }, 1e-9, hi, 20000);
    const double m2 = simpson([&](double x) { return x * x * cw(x); }, 1e-9, hi, 20000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mean / mass == doctest::Approx(33.4).epsilon(1e-4));
    CHECK(std::sqrt(m2 / mass - mean / mass * mean / mass)
          == doctest::Approx(11.0).epsilon(1e-4));

    JacobiParams j = calibrate_jacobi({0.4261, 0.0443}, 0.5);
    auto jw = [&](double x) { return jacobi_stationary_density(j, x); };
    const double jm = simpson(jw, 1e-12, 1.0 - 1e-12, 40000);
    const double jmean = simpson([&](double x) { return x * jw(x); }, 1e-12, 1.0 - 1e-12, 40000);
    const double jm2 =
        simpson([&](double x) { return x * x * jw(x); }, 1e-12, 1.0 - 1e-12, 40000);
    CHECK(jm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(jmean / jm == doctest::Approx(0.4261).epsilon(1e-4));
    CHECK(std::sqrt(jm2 / jm - jmean / jm * jmean / jm)
          == doctest::Approx(0.0443).epsilon(1e-4));
}

TEST_CASE("boundary non-attainment flips when volatility dominates") {
    CHECK(feller_condition_holds({0.5, 33.4, 1.9033534855664525}));
    // 2 k theta = 1 < delta^2 = 4.
    CHECK_FALSE(feller_condition_holds({0.5, 1.0, 2.0}));
}

TEST_CASE("drift and half diffusion at the long-run mean") {
    CIRParams c = calibrate_cir({33.4, 11.0}, 0.5);
    DriftDiffusion dc = drift_diffusion_cir(c, 33.4);
    CHECK(dc.drift == doctest::Approx(0.0).epsilon(1e-12));
    // a(theta) = delta^2 theta / 2 = k std^2 = 60.5.
    CHECK(dc.half_diffusion == doctest::Approx(60.5).epsilon(1e-12));

    JacobiParams j = calibrate_jacobi({0.4261, 0.0443}, 0.5);
    DriftDiffusion dj = drift_diffusion_jacobi(j, 0.4261);
    CHECK(dj.drift == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dj.half_diffusion == doctest::Approx(0.00098918346513468124).epsilon(1e-10));
    // Off the mean the drift pulls back toward it.
    CHECK(drift_diffusion_cir(c, 40.0).drift < 0.0);
    CHECK(drift_diffusion_cir(c, 20.0).drift > 0.0);
    CHECK(drift_diffusion_jacobi(j, 0.9).drift < 0.0);
}

TEST_CASE("invalid and infeasible moments are rejected") {
    CHECK_THROWS_AS(calibrate_cir({-1.0, 11.0}, 0.5), InvalidMomentsError);
    CHECK_THROWS_AS(calibrate_cir({0.0, 11.0}, 0.5), InvalidMomentsError);
    CHECK_THROWS_AS(calibrate_cir({33.4, -2.0}, 0.5), InvalidMomentsError);
    CHECK_THROWS_AS(calibrate_cir({33.4, 11.0}, 0.0), InvalidMomentsError);
    CHECK_THROWS_AS(calibrate_jacobi({1.2, 0.04}, 0.5), InvalidMomentsError);
    // std^2 >= mean (1 - mean) has no beta law.
    CHECK_THROWS_AS(calibrate_jacobi({0.4261, 0.4946}, 0.5), InfeasibleMomentsError);
    CHECK_THROWS_AS(calibrate_jacobi({0.5, 0.5}, 0.5), InfeasibleMomentsError);
}

TEST_CASE("zero volatility has no density to evaluate") {
    CHECK_THROWS_AS(cir_stationary_density({0.5, 33.4, 0.0}, 33.4),
                    DegenerateDistributionError);
    CHECK_THROWS_AS(jacobi_stationary_density({0.5, 0.4261, 0.0}, 0.4261),
                    DegenerateDistributionError);
    // Moments stay well defined: the law collapses to a point mass.
    CHECK(cir_stationary_moments({0.5, 33.4, 0.0}).std_dev == 0.0);
}
