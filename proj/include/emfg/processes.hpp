// Cost and capacity-factor diffusions: parameters, moment calibration,
// stationary densities and the drift/diffusion coefficients the grid
// discretization consumes.
#pragma once

#include "emfg/errors.hpp"

namespace emfg {

// Mean-reverting square-root cost process
//   dC = k (theta - C) dt + delta sqrt(C) dW,   C >= 0.
// Stationary law is gamma with shape 2 k theta / delta^2 and rate 2 k / delta^2.
struct CIRParams {
    double k;      // mean-reversion rate, 1/year
    double theta;  // long-run mean cost, GBP/MWh
    double delta;  // volatility coefficient
};

// Bounded capacity-factor process on [0, 1]
//   dS = k_bar (theta_bar - S) dt + delta_bar sqrt(S (1 - S)) dW.
// Stationary law is beta(2 k_bar theta_bar / delta_bar^2,
//                       2 k_bar (1 - theta_bar) / delta_bar^2).
struct JacobiParams {
    double k_bar;
    double theta_bar;  // long-run mean capacity factor, in (0, 1)
    double delta_bar;
};

struct StationaryMoments {
    double mean;
    double std_dev;
};

// Invert the stationary mean/std for a fixed mean-reversion rate.
// theta = mean, delta = sqrt(2 k std^2 / mean).
CIRParams calibrate_cir(const StationaryMoments& m, double k);

// theta_bar = mean, delta_bar^2 = 2 k_bar std^2 / (mean (1 - mean) - std^2).
// Throws InfeasibleMomentsError when std^2 >= mean (1 - mean).
JacobiParams calibrate_jacobi(const StationaryMoments& m, double k_bar);

// Boundary non-attainment: 2 k theta >= delta^2.
bool feller_condition_holds(const CIRParams& p);

double cir_stationary_density(const CIRParams& p, double x);
double jacobi_stationary_density(const JacobiParams& p, double x);

StationaryMoments cir_stationary_moments(const CIRParams& p);
StationaryMoments jacobi_stationary_moments(const JacobiParams& p);

// Drift and half diffusion a(x) = sigma^2(x)/2 as used by the scheme:
// the generator is mu(x) d/dx + a(x) d^2/dx^2.
struct DriftDiffusion {
    double drift;
    double half_diffusion;
};

DriftDiffusion drift_diffusion_cir(const CIRParams& p, double x);
DriftDiffusion drift_diffusion_jacobi(const JacobiParams& p, double x);

}  // namespace emfg
