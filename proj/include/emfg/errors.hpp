// Error taxonomy shared by all solver modules.
#pragma once

#include <stdexcept>
#include <string>

namespace emfg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Moments violate a hard precondition (non-positive mean, negative std, ...).
struct InvalidMomentsError : Error { using Error::Error; };
// Moments are internally consistent but no process parameter can reproduce them.
struct InfeasibleMomentsError : Error { using Error::Error; };
// A density query on a process with zero volatility.
struct DegenerateDistributionError : Error { using Error::Error; };
// A density whose mass over the requested grid is numerically zero.
struct EmptySupportError : Error { using Error::Error; };
// Structural validation of grids, flows, configs and input files.
struct ValidationError : Error { using Error::Error; };
// Malformed text in a scenario, moments or CSV file.
struct ParseError : Error { using Error::Error; };
// A file that cannot be opened, written, or whose rows do not cover the grid.
struct IngestionError : Error { using Error::Error; };
// A numerical routine hit a state it cannot recover from (singular pivot, ...).
struct NumericalError : Error { using Error::Error; };

// LP solver could not reach the requested tolerances; carries final residuals.
struct SolverFailure : Error {
    double primal_residual;
    double dual_residual;
    double complementarity_gap;
    SolverFailure(const std::string& what, double rp, double rd, double gap)
        : Error(what), primal_residual(rp), dual_residual(rd), complementarity_gap(gap) {}
};

}  // namespace emfg
