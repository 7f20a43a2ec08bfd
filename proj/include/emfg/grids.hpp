// Space-time grids, discrete measure flows, and the implicit finite-difference
// transition operator that defines the relaxed stopping constraint set.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "emfg/errors.hpp"
#include "emfg/processes.hpp"

namespace emfg {

// Uniform grid on [x_min, x_max] with n_x + 1 nodes and n_t + 1 time points
// on [0, t_horizon].
struct GridSpec {
    double x_min;
    double x_max;
    int n_x;
    double t_horizon;
    int n_t;

    // Unit placeholder grid; real grids come from the validating constructor.
    GridSpec() : GridSpec(0.0, 1.0, 1, 1.0, 1) {}
    GridSpec(double x_min_, double x_max_, int n_x_, double t_horizon_, int n_t_);

    double dx() const { return (x_max - x_min) / n_x; }
    double dt() const { return t_horizon / n_t; }
    double node(int j) const { return x_min + j * dx(); }
    double time(int i) const { return i * dt(); }
    int n_nodes() const { return n_x + 1; }
    int n_times() const { return n_t + 1; }
};

// Row i holds the (sub)measure at time i: masses in GW of installed capacity
// per grid node. Row-major storage, (n_t + 1) x (n_x + 1).
struct MeasureFlow {
    int n_times = 0;
    int n_nodes = 0;
    std::vector<double> values;

    MeasureFlow() = default;
    MeasureFlow(int n_times_, int n_nodes_)
        : n_times(n_times_), n_nodes(n_nodes_),
          values(static_cast<size_t>(n_times_) * n_nodes_, 0.0) {}

    double& at(int i, int j) { return values[static_cast<size_t>(i) * n_nodes + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * n_nodes + j]; }
    std::span<const double> row(int i) const {
        return {values.data() + static_cast<size_t>(i) * n_nodes, static_cast<size_t>(n_nodes)};
    }
    double row_total(int i) const;

    // this = (1 - w) * this + w * other; used by the fictitious-play averaging.
    void mix_in(const MeasureFlow& other, double w);
};

// Tridiagonal operator T of the implicit scheme: constraint rows read
//   m_i >= T m_{i+1} componentwise.
// Row j of T m is sub[j] m_{j-1} + diag[j] m_j + sup[j] m_{j+1}, with
//   diag[j] = 1 + 2 a_j dt / dx^2
//   sup[j]  = -dt (a_{j+1} / dx^2 - mu_{j+1} / (2 dx))
//   sub[j]  = -dt (a_{j-1} / dx^2 + mu_{j-1} / (2 dx))
// where mu is the drift and a the half diffusion at the nodes. Ghost nodes
// beyond both ends carry zero mass, so sub[0] = sup[n-1] = 0.
struct TransitionOperator {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> sup;
    double dt = 0.0;

    int n_nodes() const { return static_cast<int>(diag.size()); }

    // out = T m.
    void apply(std::span<const double> m, std::span<double> out) const;
    // Solve T x = rhs (Thomas algorithm). Throws NumericalError on a vanishing pivot.
    std::vector<double> solve(std::span<const double> rhs) const;
    // Sum of column j, i.e. the total next-step weight a unit mass at node j
    // generates; exactly 1 at interior columns.
    double column_sum(int j) const;
};

TransitionOperator build_transition(const CIRParams& p, const GridSpec& g);
TransitionOperator build_transition(const JacobiParams& p, const GridSpec& g);
// Assemble from explicit per-node drift / half-diffusion values (tests, custom chains).
TransitionOperator build_transition_from_coefficients(const std::vector<double>& drift,
                                                      const std::vector<double>& half_diffusion,
                                                      const GridSpec& g);

// Node masses proportional to the cell-averaged density (cells are the dx
// neighbourhoods of the nodes, clipped at the grid ends), rescaled to sum to
// total_mass. Throws EmptySupportError when the density vanishes on the grid.
std::vector<double> discretize_density(const std::function<double(double)>& density,
                                       const GridSpec& g, double total_mass);

// All of total_mass on the node nearest to x.
std::vector<double> point_mass_vector(const GridSpec& g, double x, double total_mass);

// Flow with row 0 = initial and each subsequent row the implicit-scheme image
// of its predecessor (the constraint held with equality: nobody ever stops).
MeasureFlow evolve_equality(const std::vector<double>& initial, const TransitionOperator& op,
                            int n_t);

// Flow with row 0 = initial and every later row zero (all mass stops at once).
// Feasible for any transition operator, so it is the universal seed.
MeasureFlow immediate_stop_flow(const std::vector<double>& initial, int n_t);

// True iff flow[0] <= initial + tol, every entry >= -tol, and every
// constraint row satisfies (T m_{i+1})_j <= m_i^j + tol.
bool check_feasible(const MeasureFlow& flow, const TransitionOperator& op,
                    const std::vector<double>& initial, double tol);

void write_measure_flow_csv(const std::string& path, const MeasureFlow& flow, const GridSpec& g);
MeasureFlow read_measure_flow_csv(const std::string& path);

}  // namespace emfg
