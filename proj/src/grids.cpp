#include "emfg/grids.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace emfg {

GridSpec::GridSpec(double x_min_, double x_max_, int n_x_, double t_horizon_, int n_t_)
    : x_min(x_min_), x_max(x_max_), n_x(n_x_), t_horizon(t_horizon_), n_t(n_t_) {
    if (!(x_min < x_max))
        throw ValidationError("GridSpec: x_min must be below x_max");
    if (n_x < 1)
        throw ValidationError("GridSpec: need at least two space nodes");
    if (n_t < 1)
        throw ValidationError("GridSpec: need at least one time step");
    if (!(t_horizon > 0.0))
        throw ValidationError("GridSpec: horizon must be positive");
}

double MeasureFlow::row_total(int i) const {
    double s = 0.0;
    for (int j = 0; j < n_nodes; ++j) s += at(i, j);
    return s;
}

void MeasureFlow::mix_in(const MeasureFlow& other, double w) {
    if (other.n_times != n_times || other.n_nodes != n_nodes)
        throw ValidationError("MeasureFlow::mix_in: shape mismatch");
    const double keep = 1.0 - w;
    for (size_t k = 0; k < values.size(); ++k)
        values[k] = keep * values[k] + w * other.values[k];
}

void TransitionOperator::apply(std::span<const double> m, std::span<double> out) const {
    const int n = n_nodes();
    for (int j = 0; j < n; ++j) {
        double v = diag[j] * m[j];
        if (j > 0) v += sub[j] * m[j - 1];
        if (j + 1 < n) v += sup[j] * m[j + 1];
        out[j] = v;
    }
}

std::vector<double> TransitionOperator::solve(std::span<const double> rhs) const {
    const int n = n_nodes();
    std::vector<double> c(n), d(n);
    double pivot = diag[0];
    if (std::abs(pivot) < 1e-300)
        throw NumericalError("TransitionOperator::solve: singular pivot at node 0");
    c[0] = (n > 1 ? sup[0] / pivot : 0.0);
    d[0] = rhs[0] / pivot;
    for (int j = 1; j < n; ++j) {
        pivot = diag[j] - sub[j] * c[j - 1];
        if (std::abs(pivot) < 1e-300)
            throw NumericalError("TransitionOperator::solve: singular pivot at node "
                                 + std::to_string(j));
        c[j] = (j + 1 < n ? sup[j] / pivot : 0.0);
        d[j] = (rhs[j] - sub[j] * d[j - 1]) / pivot;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (int j = n - 2; j >= 0; --j) x[j] = d[j] - c[j] * x[j + 1];
    return x;
}

double TransitionOperator::column_sum(int j) const {
    const int n = n_nodes();
    double s = diag[j];
    if (j + 1 < n) s += sub[j + 1];
    if (j > 0) s += sup[j - 1];
    return s;
}

namespace {

TransitionOperator assemble(const std::vector<double>& mu, const std::vector<double>& a,
                            const GridSpec& g) {
    const int n = g.n_nodes();
    const double dx = g.dx();
    const double dt = g.dt();
    TransitionOperator op;
    op.dt = dt;
    op.sub.assign(n, 0.0);
    op.diag.assign(n, 0.0);
    op.sup.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        op.diag[j] = 1.0 + 2.0 * a[j] * dt / (dx * dx);
        if (j + 1 < n) op.sup[j] = -dt * (a[j + 1] / (dx * dx) - mu[j + 1] / (2.0 * dx));
        if (j > 0) op.sub[j] = -dt * (a[j - 1] / (dx * dx) + mu[j - 1] / (2.0 * dx));
    }
    return op;
}

}  // namespace

TransitionOperator build_transition(const CIRParams& p, const GridSpec& g) {
    const int n = g.n_nodes();
    std::vector<double> mu(n), a(n);
    for (int j = 0; j < n; ++j) {
        const auto dd = drift_diffusion_cir(p, g.node(j));
        mu[j] = dd.drift;
        a[j] = dd.half_diffusion;
    }
    return assemble(mu, a, g);
}

TransitionOperator build_transition(const JacobiParams& p, const GridSpec& g) {
    const int n = g.n_nodes();
    std::vector<double> mu(n), a(n);
    for (int j = 0; j < n; ++j) {
        const auto dd = drift_diffusion_jacobi(p, g.node(j));
        mu[j] = dd.drift;
        a[j] = dd.half_diffusion;
    }
    return assemble(mu, a, g);
}

TransitionOperator build_transition_from_coefficients(const std::vector<double>& drift,
                                                      const std::vector<double>& half_diffusion,
                                                      const GridSpec& g) {
    if (static_cast<int>(drift.size()) != g.n_nodes()
        || static_cast<int>(half_diffusion.size()) != g.n_nodes())
        throw ValidationError("build_transition_from_coefficients: size mismatch with grid");
    return assemble(drift, half_diffusion, g);
}

std::vector<double> discretize_density(const std::function<double(double)>& density,
                                       const GridSpec& g, double total_mass) {
    if (!(total_mass >= 0.0))
        throw ValidationError("discretize_density: negative total mass");
    const int n = g.n_nodes();
    const double h = 0.5 * g.dx();
    std::vector<double> w(n, 0.0);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double lo = std::max(g.x_min, g.node(j) - h);
        const double hi = std::min(g.x_max, g.node(j) + h);
        // Cell mean of the density, 4-interval Simpson.
        const double step = (hi - lo) / 4.0;
        double acc = density(lo) + density(hi);
        acc += 4.0 * (density(lo + step) + density(lo + 3.0 * step));
        acc += 2.0 * density(lo + 2.0 * step);
        w[j] = acc * step / 3.0 / (hi - lo);
        if (!std::isfinite(w[j]) || w[j] < 0.0)
            throw ValidationError("discretize_density: density not finite and nonnegative at node "
                                  + std::to_string(j));
        sum += w[j];
    }
    if (sum <= 1e-300)
        throw EmptySupportError("discretize_density: density carries no mass over the grid");
    std::vector<double> m(n);
    for (int j = 0; j < n; ++j) m[j] = total_mass * w[j] / sum;
    return m;
}

std::vector<double> point_mass_vector(const GridSpec& g, double x, double total_mass) {
    if (x < g.x_min || x > g.x_max)
        throw ValidationError("point_mass_vector: point lies off the grid");
    std::vector<double> m(g.n_nodes(), 0.0);
    const int j = static_cast<int>(std::lround((x - g.x_min) / g.dx()));
    m[std::clamp(j, 0, g.n_x)] = total_mass;
    return m;
}

MeasureFlow evolve_equality(const std::vector<double>& initial, const TransitionOperator& op,
                            int n_t) {
    const int n = op.n_nodes();
    if (static_cast<int>(initial.size()) != n)
        throw ValidationError("evolve_equality: initial mass size mismatch");
    MeasureFlow flow(n_t + 1, n);
    double total0 = 0.0;
    for (int j = 0; j < n; ++j) {
        flow.at(0, j) = initial[j];
        total0 += initial[j];
    }
    const double clamp_floor = -1e-12 * std::max(1.0, total0);
    std::vector<double> cur(initial);
    for (int i = 0; i < n_t; ++i) {
        cur = op.solve(cur);
        for (int j = 0; j < n; ++j) {
            // The centered scheme can produce roundoff-scale negatives where the
            // density vanishes; snap those to zero, let anything larger surface.
            if (cur[j] < 0.0 && cur[j] > clamp_floor) cur[j] = 0.0;
            flow.at(i + 1, j) = cur[j];
        }
    }
    return flow;
}

MeasureFlow immediate_stop_flow(const std::vector<double>& initial, int n_t) {
    MeasureFlow flow(n_t + 1, static_cast<int>(initial.size()));
    for (int j = 0; j < flow.n_nodes; ++j) flow.at(0, j) = initial[j];
    return flow;
}

bool check_feasible(const MeasureFlow& flow, const TransitionOperator& op,
                    const std::vector<double>& initial, double tol) {
    const int n = op.n_nodes();
    if (flow.n_nodes != n || static_cast<int>(initial.size()) != n || flow.n_times < 1)
        return false;
    for (int j = 0; j < n; ++j)
        if (flow.at(0, j) > initial[j] + tol) return false;
    for (int i = 0; i < flow.n_times; ++i)
        for (int j = 0; j < n; ++j)
            if (flow.at(i, j) < -tol) return false;
    std::vector<double> img(n);
    for (int i = 0; i + 1 < flow.n_times; ++i) {
        op.apply(flow.row(i + 1), img);
        for (int j = 0; j < n; ++j)
            if (img[j] > flow.at(i, j) + tol) return false;
    }
    return true;
}

void write_measure_flow_csv(const std::string& path, const MeasureFlow& flow, const GridSpec& g) {
    std::ofstream out(path);
    if (!out) throw IngestionError("write_measure_flow_csv: cannot open " + path);
    char buf[64];
    out << "# grid: x_min=" << g.x_min << " x_max=" << g.x_max << " n_x=" << g.n_x
        << " t_horizon=" << g.t_horizon << " n_t=" << g.n_t << "\n";
    out << "time_index";
    for (int j = 0; j < flow.n_nodes; ++j) out << ",node_" << j;
    out << "\n";
    for (int i = 0; i < flow.n_times; ++i) {
        out << i;
        for (int j = 0; j < flow.n_nodes; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", flow.at(i, j));
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw IngestionError("write_measure_flow_csv: write failed for " + path);
}

MeasureFlow read_measure_flow_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("read_measure_flow_csv: cannot open " + path);
    std::string line;
    std::vector<std::vector<double>> rows;
    int n_nodes = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("time_index", 0) == 0) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first) { first = false; continue; }  // time index column
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError("read_measure_flow_csv: bad number '" + cell + "' in " + path);
            }
        }
        if (n_nodes < 0) n_nodes = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != n_nodes)
            throw ParseError("read_measure_flow_csv: ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty() || n_nodes < 1)
        throw ParseError("read_measure_flow_csv: no data rows in " + path);
    MeasureFlow flow(static_cast<int>(rows.size()), n_nodes);
    for (int i = 0; i < flow.n_times; ++i)
        for (int j = 0; j < n_nodes; ++j) flow.at(i, j) = rows[i][j];
    return flow;
}

}  // namespace emfg
