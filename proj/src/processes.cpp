#include "emfg/processes.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace emfg {

namespace {

void require_moments(const StationaryMoments& m, double k, const char* who) {
    if (!(k > 0.0))
        throw InvalidMomentsError(std::string(who) + ": mean-reversion rate must be positive");
    if (!std::isfinite(m.mean) || !std::isfinite(m.std_dev))
        throw InvalidMomentsError(std::string(who) + ": non-finite moments");
    if (m.std_dev < 0.0)
        throw InvalidMomentsError(std::string(who) + ": negative standard deviation");
}

}  // namespace

CIRParams calibrate_cir(const StationaryMoments& m, double k) {
    require_moments(m, k, "calibrate_cir");
    if (!(m.mean > 0.0))
        throw InvalidMomentsError("calibrate_cir: stationary mean must be positive");
    // Stationary variance is theta delta^2 / (2k); solve for delta.
    const double delta = std::sqrt(2.0 * k * m.std_dev * m.std_dev / m.mean);
    return CIRParams{k, m.mean, delta};
}

JacobiParams calibrate_jacobi(const StationaryMoments& m, double k_bar) {
    require_moments(m, k_bar, "calibrate_jacobi");
    if (!(m.mean > 0.0) || !(m.mean < 1.0))
        throw InvalidMomentsError("calibrate_jacobi: stationary mean must lie in (0, 1)");
    // Stationary variance is theta(1-theta) delta^2 / (2k + delta^2); a beta law
    // cannot have var >= mean(1-mean).
    const double var = m.std_dev * m.std_dev;
    const double cap = m.mean * (1.0 - m.mean);
    if (var >= cap)
        throw InfeasibleMomentsError(
            "calibrate_jacobi: std^2 >= mean(1-mean), no bounded diffusion matches");
    const double delta_bar = std::sqrt(2.0 * k_bar * var / (cap - var));
    return JacobiParams{k_bar, m.mean, delta_bar};
}

bool feller_condition_holds(const CIRParams& p) {
    return 2.0 * p.k * p.theta >= p.delta * p.delta;
}

double cir_stationary_density(const CIRParams& p, double x) {
    if (!(p.delta > 0.0))
        throw DegenerateDistributionError("cir_stationary_density: delta = 0 has no density");
    if (x < 0.0) return 0.0;
    const double shape = 2.0 * p.k * p.theta / (p.delta * p.delta);
    const double rate = 2.0 * p.k / (p.delta * p.delta);
    if (x == 0.0) {
        if (shape > 1.0) return 0.0;
        if (shape == 1.0) return rate;
        return std::numeric_limits<double>::infinity();
    }
    const double log_pdf = shape * std::log(rate) + (shape - 1.0) * std::log(x)
                         - rate * x - std::lgamma(shape);
    return std::exp(log_pdf);
}

double jacobi_stationary_density(const JacobiParams& p, double x) {
    if (!(p.delta_bar > 0.0))
        throw DegenerateDistributionError("jacobi_stationary_density: delta_bar = 0 has no density");
    if (x < 0.0 || x > 1.0) return 0.0;
    const double d2 = p.delta_bar * p.delta_bar;
    const double a = 2.0 * p.k_bar * p.theta_bar / d2;
    const double b = 2.0 * p.k_bar * (1.0 - p.theta_bar) / d2;
    if (x == 0.0 || x == 1.0) {
        const double edge_exp = (x == 0.0) ? a : b;
        if (edge_exp > 1.0) return 0.0;
        return std::numeric_limits<double>::infinity();
    }
    const double log_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double log_pdf = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_b;
    return std::exp(log_pdf);
}

StationaryMoments cir_stationary_moments(const CIRParams& p) {
    const double var = p.theta * p.delta * p.delta / (2.0 * p.k);
    return {p.theta, std::sqrt(var)};
}

StationaryMoments jacobi_stationary_moments(const JacobiParams& p) {
    const double d2 = p.delta_bar * p.delta_bar;
    const double var = p.theta_bar * (1.0 - p.theta_bar) * d2 / (2.0 * p.k_bar + d2);
    return {p.theta_bar, std::sqrt(var)};
}

DriftDiffusion drift_diffusion_cir(const CIRParams& p, double x) {
    return {p.k * (p.theta - x), 0.5 * p.delta * p.delta * x};
}

DriftDiffusion drift_diffusion_jacobi(const JacobiParams& p, double x) {
    return {p.k_bar * (p.theta_bar - x), 0.5 * p.delta_bar * p.delta_bar * x * (1.0 - x)};
}

}  // namespace emfg
