#include "emfg/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "emfg/errors.hpp"
#include "emfg/processes.hpp"

namespace fs = std::filesystem;

namespace emfg {
namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError(where + ": empty numeric value");
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ParseError(where + ": cannot parse '" + t + "' as a number");
    if (!std::isfinite(v)) throw ParseError(where + ": non-finite value '" + t + "'");
    return v;
}

int parse_int(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError(where + ": empty integer value");
    char* end = nullptr;
    long v = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size())
        throw ParseError(where + ": cannot parse '" + t + "' as an integer");
    if (v < -1000000000L || v > 1000000000L)
        throw ParseError(where + ": integer '" + t + "' out of range");
    return static_cast<int>(v);
}

struct KeyValue {
    std::string value;
    int line = 0;
    bool used = false;
};

// Sections of key = value pairs; duplicate keys within a section are errors.
class ScenarioReader {
public:
    explicit ScenarioReader(const std::string& path) : path_(path) {
        std::ifstream in(path);
        if (!in) throw IngestionError("cannot open scenario file: " + path);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ParseError(loc(lineno) + ": malformed section header '" + line + "'");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw ParseError(loc(lineno) + ": empty section name");
                sections_[section];
                continue;
            }
            size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ParseError(loc(lineno) + ": expected 'key = value', got '" + line + "'");
            if (section.empty())
                throw ParseError(loc(lineno) + ": key before any [section] header");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ParseError(loc(lineno) + ": empty key");
            auto& sec = sections_[section];
            if (sec.count(key))
                throw ParseError(loc(lineno) + ": duplicate key '" + section + "." + key + "'");
            sec[key] = KeyValue{value, lineno, false};
        }
    }

    bool has(const std::string& section, const std::string& key) const {
        auto it = sections_.find(section);
        return it != sections_.end() && it->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) {
        KeyValue* kv = find(section, key);
        if (!kv) return fallback;
        kv->used = true;
        return kv->value;
    }

    std::string get_string_required(const std::string& section, const std::string& key) {
        KeyValue* kv = find(section, key);
        if (!kv)
            throw ParseError(path_ + ": missing required key '" + section + "." + key + "'");
        kv->used = true;
        return kv->value;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) {
        KeyValue* kv = find(section, key);
        if (!kv) return fallback;
        kv->used = true;
        return parse_double(kv->value, loc(kv->line) + " (" + section + "." + key + ")");
    }

    int get_int(const std::string& section, const std::string& key, int fallback) {
        KeyValue* kv = find(section, key);
        if (!kv) return fallback;
        kv->used = true;
        return parse_int(kv->value, loc(kv->line) + " (" + section + "." + key + ")");
    }

    // Every key must belong to the schema; typos fail loudly instead of
    // silently running with a default.
    void check_all_used() const {
        for (const auto& [section, kvs] : sections_) {
            for (const auto& [key, kv] : kvs) {
                if (!kv.used)
                    throw ParseError(loc(kv.line) + ": unknown key '" + section + "." + key + "'");
            }
        }
    }

private:
    KeyValue* find(const std::string& section, const std::string& key) {
        auto it = sections_.find(section);
        if (it == sections_.end()) return nullptr;
        auto jt = it->second.find(key);
        if (jt == it->second.end()) return nullptr;
        return &jt->second;
    }

    std::string loc(int line) const { return path_ + ":" + std::to_string(line); }

    std::string path_;
    std::map<std::string, std::map<std::string, KeyValue>> sections_;
};

std::string resolve_relative(const std::string& base_file, const std::string& maybe_relative) {
    fs::path p(maybe_relative);
    if (p.is_absolute()) return p.lexically_normal().string();
    fs::path dir = fs::path(base_file).parent_path();
    return (dir / p).lexically_normal().string();
}

void require_positive(double v, const std::string& name) {
    if (!(v > 0.0)) throw ValidationError(name + " must be positive, got " + fmt(v));
}

void require_non_negative(double v, const std::string& name) {
    if (!(v >= 0.0)) throw ValidationError(name + " must be non-negative, got " + fmt(v));
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path) {
    ScenarioReader r(path);
    ScenarioConfig cfg;

    cfg.k_per_year = r.get_double("processes", "k_per_year", cfg.k_per_year);
    cfg.cost_mean_gbp_mwh = r.get_double("processes", "cost_mean_gbp_mwh", cfg.cost_mean_gbp_mwh);
    cfg.cost_std_gbp_mwh = r.get_double("processes", "cost_std_gbp_mwh", cfg.cost_std_gbp_mwh);
    cfg.k_bar_per_year = r.get_double("processes", "k_bar_per_year", cfg.k_bar_per_year);
    cfg.factor_mean = r.get_double("processes", "factor_mean", cfg.factor_mean);
    cfg.factor_std = r.get_double("processes", "factor_std", cfg.factor_std);

    cfg.cost_n_x = r.get_int("grids", "cost_n_x", cfg.cost_n_x);
    cfg.cost_x_max_gbp_mwh = r.get_double("grids", "cost_x_max_gbp_mwh", cfg.cost_x_max_gbp_mwh);
    cfg.factor_n_x = r.get_int("grids", "factor_n_x", cfg.factor_n_x);
    cfg.n_t = r.get_int("grids", "n_t", cfg.n_t);
    cfg.horizon_years = r.get_double("grids", "horizon_years", cfg.horizon_years);

    cfg.market.epsilon = r.get_double("market", "epsilon_gbp_mwh", cfg.market.epsilon);
    cfg.market.price_cap = r.get_double("market", "price_cap_gbp_mwh", cfg.market.price_cap);
    cfg.market.baseline_max_gw = r.get_double("market", "baseline_max_gw", cfg.market.baseline_max_gw);
    cfg.market.conventional_capacity_gw =
        r.get_double("market", "conventional_capacity_gw", cfg.market.conventional_capacity_gw);
    cfg.market.renewable_installed_gw =
        r.get_double("market", "renewable_installed_gw", cfg.market.renewable_installed_gw);
    cfg.market.renewable_potential_gw =
        r.get_double("market", "renewable_potential_gw", cfg.market.renewable_potential_gw);
    cfg.market.price_tol_rel = r.get_double("market", "price_tol_rel", cfg.market.price_tol_rel);

    cfg.rho_per_year = r.get_double("conventional_economics", "rho_per_year", cfg.rho_per_year);
    cfg.kappa_c_gbp_per_mw_year =
        r.get_double("conventional_economics", "kappa_c_gbp_per_mw_year", cfg.kappa_c_gbp_per_mw_year);
    cfg.salvage_gbp_per_kw =
        r.get_double("conventional_economics", "salvage_gbp_per_kw", cfg.salvage_gbp_per_kw);
    cfg.gamma_c_per_year =
        r.get_double("conventional_economics", "gamma_c_per_year", cfg.gamma_c_per_year);

    cfg.capital_gbp_per_kw =
        r.get_double("renewable_economics", "capital_gbp_per_kw", cfg.capital_gbp_per_kw);
    cfg.om_fraction_of_capital =
        r.get_double("renewable_economics", "om_fraction_of_capital", cfg.om_fraction_of_capital);
    cfg.gamma_r_per_year =
        r.get_double("renewable_economics", "gamma_r_per_year", cfg.gamma_r_per_year);

    cfg.renewable_subsidy_fraction =
        r.get_double("policy", "renewable_subsidy_fraction", cfg.renewable_subsidy_fraction);
    cfg.capacity_payment_gbp_per_kw_year =
        r.get_double("policy", "capacity_payment_gbp_per_kw_year", cfg.capacity_payment_gbp_per_kw_year);

    cfg.demand_file = resolve_relative(path, r.get_string_required("demand", "file"));
    std::string segments = r.get_string_required("demand", "segments");
    for (const std::string& raw : split(segments, ',')) {
        std::string label = trim(raw);
        if (label.empty()) throw ParseError(path + ": empty segment label in demand.segments");
        double w = r.get_double("demand", "weight_" + label, -1.0);
        if (w < 0.0)
            throw ParseError(path + ": missing demand.weight_" + label + " for segment '" + label + "'");
        cfg.segment_weights.emplace_back(label, w);
    }

    cfg.max_iters = r.get_int("fictitious_play", "max_iters", cfg.max_iters);
    cfg.exploitability_target_gbp =
        r.get_double("fictitious_play", "exploitability_target_gbp", cfg.exploitability_target_gbp);

    r.check_all_used();

    // Structural validation beyond per-key parsing.
    require_positive(cfg.k_per_year, "processes.k_per_year");
    require_positive(cfg.k_bar_per_year, "processes.k_bar_per_year");
    if (cfg.cost_n_x < 1 || cfg.factor_n_x < 1)
        throw ValidationError("grid interior node counts must be >= 1");
    if (cfg.n_t < 1) throw ValidationError("grids.n_t must be >= 1");
    require_positive(cfg.horizon_years, "grids.horizon_years");
    require_positive(cfg.market.epsilon, "market.epsilon_gbp_mwh");
    require_positive(cfg.market.price_cap, "market.price_cap_gbp_mwh");
    require_non_negative(cfg.market.baseline_max_gw, "market.baseline_max_gw");
    require_positive(cfg.market.conventional_capacity_gw, "market.conventional_capacity_gw");
    require_non_negative(cfg.market.renewable_installed_gw, "market.renewable_installed_gw");
    require_positive(cfg.market.renewable_potential_gw, "market.renewable_potential_gw");
    require_positive(cfg.rho_per_year, "conventional_economics.rho_per_year");
    require_non_negative(cfg.gamma_c_per_year, "conventional_economics.gamma_c_per_year");
    require_positive(cfg.capital_gbp_per_kw, "renewable_economics.capital_gbp_per_kw");
    require_non_negative(cfg.om_fraction_of_capital, "renewable_economics.om_fraction_of_capital");
    require_non_negative(cfg.gamma_r_per_year, "renewable_economics.gamma_r_per_year");
    if (cfg.renewable_subsidy_fraction < 0.0 || cfg.renewable_subsidy_fraction > 1.0)
        throw ValidationError("policy.renewable_subsidy_fraction must lie in [0, 1]");
    require_non_negative(cfg.capacity_payment_gbp_per_kw_year,
                         "policy.capacity_payment_gbp_per_kw_year");
    if (cfg.max_iters < 1) throw ValidationError("fictitious_play.max_iters must be >= 1");
    require_non_negative(cfg.exploitability_target_gbp,
                         "fictitious_play.exploitability_target_gbp");
    double weight_sum = 0.0;
    for (const auto& [label, w] : cfg.segment_weights) {
        if (!(w > 0.0))
            throw ValidationError("demand segment weight for '" + label + "' must be positive");
        weight_sum += w;
    }
    if (weight_sum > 1.0 + 1e-9)
        throw ValidationError("demand segment weights sum to " + fmt(weight_sum) + " > 1");
    return cfg;
}

std::pair<ConventionalEconomics, RenewableEconomics> apply_policy(const ScenarioConfig& cfg) {
    ConventionalEconomics ce;
    ce.rho = cfg.rho_per_year;
    // GBP/MW/year -> GBP/GW/year; the capacity payment (GBP/kW/year) offsets
    // the running cost one-for-one.
    ce.kappa_c = cfg.kappa_c_gbp_per_mw_year * 1e3 - cfg.capacity_payment_gbp_per_kw_year * 1e6;
    ce.k_c = cfg.salvage_gbp_per_kw * 1e6;
    ce.gamma_c = cfg.gamma_c_per_year;

    RenewableEconomics re;
    re.rho = cfg.rho_per_year;
    // The subsidy scales the build cost; operating cost stays keyed to the
    // unsubsidised capital stock.
    re.k_r = cfg.capital_gbp_per_kw * 1e6 * (1.0 - cfg.renewable_subsidy_fraction);
    re.kappa_r = cfg.om_fraction_of_capital * cfg.capital_gbp_per_kw * 1e6;
    re.gamma_r = cfg.gamma_r_per_year;
    return {ce, re};
}

std::vector<DemandSegment> load_demand(const std::string& path, int n_times,
                                       const std::vector<std::pair<std::string, double>>& weights) {
    if (weights.empty()) throw ValidationError("demand needs at least one segment");
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open demand file: " + path);

    std::map<std::string, size_t> index;
    std::vector<DemandSegment> segments;
    for (const auto& [label, w] : weights) {
        if (index.count(label))
            throw ValidationError("duplicate demand segment label '" + label + "'");
        index[label] = segments.size();
        DemandSegment seg;
        seg.label = label;
        seg.hours_weight = w;
        seg.demand_gw.assign(static_cast<size_t>(n_times),
                             std::numeric_limits<double>::quiet_NaN());
        segments.push_back(std::move(seg));
    }

    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw IngestionError(path + ": empty demand file");
    ++lineno;
    {
        auto cols = split(trim(line), ',');
        if (cols.size() != 3 || trim(cols[0]) != "time_index" || trim(cols[1]) != "segment" ||
            trim(cols[2]) != "demand_gw")
            throw IngestionError(path + ": expected header 'time_index,segment,demand_gw'");
    }
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        auto cols = split(t, ',');
        const std::string where = path + ":" + std::to_string(lineno);
        if (cols.size() != 3) throw IngestionError(where + ": expected 3 columns");
        int ti = parse_int(cols[0], where);
        std::string label = trim(cols[1]);
        double d = parse_double(cols[2], where);
        if (ti < 0)
            throw IngestionError(where + ": time_index " + std::to_string(ti) +
                                 " must be non-negative");
        // Rows past the horizon are allowed so one file can serve many grids.
        if (ti >= n_times) continue;
        auto it = index.find(label);
        if (it == index.end())
            throw IngestionError(where + ": segment '" + label + "' not declared in the scenario");
        if (!(d >= 0.0)) throw IngestionError(where + ": demand must be non-negative");
        double& slot = segments[it->second].demand_gw[static_cast<size_t>(ti)];
        if (!std::isnan(slot))
            throw IngestionError(where + ": duplicate entry for segment '" + label +
                                 "' at time_index " + std::to_string(ti));
        slot = d;
    }
    for (const auto& seg : segments) {
        for (int i = 0; i < n_times; ++i) {
            if (std::isnan(seg.demand_gw[static_cast<size_t>(i)]))
                throw IngestionError(path + ": segment '" + seg.label +
                                     "' missing time_index " + std::to_string(i));
        }
    }
    return segments;
}

AssembledModel assemble_model(const ScenarioConfig& cfg) {
    AssembledModel out;
    out.cost_process =
        calibrate_cir({cfg.cost_mean_gbp_mwh, cfg.cost_std_gbp_mwh}, cfg.k_per_year);
    out.factor_process = calibrate_jacobi({cfg.factor_mean, cfg.factor_std}, cfg.k_bar_per_year);
    if (!feller_condition_holds(out.cost_process))
        out.warnings.push_back(
            "cost process can reach zero: 2*k*theta < delta^2 for the calibrated parameters");

    double x_max = cfg.cost_x_max_gbp_mwh > 0.0
                       ? cfg.cost_x_max_gbp_mwh
                       : cfg.cost_mean_gbp_mwh + 10.0 * cfg.cost_std_gbp_mwh;

    ModelInstance& m = out.model;
    m.cost_grid = GridSpec(0.0, x_max, cfg.cost_n_x, cfg.horizon_years, cfg.n_t);
    m.factor_grid = GridSpec(0.0, 1.0, cfg.factor_n_x, cfg.horizon_years, cfg.n_t);
    m.cost_transition = build_transition(out.cost_process, m.cost_grid);
    m.factor_transition = build_transition(out.factor_process, m.factor_grid);

    const CIRParams cir = out.cost_process;
    const JacobiParams jac = out.factor_process;
    m.omega0 = discretize_density([cir](double x) { return cir_stationary_density(cir, x); },
                                  m.cost_grid, cfg.market.conventional_capacity_gw);
    auto jac_density = [jac](double x) { return jacobi_stationary_density(jac, x); };
    // Installed turbines and the entrants' pool share the stationary capacity
    // factor law; the aggregate starts at installed + potential.
    m.eta_bar0 = discretize_density(jac_density, m.factor_grid,
                                    cfg.market.renewable_installed_gw +
                                        cfg.market.renewable_potential_gw);
    m.eta0 = discretize_density(jac_density, m.factor_grid, cfg.market.renewable_potential_gw);
    m.eta_bar = evolve_equality(m.eta_bar0, m.factor_transition, cfg.n_t);

    m.segments = load_demand(cfg.demand_file, cfg.n_t + 1, cfg.segment_weights);
    m.market = cfg.market;
    auto econ = apply_policy(cfg);
    m.conv_econ = econ.first;
    m.ren_econ = econ.second;
    return out;
}

void write_config_echo(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestionError("cannot write config echo: " + path);
    out << "# Resolved scenario echo; loadable as a scenario file.\n";
    out << "[processes]\n";
    out << "k_per_year = " << fmt(cfg.k_per_year) << "\n";
    out << "cost_mean_gbp_mwh = " << fmt(cfg.cost_mean_gbp_mwh) << "\n";
    out << "cost_std_gbp_mwh = " << fmt(cfg.cost_std_gbp_mwh) << "\n";
    out << "k_bar_per_year = " << fmt(cfg.k_bar_per_year) << "\n";
    out << "factor_mean = " << fmt(cfg.factor_mean) << "\n";
    out << "factor_std = " << fmt(cfg.factor_std) << "\n";
    out << "\n[grids]\n";
    out << "cost_n_x = " << cfg.cost_n_x << "\n";
    out << "cost_x_max_gbp_mwh = " << fmt(cfg.cost_x_max_gbp_mwh) << "\n";
    out << "factor_n_x = " << cfg.factor_n_x << "\n";
    out << "n_t = " << cfg.n_t << "\n";
    out << "horizon_years = " << fmt(cfg.horizon_years) << "\n";
    out << "\n[market]\n";
    out << "epsilon_gbp_mwh = " << fmt(cfg.market.epsilon) << "\n";
    out << "price_cap_gbp_mwh = " << fmt(cfg.market.price_cap) << "\n";
    out << "baseline_max_gw = " << fmt(cfg.market.baseline_max_gw) << "\n";
    out << "conventional_capacity_gw = " << fmt(cfg.market.conventional_capacity_gw) << "\n";
    out << "renewable_installed_gw = " << fmt(cfg.market.renewable_installed_gw) << "\n";
    out << "renewable_potential_gw = " << fmt(cfg.market.renewable_potential_gw) << "\n";
    out << "price_tol_rel = " << fmt(cfg.market.price_tol_rel) << "\n";
    out << "\n[conventional_economics]\n";
    out << "rho_per_year = " << fmt(cfg.rho_per_year) << "\n";
    out << "kappa_c_gbp_per_mw_year = " << fmt(cfg.kappa_c_gbp_per_mw_year) << "\n";
    out << "salvage_gbp_per_kw = " << fmt(cfg.salvage_gbp_per_kw) << "\n";
    out << "gamma_c_per_year = " << fmt(cfg.gamma_c_per_year) << "\n";
    out << "\n[renewable_economics]\n";
    out << "capital_gbp_per_kw = " << fmt(cfg.capital_gbp_per_kw) << "\n";
    out << "om_fraction_of_capital = " << fmt(cfg.om_fraction_of_capital) << "\n";
    out << "gamma_r_per_year = " << fmt(cfg.gamma_r_per_year) << "\n";
    out << "\n[policy]\n";
    out << "renewable_subsidy_fraction = " << fmt(cfg.renewable_subsidy_fraction) << "\n";
    out << "capacity_payment_gbp_per_kw_year = " << fmt(cfg.capacity_payment_gbp_per_kw_year)
        << "\n";
    out << "\n[demand]\n";
    out << "file = " << cfg.demand_file << "\n";
    out << "segments = ";
    for (size_t i = 0; i < cfg.segment_weights.size(); ++i) {
        if (i) out << ", ";
        out << cfg.segment_weights[i].first;
    }
    out << "\n";
    for (const auto& [label, w] : cfg.segment_weights)
        out << "weight_" << label << " = " << fmt(w) << "\n";
    out << "\n[fictitious_play]\n";
    out << "max_iters = " << cfg.max_iters << "\n";
    out << "exploitability_target_gbp = " << fmt(cfg.exploitability_target_gbp) << "\n";
    if (!out) throw IngestionError("short write on config echo: " + path);
}

std::string write_results(const EquilibriumResult& result, const ScenarioConfig& cfg,
                          const AssembledModel& assembled, const std::string& out_dir,
                          const std::string& scenario_path, double wall_time_seconds) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    const ModelInstance& m = assembled.model;
    const int n_times = m.cost_grid.n_times();

    {
        std::ofstream out(dir / "prices.csv");
        if (!out) throw IngestionError("cannot write prices.csv in " + out_dir);
        out << "time_index,time_years,segment,price_gbp_mwh\n";
        for (int i = 0; i < n_times; ++i) {
            for (size_t s = 0; s < m.segments.size(); ++s) {
                out << i << "," << fmt(m.cost_grid.time(i)) << "," << m.segments[s].label << ","
                    << fmt(result.prices[s][static_cast<size_t>(i)]) << "\n";
            }
        }
    }
    {
        std::ofstream out(dir / "capacities.csv");
        if (!out) throw IngestionError("cannot write capacities.csv in " + out_dir);
        out << "time_index,time_years,conventional_gw,renewable_entered_gw\n";
        for (int i = 0; i < n_times; ++i) {
            out << i << "," << fmt(m.cost_grid.time(i)) << ","
                << fmt(result.conventional_capacity_gw[static_cast<size_t>(i)]) << ","
                << fmt(result.renewable_entered_gw[static_cast<size_t>(i)]) << "\n";
        }
    }
    {
        std::ofstream out(dir / "exploitability.csv");
        if (!out) throw IngestionError("cannot write exploitability.csv in " + out_dir);
        out << "iteration,conventional_gbp,renewable_gbp,"
               "conventional_gbp_per_mw_hour,renewable_gbp_per_mw_hour\n";
        for (size_t it = 0; it < result.history.size(); ++it) {
            const ExploitabilityPair& e = result.history[it];
            out << (it + 1) << "," << fmt(e.e_c) << "," << fmt(e.e_r) << ","
                << fmt(exploitability_per_mw_hour(e.e_c, cfg.market.conventional_capacity_gw,
                                                  cfg.horizon_years))
                << ","
                << fmt(exploitability_per_mw_hour(e.e_r, cfg.market.renewable_potential_gw,
                                                  cfg.horizon_years))
                << "\n";
        }
    }
    write_measure_flow_csv((dir / "omega.csv").string(), result.omega, m.cost_grid);
    write_measure_flow_csv((dir / "eta.csv").string(), result.eta, m.factor_grid);
    write_measure_flow_csv((dir / "eta_bar.csv").string(), result.eta_bar, m.factor_grid);
    write_config_echo(cfg, (dir / "config_echo.scenario").string());

    // Manifest last: its presence marks a complete bundle.
    const std::string manifest_path = (dir / "manifest.txt").string();
    {
        std::ofstream out(manifest_path);
        if (!out) throw IngestionError("cannot write manifest.txt in " + out_dir);
        out << "scenario_path = " << scenario_path << "\n";
        out << "scenario_name = " << fs::path(scenario_path).stem().string() << "\n";
        out << "status = complete\n";
        out << "n_t = " << cfg.n_t << "\n";
        out << "cost_n_x = " << cfg.cost_n_x << "\n";
        out << "factor_n_x = " << cfg.factor_n_x << "\n";
        out << "horizon_years = " << fmt(cfg.horizon_years) << "\n";
        out << "cost_k = " << fmt(assembled.cost_process.k) << "\n";
        out << "cost_theta = " << fmt(assembled.cost_process.theta) << "\n";
        out << "cost_delta = " << fmt(assembled.cost_process.delta) << "\n";
        out << "cost_stays_positive = "
            << (feller_condition_holds(assembled.cost_process) ? "true" : "false") << "\n";
        out << "factor_k = " << fmt(assembled.factor_process.k_bar) << "\n";
        out << "factor_theta = " << fmt(assembled.factor_process.theta_bar) << "\n";
        out << "factor_delta = " << fmt(assembled.factor_process.delta_bar) << "\n";
        out << "iterations = " << result.iterations << "\n";
        out << "termination = " << result.termination_reason << "\n";
        out << "final_exploitability_conventional_gbp = " << fmt(result.final_exploitability.e_c)
            << "\n";
        out << "final_exploitability_renewable_gbp = " << fmt(result.final_exploitability.e_r)
            << "\n";
        out << "final_exploitability_conventional_gbp_per_mw_hour = "
            << fmt(exploitability_per_mw_hour(result.final_exploitability.e_c,
                                              cfg.market.conventional_capacity_gw,
                                              cfg.horizon_years))
            << "\n";
        out << "final_exploitability_renewable_gbp_per_mw_hour = "
            << fmt(exploitability_per_mw_hour(result.final_exploitability.e_r,
                                              cfg.market.renewable_potential_gw,
                                              cfg.horizon_years))
            << "\n";
        out << "feasibility_violations = " << result.feasibility_violations << "\n";
        for (const std::string& w : assembled.warnings) out << "warning = " << w << "\n";
        out << "wall_time_seconds = " << fmt(wall_time_seconds) << "\n";
        if (!out) throw IngestionError("short write on manifest.txt in " + out_dir);
    }
    return manifest_path;
}

std::map<std::string, std::vector<double>> read_prices_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open prices file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IngestionError(path + ": empty prices file");
    {
        auto cols = split(trim(line), ',');
        if (cols.size() != 4 || trim(cols[0]) != "time_index" || trim(cols[2]) != "segment" ||
            trim(cols[3]) != "price_gbp_mwh")
            throw IngestionError(path +
                                 ": expected header 'time_index,time_years,segment,price_gbp_mwh'");
    }
    std::map<std::string, std::vector<double>> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        auto cols = split(t, ',');
        const std::string where = path + ":" + std::to_string(lineno);
        if (cols.size() != 4) throw IngestionError(where + ": expected 4 columns");
        int ti = parse_int(cols[0], where);
        std::string label = trim(cols[2]);
        double price = parse_double(cols[3], where);
        auto& series = out[label];
        if (ti != static_cast<int>(series.size()))
            throw IngestionError(where + ": rows for segment '" + label +
                                 "' must appear in time order without gaps");
        series.push_back(price);
    }
    if (out.empty()) throw IngestionError(path + ": no price rows");
    return out;
}

CapacitySeries read_capacities_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open capacities file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IngestionError(path + ": empty capacities file");
    {
        auto cols = split(trim(line), ',');
        if (cols.size() != 4 || trim(cols[0]) != "time_index" ||
            trim(cols[2]) != "conventional_gw" || trim(cols[3]) != "renewable_entered_gw")
            throw IngestionError(
                path + ": expected header 'time_index,time_years,conventional_gw,renewable_entered_gw'");
    }
    CapacitySeries out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        auto cols = split(t, ',');
        const std::string where = path + ":" + std::to_string(lineno);
        if (cols.size() != 4) throw IngestionError(where + ": expected 4 columns");
        int ti = parse_int(cols[0], where);
        if (ti != static_cast<int>(out.conventional_gw.size()))
            throw IngestionError(where + ": rows must appear in time order without gaps");
        out.conventional_gw.push_back(parse_double(cols[2], where));
        out.renewable_entered_gw.push_back(parse_double(cols[3], where));
    }
    if (out.conventional_gw.empty()) throw IngestionError(path + ": no capacity rows");
    return out;
}

}  // namespace emfg
