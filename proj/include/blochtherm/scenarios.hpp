#pragma once

// Scenario runner: reproducible parameter sets, their computation, and the
// CSV/SVG artifacts they emit.  Each scenario ships defaults that regenerate
// a reference figure of the accompanying study with no further configuration.
//
// Configuration is a single JSON document; unknown keys are rejected with
// their full path.  All temperatures in configs are dimensionless ratios
// k_B T / eps; times are in units of 1/gamma0 (or 1/g_c for the closed pair).

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "blochtherm/bloch.hpp"
#include "blochtherm/csv.hpp"
#include "blochtherm/dynamics.hpp"
#include "blochtherm/ledger.hpp"
#include "blochtherm/svg.hpp"
#include "blochtherm/trajectory.hpp"

namespace blochtherm {

inline constexpr const char* version_string = "0.1.0";

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Typed scenario configurations (defaults reproduce the reference figures)
// ---------------------------------------------------------------------------

struct SurfacesConfig {
    double step = 0.005;
};

struct CmaxConfig {};

/// Initial state of a dim-4 scenario: either per-atom Bloch triples (the
/// third component along each atom's local field direction) or an explicit
/// density matrix.
struct PairInitial {
    std::optional<std::array<double, 3>> bloch_a;
    std::optional<std::array<double, 3>> bloch_b;
    std::optional<Mat4> rho;
};

struct TwoAtomsConfig {
    TwoAtomDissipative model{1.0, 0.5, 2.0};
    PairInitial initial{std::array<double, 3>{0.0, 0.0, 1.0},
                        std::array<double, 3>{0.2, 0.2, 0.8}, std::nullopt};
    IntegratorConfig integrator{1e-9, 1e-12, std::numeric_limits<double>::infinity(), 20.0, 0.002};
};

struct JcMarkovConfig {
    double gamma0 = 1.0;
    double omega0 = 2.0;
    double t_env = 10.0;  // k_B T_E / eps
    std::vector<double> start_temperatures{5.0, 15.0};
    double start_angle_deg = 45.0;
    IntegratorConfig integrator{1e-9, 1e-12, std::numeric_limits<double>::infinity(), 20.0, 0.001};

    double eps() const { return 0.5 * omega0; }
    SingleQubitThermal model() const { return {gamma0, omega0, t_env * eps()}; }
};

struct IsothermalConfig {
    double gamma0 = 1.0;
    double omega0 = 2.0;
    double t_env = 1.0;  // k_B T_E / eps; the starts sit on this isotherm
    std::vector<double> start_angles_deg{30.0, 60.0};
    IntegratorConfig integrator{1e-9, 1e-12, std::numeric_limits<double>::infinity(), 12.0, 0.002};

    double eps() const { return 0.5 * omega0; }
    SingleQubitThermal model() const { return {gamma0, omega0, t_env * eps()}; }
};

struct ClosedPairConfig {
    ClosedPairExchange model{0.5, 1.0, 1.0};
    std::uint64_t seed = 12345;
    PairInitial initial;  // empty -> seeded random product state
    IntegratorConfig integrator{1e-9, 1e-12, std::numeric_limits<double>::infinity(), 10.0, 0.002};
};

struct ScenarioConfig {
    std::string scenario;
    std::filesystem::path out_dir = ".";
    bool emit_svg = false;
    std::variant<SurfacesConfig, CmaxConfig, TwoAtomsConfig, JcMarkovConfig, IsothermalConfig,
                 ClosedPairConfig>
        params;
};

inline const std::vector<std::pair<std::string, std::string>>& scenario_catalog() {
    static const std::vector<std::pair<std::string, std::string>> catalog = {
        {"surfaces", "temperature and heat capacity over the (B, B_par) state space"},
        {"cmax", "global maximum of the heat capacity and its location"},
        {"two-atoms", "two atoms exchanging photons in a zero-temperature environment"},
        {"jc-markov", "qubit relaxing in a thermal reservoir (Markovian regime)"},
        {"isothermal", "relaxation started on the isotherm of the bath temperature"},
        {"closed-pair", "entropy balance of a closed two-qubit exchange"},
    };
    return catalog;
}

// ---------------------------------------------------------------------------
// JSON parsing with strict key checking
// ---------------------------------------------------------------------------

namespace cfg {

using nlohmann::json;

inline void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw config_error("config key '" + path + "' must be an object");
}

inline void check_keys(const json& obj, const std::vector<std::string>& allowed,
                       const std::string& prefix) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw config_error("unknown config key '" +
                               (prefix.empty() ? key : prefix + "." + key) + "'");
    }
}

inline double number(const json& obj, const std::string& key, double dflt,
                     const std::string& prefix) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number())
        throw config_error("config key '" + prefix + key + "' must be a number");
    return obj[key].get<double>();
}

inline std::vector<double> number_list(const json& obj, const std::string& key,
                                       std::vector<double> dflt, const std::string& prefix) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj[key];
    if (!v.is_array() || v.empty())
        throw config_error("config key '" + prefix + key + "' must be a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            throw config_error("config key '" + prefix + key + "' must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

inline std::array<double, 3> triple(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3)
        throw config_error("config key '" + path + "' must be an array of 3 numbers");
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number()) throw config_error("config key '" + path + "' must hold numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

/// 4x4 complex matrix as a 4x4 array of [re, im] pairs.
inline Mat4 matrix4(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 4)
        throw config_error("config key '" + path + "' must be a 4x4 array of [re, im] pairs");
    Mat4 out;
    for (int r = 0; r < 4; ++r) {
        if (!v[r].is_array() || v[r].size() != 4)
            throw config_error("config key '" + path + "' must be a 4x4 array of [re, im] pairs");
        for (int c = 0; c < 4; ++c) {
            const json& e = v[r][c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw config_error("config key '" + path + "' entries must be [re, im] pairs");
            out(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return out;
}

inline IntegratorConfig integrator(const json& root, const IntegratorConfig& dflt) {
    IntegratorConfig out = dflt;
    if (!root.contains("integrator")) return out;
    const json& j = root["integrator"];
    require_object(j, "integrator");
    check_keys(j, {"rel_tol", "abs_tol", "max_step", "t_end", "sample_interval"}, "integrator");
    out.rel_tol = number(j, "rel_tol", dflt.rel_tol, "integrator.");
    out.abs_tol = number(j, "abs_tol", dflt.abs_tol, "integrator.");
    if (j.contains("max_step") && j["max_step"] == "unbounded")  // resolved-config round trip
        out.max_step = std::numeric_limits<double>::infinity();
    else
        out.max_step = number(j, "max_step", dflt.max_step, "integrator.");
    out.t_end = number(j, "t_end", dflt.t_end, "integrator.");
    out.sample_interval = number(j, "sample_interval", dflt.sample_interval, "integrator.");
    return out;
}

inline PairInitial pair_initial(const json& root, const PairInitial& dflt) {
    PairInitial out = dflt;
    if (!root.contains("initial")) return out;
    const json& j = root["initial"];
    require_object(j, "initial");
    check_keys(j, {"bloch_a", "bloch_b", "rho"}, "initial");
    if (j.contains("rho")) {
        if (j.contains("bloch_a") || j.contains("bloch_b"))
            throw config_error("config key 'initial' accepts either 'rho' or Bloch triples, not both");
        out = PairInitial{std::nullopt, std::nullopt, matrix4(j["rho"], "initial.rho")};
        return out;
    }
    if (j.contains("bloch_a")) out.bloch_a = triple(j["bloch_a"], "initial.bloch_a");
    if (j.contains("bloch_b")) out.bloch_b = triple(j["bloch_b"], "initial.bloch_b");
    out.rho.reset();
    return out;
}

}  // namespace cfg

inline ScenarioConfig parse_config(const nlohmann::json& root) {
    using cfg::json;
    cfg::require_object(root, "");
    cfg::check_keys(root, {"scenario", "out_dir", "emit_svg", "grid", "model", "initial",
                           "integrator"},
                    "");
    if (!root.contains("scenario") || !root["scenario"].is_string())
        throw config_error("config must contain a string key 'scenario'");

    ScenarioConfig out;
    out.scenario = root["scenario"].get<std::string>();
    if (root.contains("out_dir")) {
        if (!root["out_dir"].is_string()) throw config_error("config key 'out_dir' must be a string");
        out.out_dir = root["out_dir"].get<std::string>();
    }
    if (root.contains("emit_svg")) {
        if (!root["emit_svg"].is_boolean())
            throw config_error("config key 'emit_svg' must be a boolean");
        out.emit_svg = root["emit_svg"].get<bool>();
    }

    const auto reject = [&](const char* key) {
        if (root.contains(key))
            throw config_error("config key '" + std::string(key) + "' is not accepted by scenario '" +
                               out.scenario + "'");
    };

    if (out.scenario == "surfaces") {
        reject("model");
        reject("initial");
        reject("integrator");
        SurfacesConfig sc;
        if (root.contains("grid")) {
            cfg::require_object(root["grid"], "grid");
            cfg::check_keys(root["grid"], {"step"}, "grid");
            sc.step = cfg::number(root["grid"], "step", sc.step, "grid.");
        }
        if (!(sc.step > 1e-4 && sc.step <= 0.5))
            throw config_error("config key 'grid.step' must lie in (1e-4, 0.5]");
        out.params = sc;
    } else if (out.scenario == "cmax") {
        reject("grid");
        reject("model");
        reject("initial");
        reject("integrator");
        out.params = CmaxConfig{};
    } else if (out.scenario == "two-atoms") {
        reject("grid");
        TwoAtomsConfig sc;
        if (root.contains("model")) {
            const json& m = root["model"];
            cfg::require_object(m, "model");
            cfg::check_keys(m, {"gamma0", "g", "omega0"}, "model");
            sc.model.gamma0 = cfg::number(m, "gamma0", sc.model.gamma0, "model.");
            sc.model.g = cfg::number(m, "g", sc.model.g, "model.");
            sc.model.omega0 = cfg::number(m, "omega0", sc.model.omega0, "model.");
        }
        sc.initial = cfg::pair_initial(root, sc.initial);
        sc.integrator = cfg::integrator(root, sc.integrator);
        out.params = sc;
    } else if (out.scenario == "jc-markov") {
        reject("grid");
        JcMarkovConfig sc;
        if (root.contains("model")) {
            const json& m = root["model"];
            cfg::require_object(m, "model");
            cfg::check_keys(m, {"gamma0", "omega0", "t_env"}, "model");
            sc.gamma0 = cfg::number(m, "gamma0", sc.gamma0, "model.");
            sc.omega0 = cfg::number(m, "omega0", sc.omega0, "model.");
            sc.t_env = cfg::number(m, "t_env", sc.t_env, "model.");
        }
        if (root.contains("initial")) {
            const json& j = root["initial"];
            cfg::require_object(j, "initial");
            cfg::check_keys(j, {"temperatures", "angle_deg"}, "initial");
            sc.start_temperatures =
                cfg::number_list(j, "temperatures", sc.start_temperatures, "initial.");
            sc.start_angle_deg = cfg::number(j, "angle_deg", sc.start_angle_deg, "initial.");
        }
        if (!(sc.start_angle_deg >= 0.0 && sc.start_angle_deg < 90.0))
            throw config_error("config key 'initial.angle_deg' must lie in [0, 90)");
        sc.integrator = cfg::integrator(root, sc.integrator);
        out.params = sc;
    } else if (out.scenario == "isothermal") {
        reject("grid");
        IsothermalConfig sc;
        if (root.contains("model")) {
            const json& m = root["model"];
            cfg::require_object(m, "model");
            cfg::check_keys(m, {"gamma0", "omega0", "t_env"}, "model");
            sc.gamma0 = cfg::number(m, "gamma0", sc.gamma0, "model.");
            sc.omega0 = cfg::number(m, "omega0", sc.omega0, "model.");
            sc.t_env = cfg::number(m, "t_env", sc.t_env, "model.");
        }
        if (root.contains("initial")) {
            const json& j = root["initial"];
            cfg::require_object(j, "initial");
            cfg::check_keys(j, {"angles_deg"}, "initial");
            sc.start_angles_deg = cfg::number_list(j, "angles_deg", sc.start_angles_deg, "initial.");
        }
        for (double a : sc.start_angles_deg)
            if (!(a >= 0.0 && a < 90.0))
                throw config_error("config key 'initial.angles_deg' entries must lie in [0, 90)");
        sc.integrator = cfg::integrator(root, sc.integrator);
        out.params = sc;
    } else if (out.scenario == "closed-pair") {
        reject("grid");
        ClosedPairConfig sc;
        if (root.contains("model")) {
            const json& m = root["model"];
            cfg::require_object(m, "model");
            cfg::check_keys(m, {"g_c", "eps_a", "eps_b"}, "model");
            sc.model.g_c = cfg::number(m, "g_c", sc.model.g_c, "model.");
            sc.model.eps_a = cfg::number(m, "eps_a", sc.model.eps_a, "model.");
            sc.model.eps_b = cfg::number(m, "eps_b", sc.model.eps_b, "model.");
        }
        if (root.contains("initial")) {
            const json& j = root["initial"];
            cfg::require_object(j, "initial");
            cfg::check_keys(j, {"seed", "bloch_a", "bloch_b", "rho"}, "initial");
            if (j.contains("seed")) {
                if (!j["seed"].is_number_unsigned())
                    throw config_error("config key 'initial.seed' must be a nonnegative integer");
                sc.seed = j["seed"].get<std::uint64_t>();
            }
            if (j.contains("rho")) {
                if (j.contains("bloch_a") || j.contains("bloch_b") || j.contains("seed"))
                    throw config_error(
                        "config key 'initial' accepts either 'rho', or Bloch triples, or 'seed'");
                sc.initial.rho = cfg::matrix4(j["rho"], "initial.rho");
            } else if (j.contains("bloch_a") || j.contains("bloch_b")) {
                if (!(j.contains("bloch_a") && j.contains("bloch_b")))
                    throw config_error("config keys 'initial.bloch_a' and 'initial.bloch_b' must "
                                       "be given together");
                sc.initial.bloch_a = cfg::triple(j["bloch_a"], "initial.bloch_a");
                sc.initial.bloch_b = cfg::triple(j["bloch_b"], "initial.bloch_b");
            }
        }
        sc.integrator = cfg::integrator(root, sc.integrator);
        out.params = sc;
    } else {
        throw config_error("unknown scenario '" + out.scenario + "'");
    }
    return out;
}

inline ScenarioConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file " + path.string());
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(root);
}

/// Fully resolved configuration (all defaults filled in), suitable for
/// archival next to the data it produced.
inline nlohmann::json resolved_json(const ScenarioConfig& c) {
    using nlohmann::json;
    json out;
    out["scenario"] = c.scenario;
    out["out_dir"] = c.out_dir.string();
    out["emit_svg"] = c.emit_svg;

    const auto put_integrator = [&](const IntegratorConfig& ic) {
        out["integrator"] = {{"rel_tol", ic.rel_tol},
                             {"abs_tol", ic.abs_tol},
                             {"max_step", ic.max_step},
                             {"t_end", ic.t_end},
                             {"sample_interval", ic.sample_interval}};
        if (std::isinf(ic.max_step)) out["integrator"]["max_step"] = "unbounded";
    };
    const auto put_pair_initial = [&](const PairInitial& ini) {
        if (ini.rho) {
            json m = json::array();
            for (int r = 0; r < 4; ++r) {
                json row = json::array();
                for (int cc = 0; cc < 4; ++cc)
                    row.push_back({(*ini.rho)(r, cc).real(), (*ini.rho)(r, cc).imag()});
                m.push_back(row);
            }
            out["initial"]["rho"] = m;
        } else {
            if (ini.bloch_a) out["initial"]["bloch_a"] = *ini.bloch_a;
            if (ini.bloch_b) out["initial"]["bloch_b"] = *ini.bloch_b;
        }
    };

    if (const auto* p = std::get_if<SurfacesConfig>(&c.params)) {
        out["grid"] = {{"step", p->step}};
    } else if (std::get_if<CmaxConfig>(&c.params)) {
        // no parameters
    } else if (const auto* p = std::get_if<TwoAtomsConfig>(&c.params)) {
        out["model"] = {{"gamma0", p->model.gamma0}, {"g", p->model.g}, {"omega0", p->model.omega0}};
        put_pair_initial(p->initial);
        put_integrator(p->integrator);
    } else if (const auto* p = std::get_if<JcMarkovConfig>(&c.params)) {
        out["model"] = {{"gamma0", p->gamma0}, {"omega0", p->omega0}, {"t_env", p->t_env}};
        out["initial"] = {{"temperatures", p->start_temperatures},
                          {"angle_deg", p->start_angle_deg}};
        put_integrator(p->integrator);
    } else if (const auto* p = std::get_if<IsothermalConfig>(&c.params)) {
        out["model"] = {{"gamma0", p->gamma0}, {"omega0", p->omega0}, {"t_env", p->t_env}};
        out["initial"] = {{"angles_deg", p->start_angles_deg}};
        put_integrator(p->integrator);
    } else if (const auto* p = std::get_if<ClosedPairConfig>(&c.params)) {
        out["model"] = {{"g_c", p->model.g_c}, {"eps_a", p->model.eps_a}, {"eps_b", p->model.eps_b}};
        if (p->initial.rho || p->initial.bloch_a)
            put_pair_initial(p->initial);
        else
            out["initial"] = {{"seed", p->seed}};
        put_integrator(p->integrator);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenario computations
// ---------------------------------------------------------------------------

struct SurfaceRow {
    double b, b_par;
    TempClass cls;
    double kt_over_eps;  // meaningful for finite and pure-zero rows
    double c_over_kb;
};

struct SurfacesResult {
    std::vector<SurfaceRow> rows;
};

inline SurfacesResult run_surfaces(const SurfacesConfig& cfg) {
    const FieldVector zhat{0.0, 0.0, 1.0};
    SurfacesResult out;
    const int n = static_cast<int>(std::llround(1.0 / cfg.step));
    for (int i = 0; i <= n; ++i) {
        const double b = std::min(i * cfg.step, 1.0);
        for (int j = -i; j <= i; ++j) {
            const double bpar = j * cfg.step >= b ? b : (j * cfg.step <= -b ? -b : j * cfg.step);
            const double perp = std::sqrt(std::max(b * b - bpar * bpar, 0.0));
            const QubitThermoState s{BlochVector(perp, 0.0, bpar), zhat};
            const Temperature t = temperature(s);
            out.rows.push_back({b, bpar, t.tag, t.value, heat_capacity(s)});
        }
    }
    return out;
}

using CmaxResult = HeatCapacityMax;

inline CmaxResult run_cmax(const CmaxConfig&) { return find_heat_capacity_max(); }

namespace detail {

inline Mat2 qubit_density_in_field_frame(const std::array<double, 3>& triple,
                                         const FieldVector& field) {
    return density_from_bloch(bloch_in_field_frame(triple[0], triple[1], triple[2], field));
}

/// Thermal-family start at dimensionless temperature t (= k_B T / eps) tilted
/// by theta from the field axis: atanh(B) cos(theta) = 1/t.
inline Mat2 tilted_start(double t, double theta_deg, const FieldVector& field) {
    const double theta = theta_deg * M_PI / 180.0;
    if (!(t != 0.0)) throw config_error("start temperature must be nonzero");
    const double b = std::tanh(1.0 / (t * std::cos(theta)));
    return density_from_bloch(
        bloch_in_field_frame(std::abs(b) * std::sin(theta), 0.0, b * std::cos(theta), field));
}

}  // namespace detail

struct TwoAtomsResult {
    LedgerSeries atom_a, atom_b;
    double eps = 1.0;
};

inline TwoAtomsResult run_two_atoms(const TwoAtomsConfig& cfg) {
    cfg.model.validate();
    const FieldVector v = cfg.model.thermo_field();
    Mat4 rho0;
    if (cfg.initial.rho) {
        rho0 = *cfg.initial.rho;
    } else {
        if (!cfg.initial.bloch_a || !cfg.initial.bloch_b)
            throw config_error("two-atoms: initial state needs bloch_a and bloch_b (or rho)");
        rho0 = kron(detail::qubit_density_in_field_frame(*cfg.initial.bloch_a, v),
                    detail::qubit_density_in_field_frame(*cfg.initial.bloch_b, v));
    }
    const auto traj = integrate(cfg.model, rho0, cfg.integrator);
    TwoAtomsResult out;
    out.eps = v.epsilon();
    // zero-temperature environment: boundary/total channels are unavailable
    out.atom_a = accumulate(reduced_thermo_view(traj, Subsystem::A, v), EnvironmentSpec::unspecified());
    out.atom_b = accumulate(reduced_thermo_view(traj, Subsystem::B, v), EnvironmentSpec::unspecified());
    return out;
}

struct RelaxationRun {
    double label;  // start temperature (jc-markov) or start angle (isothermal)
    LedgerSeries series;
};

struct RelaxationResult {
    std::vector<RelaxationRun> runs;
    double eps = 1.0;
};

inline RelaxationResult run_jc_markov(const JcMarkovConfig& cfg) {
    const SingleQubitThermal model = cfg.model();
    model.validate();
    const FieldVector v = model.thermo_field();
    RelaxationResult out;
    out.eps = cfg.eps();
    for (double t0 : cfg.start_temperatures) {
        const Mat2 rho0 = detail::tilted_start(t0, cfg.start_angle_deg, v);
        const auto traj = integrate(model, rho0, cfg.integrator);
        out.runs.push_back({t0, accumulate(traj, EnvironmentSpec::at(model.t_env, v))});
    }
    return out;
}

inline RelaxationResult run_isothermal(const IsothermalConfig& cfg) {
    const SingleQubitThermal model = cfg.model();
    model.validate();
    const FieldVector v = model.thermo_field();
    RelaxationResult out;
    out.eps = cfg.eps();
    for (double angle : cfg.start_angles_deg) {
        const Mat2 rho0 = detail::tilted_start(cfg.t_env, angle, v);
        const auto traj = integrate(model, rho0, cfg.integrator);
        out.runs.push_back({angle, accumulate(traj, EnvironmentSpec::at(model.t_env, v))});
    }
    return out;
}

struct ClosedPairResult {
    PairBalanceReport report;
    BlochVector bloch_a0, bloch_b0;
};

inline ClosedPairResult run_closed_pair(const ClosedPairConfig& cfg) {
    cfg.model.validate();
    Mat4 rho0;
    ClosedPairResult out;
    if (cfg.initial.rho) {
        rho0 = *cfg.initial.rho;
        out.bloch_a0 = bloch_from_density(partial_trace(rho0, Subsystem::A));
        out.bloch_b0 = bloch_from_density(partial_trace(rho0, Subsystem::B));
    } else if (cfg.initial.bloch_a && cfg.initial.bloch_b) {
        out.bloch_a0 = BlochVector((*cfg.initial.bloch_a)[0], (*cfg.initial.bloch_a)[1],
                                   (*cfg.initial.bloch_a)[2]);
        out.bloch_b0 = BlochVector((*cfg.initial.bloch_b)[0], (*cfg.initial.bloch_b)[1],
                                   (*cfg.initial.bloch_b)[2]);
        rho0 = kron(density_from_bloch(out.bloch_a0), density_from_bloch(out.bloch_b0));
    } else {
        // seeded random product state with moduli kept away from the edges
        std::mt19937_64 rng(cfg.seed);
        const auto draw = [&rng]() {
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            std::uniform_real_distribution<double> ur(0.15, 0.9);
            double x, y, z, n;
            do {
                x = u(rng);
                y = u(rng);
                z = u(rng);
                n = std::sqrt(x * x + y * y + z * z);
            } while (n > 1.0 || n < 1e-3);
            const double r = ur(rng);
            return BlochVector(r * x / n, r * y / n, r * z / n);
        };
        out.bloch_a0 = draw();
        out.bloch_b0 = draw();
        rho0 = kron(density_from_bloch(out.bloch_a0), density_from_bloch(out.bloch_b0));
    }
    const auto traj = integrate(cfg.model, rho0, cfg.integrator);
    out.report = pair_entropy_balance(traj, cfg.model.field_a(), cfg.model.field_b());
    return out;
}

// ---------------------------------------------------------------------------
// Artifact emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string comment_line(const ScenarioConfig& c) {
    return "resolved_config: " + resolved_json(c).dump();
}

inline void write_resolved_config(const ScenarioConfig& c) {
    std::ofstream f(c.out_dir / "resolved_config.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write resolved_config.json");
    f << resolved_json(c).dump(2) << "\n";
}

inline void svg_warn(bool ok, const std::filesystem::path& p) {
    if (!ok) std::fprintf(stderr, "warning: failed to write %s\n", p.string().c_str());
}

}  // namespace detail

inline void write_surfaces(const ScenarioConfig& c, const SurfacesResult& r) {
    CsvFile csv(c.out_dir / "surfaces.csv", detail::comment_line(c),
                {"B", "B_par", "temp_class", "kT_over_eps", "C_over_kB"});
    for (const auto& row : r.rows) {
        const bool printable = row.cls != TempClass::undefined_infinite;
        csv.row({CsvFile::num(row.b), CsvFile::num(row.b_par), to_string(row.cls),
                 printable ? CsvFile::num(row.kt_over_eps) : "", CsvFile::num(row.c_over_kb)});
    }
    if (c.emit_svg) {
        // constant-B slices as curve families
        std::vector<SvgSeries> temp_series, cap_series;
        for (double b_slice : {0.2, 0.4, 0.6, 0.8, 0.95}) {
            SvgSeries st{"B = " + detail::svg_num(b_slice), {}, {}};
            SvgSeries sc_{"B = " + detail::svg_num(b_slice), {}, {}};
            for (const auto& row : r.rows) {
                if (std::abs(row.b - b_slice) > 1e-9) continue;
                if (row.cls == TempClass::finite && std::abs(row.kt_over_eps) < 8.0) {
                    st.x.push_back(row.b_par);
                    st.y.push_back(row.kt_over_eps);
                }
                sc_.x.push_back(row.b_par);
                sc_.y.push_back(row.c_over_kb);
            }
            temp_series.push_back(std::move(st));
            cap_series.push_back(std::move(sc_));
        }
        detail::svg_warn(write_line_chart(c.out_dir / "surfaces_temperature.svg",
                                          "Temperature over the state space", "B_par",
                                          "k_B T / eps", temp_series),
                         c.out_dir / "surfaces_temperature.svg");
        detail::svg_warn(write_line_chart(c.out_dir / "surfaces_heat_capacity.svg",
                                          "Heat capacity over the state space", "B_par",
                                          "C / k_B", cap_series),
                         c.out_dir / "surfaces_heat_capacity.svg");
    }
}

inline void write_cmax(const ScenarioConfig& c, const CmaxResult& r) {
    CsvFile csv(c.out_dir / "cmax.csv", detail::comment_line(c), {"C_max_over_kB", "B", "B_par"});
    csv.row({CsvFile::num(r.c_max), CsvFile::num(r.b), CsvFile::num(r.b_par)});
}

inline void write_two_atoms(const ScenarioConfig& c, const TwoAtomsResult& r, double gamma0) {
    CsvFile csv(c.out_dir / "two-atoms.csv", detail::comment_line(c),
                {"t_gamma0", "kT_a_over_eps", "kT_b_over_eps", "E_a_over_eps", "E_b_over_eps",
                 "sgen_int_a", "sgen_int_b", "sgen_int_sum"});
    const auto& a = r.atom_a.records;
    const auto& b = r.atom_b.records;
    for (std::size_t i = 0; i < a.size(); ++i) {
        csv.row({CsvFile::num(a[i].t * gamma0), CsvFile::num(a[i].temp.value / r.eps),
                 CsvFile::num(b[i].temp.value / r.eps), CsvFile::num(a[i].energy / r.eps),
                 CsvFile::num(b[i].energy / r.eps), CsvFile::num(a[i].sgen_int_cum),
                 CsvFile::num(b[i].sgen_int_cum),
                 CsvFile::num(a[i].sgen_int_cum + b[i].sgen_int_cum)});
    }
    if (c.emit_svg) {
        const auto grab = [&](const LedgerSeries& s, auto f) {
            SvgSeries out;
            for (const auto& rec : s.records) {
                out.x.push_back(rec.t * gamma0);
                out.y.push_back(f(rec));
            }
            return out;
        };
        auto ta = grab(r.atom_a, [&](const LedgerRecord& x) { return x.temp.value / r.eps; });
        auto tb = grab(r.atom_b, [&](const LedgerRecord& x) { return x.temp.value / r.eps; });
        ta.name = "atom a";
        tb.name = "atom b";
        detail::svg_warn(write_line_chart(c.out_dir / "two-atoms_temperature.svg",
                                          "Atom temperatures", "gamma0 t", "k_B T / eps", {ta, tb}),
                         c.out_dir / "two-atoms_temperature.svg");
        auto ea = grab(r.atom_a, [&](const LedgerRecord& x) { return x.energy / r.eps; });
        auto eb = grab(r.atom_b, [&](const LedgerRecord& x) { return x.energy / r.eps; });
        ea.name = "atom a";
        eb.name = "atom b";
        detail::svg_warn(write_line_chart(c.out_dir / "two-atoms_energy.svg",
                                          "Atom internal energies", "gamma0 t", "E / eps", {ea, eb}),
                         c.out_dir / "two-atoms_energy.svg");
        auto sa = grab(r.atom_a, [](const LedgerRecord& x) { return x.sgen_int_cum; });
        auto sb = grab(r.atom_b, [](const LedgerRecord& x) { return x.sgen_int_cum; });
        SvgSeries sum;
        for (std::size_t i = 0; i < sa.x.size(); ++i) {
            sum.x.push_back(sa.x[i]);
            sum.y.push_back(sa.y[i] + sb.y[i]);
        }
        sa.name = "atom a";
        sb.name = "atom b";
        sum.name = "sum";
        detail::svg_warn(write_line_chart(c.out_dir / "two-atoms_entropy.svg",
                                          "Internal entropy production", "gamma0 t", "S_gen / k_B",
                                          {sa, sb, sum}),
                         c.out_dir / "two-atoms_entropy.svg");
    }
}

inline void write_relaxation(const ScenarioConfig& c, const RelaxationResult& r,
                             const std::string& stem, const std::string& label_column,
                             double gamma0, bool bloch_columns) {
    std::vector<std::string> cols{label_column, "t_gamma0",      "kT_over_eps", "E_over_eps",
                                  "sgen_int",   "sgen_ht",       "sgen_tot",    "sgen_tot_relent"};
    if (bloch_columns) {
        cols.insert(cols.begin() + 4, "b_perp");
        cols.insert(cols.begin() + 4, "b_par");
    }
    CsvFile csv(c.out_dir / (stem + ".csv"), detail::comment_line(c), cols);
    for (const auto& run : r.runs) {
        for (const auto& rec : run.series.records) {
            std::vector<std::string> cells{CsvFile::num(run.label), CsvFile::num(rec.t * gamma0),
                                           CsvFile::num(rec.temp.value / r.eps),
                                           CsvFile::num(rec.energy / r.eps)};
            if (bloch_columns) {
                cells.push_back(CsvFile::num(-rec.energy / r.eps));  // B_par = -E/eps
                cells.push_back(CsvFile::num(rec.coherence));
            }
            cells.push_back(CsvFile::num(rec.sgen_int_cum));
            cells.push_back(CsvFile::num(rec.sgen_ht_cum));
            cells.push_back(CsvFile::num(rec.sgen_tot_cum));
            cells.push_back(CsvFile::num(rec.sgen_tot_relative));
            csv.row(cells);
        }
    }
    if (!c.emit_svg) return;

    const auto panel = [&](const std::string& suffix, const std::string& title,
                           const std::string& ylabel, auto getter) {
        std::vector<SvgSeries> series;
        for (const auto& run : r.runs) {
            SvgSeries s;
            s.name = label_column + " = " + detail::svg_num(run.label);
            for (const auto& rec : run.series.records) {
                s.x.push_back(rec.t * gamma0);
                s.y.push_back(getter(rec));
            }
            series.push_back(std::move(s));
        }
        const auto p = c.out_dir / (stem + "_" + suffix + ".svg");
        detail::svg_warn(write_line_chart(p, title, "gamma0 t", ylabel, series), p);
    };
    panel("temperature", "Qubit temperature", "k_B T / eps",
          [&](const LedgerRecord& x) { return x.temp.value / r.eps; });
    panel("energy", "Internal energy", "E / eps",
          [&](const LedgerRecord& x) { return x.energy / r.eps; });
    panel("sgen_int", "Internal entropy production", "S_gen^int / k_B",
          [](const LedgerRecord& x) { return x.sgen_int_cum; });
    panel("sgen_ht", "Boundary entropy production", "S_gen^ht / k_B",
          [](const LedgerRecord& x) { return x.sgen_ht_cum; });
    panel("sgen_tot", "Total entropy production", "S_gen^tot / k_B",
          [](const LedgerRecord& x) { return x.sgen_tot_cum; });

    if (bloch_columns) {
        // projection of the trajectories onto the (B_par, B_perp) half-plane
        std::vector<SvgSeries> proj;
        for (const auto& run : r.runs) {
            SvgSeries s;
            s.name = label_column + " = " + detail::svg_num(run.label);
            for (const auto& rec : run.series.records) {
                s.x.push_back(-rec.energy / r.eps);
                s.y.push_back(rec.coherence);
            }
            proj.push_back(std::move(s));
        }
        const auto p = c.out_dir / (stem + "_bloch.svg");
        detail::svg_warn(write_line_chart(p, "Trajectories in the (B_par, B_perp) plane", "B_par",
                                          "B_perp", proj),
                         p);
    }
}

inline void write_closed_pair(const ScenarioConfig& c, const ClosedPairResult& r) {
    CsvFile csv(c.out_dir / "closed-pair.csv", detail::comment_line(c),
                {"t", "sgen_int_a", "sgen_int_b", "sgen_ht", "lhs", "delta_mi", "residual"});
    for (const auto& rec : r.report.records)
        csv.row({CsvFile::num(rec.t), CsvFile::num(rec.sint_a), CsvFile::num(rec.sint_b),
                 CsvFile::num(rec.sht), CsvFile::num(rec.lhs), CsvFile::num(rec.delta_mi),
                 CsvFile::num(rec.residual)});
    if (c.emit_svg) {
        SvgSeries lhs{"entropy production", {}, {}}, dmi{"mutual-information change", {}, {}};
        for (const auto& rec : r.report.records) {
            lhs.x.push_back(rec.t);
            lhs.y.push_back(rec.lhs);
            dmi.x.push_back(rec.t);
            dmi.y.push_back(rec.delta_mi);
        }
        const auto p = c.out_dir / "closed-pair_balance.svg";
        detail::svg_warn(
            write_line_chart(p, "Closed-pair entropy balance", "t", "S / k_B", {lhs, dmi}), p);
    }
}

/// Compute a scenario and write its artifacts into cfg.out_dir.
inline void run_scenario(const ScenarioConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    if (const auto* p = std::get_if<SurfacesConfig>(&cfg.params)) {
        write_surfaces(cfg, run_surfaces(*p));
    } else if (const auto* p = std::get_if<CmaxConfig>(&cfg.params)) {
        write_cmax(cfg, run_cmax(*p));
    } else if (const auto* p = std::get_if<TwoAtomsConfig>(&cfg.params)) {
        write_two_atoms(cfg, run_two_atoms(*p), p->model.gamma0);
    } else if (const auto* p = std::get_if<JcMarkovConfig>(&cfg.params)) {
        write_relaxation(cfg, run_jc_markov(*p), "jc-markov", "start_kT_over_eps", p->gamma0,
                         false);
    } else if (const auto* p = std::get_if<IsothermalConfig>(&cfg.params)) {
        write_relaxation(cfg, run_isothermal(*p), "isothermal", "theta_deg", p->gamma0, true);
    } else if (const auto* p = std::get_if<ClosedPairConfig>(&cfg.params)) {
        write_closed_pair(cfg, run_closed_pair(*p));
    }
    detail::write_resolved_config(cfg);
}

}  // namespace blochtherm
