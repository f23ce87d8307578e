#pragma once

// Config-driven scenarios and their JSON reports.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "volterra/errors.hpp"
#include "volterra/fresnel.hpp"
#include "volterra/kernels.hpp"
#include "volterra/oracle.hpp"
#include "volterra/picard.hpp"
#include "volterra/random.hpp"
#include "volterra/schrodinger.hpp"

namespace volterra {

using Json = nlohmann::ordered_json;

/// Invalid or unreadable configuration. The message names the field.
class ConfigError : public InvalidParameter {
public:
    explicit ConfigError(const std::string& what) : InvalidParameter(what) {}
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void dump_json(const Json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += inner + Json(it.key()).dump() + ": ";
            dump_json(it.value(), out, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[";
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += ", ";
            first = false;
            dump_json(v, out, indent + 1);
        }
        out += "]";
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? format_double(v) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

} // namespace detail

/// JSON text with every float written to 17 significant digits and
/// non-finite values as null.
inline std::string dump_report(const Json& j) {
    std::string out;
    detail::dump_json(j, out, 0);
    out += "\n";
    return out;
}

inline Json doubles_to_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

struct SpatialConfig {
    double x_min = -20.0;
    double x_max = 20.0;
    std::size_t n_points = 512;
};

struct RunConfig {
    std::string scenario;
    double T = 1.0;
    std::size_t n_steps = 512;
    LpExponent p = LpExponent::infinity();
    double tol = 1e-10;
    std::size_t max_terms = 200;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    bool parallel = false;

    // resolvent
    Complex lambda{1.0};
    // hilbert_schmidt
    std::size_t dim = 8;
    double D = 5.0;
    double cell_width = 0.125;
    // Schrodinger scenarios
    SpatialConfig spatial;
    PhysicalParams physics;
    double sigma = 1.0;
    double x0 = 0.0;
    double k0 = 0.0;
    double V0 = 0.3;
    double amplitude = 0.5;
    bool snapshots = true;
    // fresnel
    int fresnel_n = 1;
    std::size_t schedule_length = 13;
    // poisson_sweep
    std::vector<double> t_list{0.1, 0.05, 0.025, 1e-3};
};

inline const std::vector<std::string>& known_scenarios() {
    static const std::vector<std::string> names{"resolvent",        "hilbert_schmidt", "dyson_constant",
                                                "dyson_lorentzian", "fresnel",         "poisson_sweep"};
    return names;
}

namespace detail {

inline double number_field(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string("field '") + key + "': expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(std::string("field '") + key + "': must be finite");
    return d;
}

inline std::size_t count_field(const Json& j, const char* key, std::size_t fallback, std::size_t min_value) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value))
        throw ConfigError(std::string("field '") + key + "': expected an integer >= " + std::to_string(min_value));
    return static_cast<std::size_t>(v.get<long long>());
}

inline void require(bool ok, const char* key, const std::string& why) {
    if (!ok) throw ConfigError(std::string("field '") + key + "': " + why);
}

} // namespace detail

inline RunConfig parse_config(const Json& j) {
    using detail::count_field;
    using detail::number_field;
    using detail::require;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    require(j.contains("scenario") && j.at("scenario").is_string(), "scenario", "missing or not a string");
    c.scenario = j.at("scenario").get<std::string>();
    bool known = false;
    for (const auto& s : known_scenarios()) known = known || s == c.scenario;
    require(known, "scenario", "unknown scenario '" + c.scenario + "'");

    c.T = number_field(j, "T", c.T);
    require(c.T > 0.0, "T", "must be positive");
    c.n_steps = count_field(j, "n_steps", c.n_steps, 1);
    if (j.contains("p")) {
        const auto& p = j.at("p");
        if (p.is_string()) {
            require(p.get<std::string>() == "inf", "p", "expected a number >= 1 or \"inf\"");
        } else {
            require(p.is_number() && p.get<double>() >= 1.0 && std::isfinite(p.get<double>()), "p", "expected a number >= 1 or \"inf\"");
            c.p = LpExponent(p.get<double>());
        }
    }
    c.tol = number_field(j, "tol", c.tol);
    require(c.tol > 0.0, "tol", "must be positive");
    c.max_terms = count_field(j, "max_terms", c.max_terms, 1);
    c.seed = count_field(j, "seed", c.seed, 0);
    if (j.contains("output_dir")) {
        require(j.at("output_dir").is_string(), "output_dir", "expected a string");
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("parallel")) {
        require(j.at("parallel").is_boolean(), "parallel", "expected true or false");
        c.parallel = j.at("parallel").get<bool>();
    }
    if (j.contains("lambda")) {
        const auto& l = j.at("lambda");
        if (l.is_number()) {
            c.lambda = l.get<double>();
        } else {
            require(l.is_array() && l.size() == 2 && l[0].is_number() && l[1].is_number(), "lambda",
                    "expected a number or [re, im]");
            c.lambda = Complex(l[0].get<double>(), l[1].get<double>());
        }
    }
    c.dim = count_field(j, "dim", c.dim, 1);
    c.D = number_field(j, "D", c.D);
    require(c.D > 0.0, "D", "must be positive");
    c.cell_width = number_field(j, "cell_width", c.cell_width);
    require(c.cell_width > 0.0, "cell_width", "must be positive");
    if (j.contains("spatial")) {
        const auto& s = j.at("spatial");
        require(s.is_object(), "spatial", "expected an object with x_min, x_max, n_points");
        c.spatial.x_min = number_field(s, "x_min", c.spatial.x_min);
        c.spatial.x_max = number_field(s, "x_max", c.spatial.x_max);
        c.spatial.n_points = count_field(s, "n_points", c.spatial.n_points, 8);
        require(c.spatial.x_max > c.spatial.x_min, "spatial.x_max", "must exceed x_min");
        const auto n = c.spatial.n_points;
        require((n & (n - 1)) == 0, "spatial.n_points", "must be a power of two");
    }
    c.physics.hbar = number_field(j, "hbar", c.physics.hbar);
    c.physics.mass = number_field(j, "mass", c.physics.mass);
    require(c.physics.hbar > 0.0, "hbar", "must be positive");
    require(c.physics.mass > 0.0, "mass", "must be positive");
    c.sigma = number_field(j, "sigma", c.sigma);
    require(c.sigma > 0.0, "sigma", "must be positive");
    c.x0 = number_field(j, "x0", c.x0);
    c.k0 = number_field(j, "k0", c.k0);
    c.V0 = number_field(j, "V0", c.V0);
    c.amplitude = number_field(j, "amplitude", c.amplitude);
    if (j.contains("snapshots")) {
        require(j.at("snapshots").is_boolean(), "snapshots", "expected true or false");
        c.snapshots = j.at("snapshots").get<bool>();
    }
    c.fresnel_n = static_cast<int>(count_field(j, "n", 1, 1));
    c.schedule_length = count_field(j, "schedule_length", c.schedule_length, 1);
    if (j.contains("t_list")) {
        const auto& t = j.at("t_list");
        require(t.is_array() && !t.empty(), "t_list", "expected a nonempty array of times");
        c.t_list.clear();
        for (const auto& v : t) {
            require(v.is_number(), "t_list", "entries must be numbers");
            c.t_list.push_back(v.get<double>());
        }
        for (std::size_t k = 0; k < c.t_list.size(); ++k) {
            require(c.t_list[k] > 0.0, "t_list", "entries must be positive");
            require(k == 0 || c.t_list[k] < c.t_list[k - 1], "t_list", "entries must be strictly decreasing");
        }
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

/// A CSV file produced by a run: name relative to the output directory.
struct CsvFile {
    std::string name;
    std::string content;
};

struct RunResult {
    Json report;  ///< without wall_time
    bool converged = true;
    std::vector<CsvFile> csv;
};

namespace detail {

inline Json neumann_fields(const NeumannReport& r) {
    Json j;
    j["p"] = to_string(r.p);
    j["D"] = r.D;
    j["base_norm"] = r.base_norm;
    j["converged"] = r.converged;
    j["terms_used"] = r.terms_used;
    j["term_norms"] = doubles_to_json(r.term_norms);
    j["majorants"] = doubles_to_json(r.majorants);
    j["quad_slack"] = doubles_to_json(r.quad_slack);
    j["ratios"] = doubles_to_json(r.ratios);
    j["majorants_hold"] = r.majorants_hold();
    j["certified_tail"] = r.certified_tail;
    j["residual"] = r.residual;
    return j;
}

inline Json empty_neumann_fields(const RunConfig& c) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Json j;
    j["p"] = to_string(c.p);
    j["D"] = nan;
    j["base_norm"] = nan;
    j["converged"] = true;
    j["terms_used"] = 0;
    j["term_norms"] = Json::array();
    j["majorants"] = Json::array();
    j["quad_slack"] = Json::array();
    j["ratios"] = Json::array();
    j["majorants_hold"] = true;
    j["certified_tail"] = nan;
    j["residual"] = nan;
    return j;
}

inline Json assemble(const RunConfig& c, Json neumann, double oracle_gap, Json details) {
    Json j;
    j["scenario"] = c.scenario;
    j["seed"] = c.seed;
    j["T"] = c.T;
    j["n_steps"] = c.n_steps;
    j["tol"] = c.tol;
    j["max_terms"] = c.max_terms;
    for (auto it = neumann.begin(); it != neumann.end(); ++it) j[it.key()] = it.value();
    j["oracle_gap"] = oracle_gap;
    j["details"] = std::move(details);
    return j;
}

inline SolveSettings settings_of(const RunConfig& c) {
    SolveSettings s;
    s.p = c.p;
    s.tol = c.tol;
    s.max_terms = c.max_terms;
    s.parallel = c.parallel;
    return s;
}

/// sup over nodes of the grid-L2 distance.
inline double trajectory_gap(const Trajectory& a, const Trajectory& b) { return sup_distance(a, b); }

inline std::string wave_csv(const SpatialGrid& g, std::span<const Complex> u) {
    std::string out = "x,re,im,abs2\n";
    for (std::size_t j = 0; j < u.size(); ++j)
        out += format_double(g.x(j)) + "," + format_double(u[j].real()) + "," + format_double(u[j].imag()) + "," +
               format_double(std::norm(u[j])) + "\n";
    return out;
}

inline RunResult run_resolvent(const RunConfig& c) {
    const TimeGrid grid(c.T, c.n_steps);
    const KernelSpec k = scalar_constant_kernel(c.lambda, grid);
    const SpacePtr space = k.space();
    const Trajectory f = Trajectory::sample(grid, space, [&](double) { return BanachElement(space, {Complex{1.0}}); });
    const NeumannResult r = neumann_solve(k, f, settings_of(c));
    const Trajectory ref = reference_solution(ResolventExponential{c.lambda}, grid, space);
    Json details;
    details["lambda"] = Json::array({c.lambda.real(), c.lambda.imag()});
    return {assemble(c, neumann_fields(r.report), trajectory_gap(r.solution, ref), details), r.report.converged, {}};
}

/// Smooth deterministic source for the matrix scenarios: f_x(t) = a_x + b_x t
/// with random complex a, b.
inline Trajectory random_linear_source(const TimeGrid& grid, const SpacePtr& space, CounterRng rng) {
    const std::size_t d = space->dim();
    std::vector<Complex> a(d), b(d);
    for (std::size_t x = 0; x < d; ++x) {
        a[x] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        b[x] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    return Trajectory::sample(grid, space, [&](double t) {
        BanachElement v(space);
        for (std::size_t x = 0; x < d; ++x) v[x] = a[x] + b[x] * t;
        return v;
    });
}

inline RunResult run_hilbert_schmidt(const RunConfig& c) {
    const TimeGrid grid(c.T, c.n_steps);
    const CounterRng root(c.seed);
    const KernelSpec k = random_hilbert_schmidt_kernel(c.dim, c.D, grid, root.split(0), c.cell_width);
    const Trajectory f = random_linear_source(grid, k.space(), root.split(1));
    const NeumannResult r = neumann_solve(k, f, settings_of(c));
    const Trajectory ref = collocation_solve(k, f);
    Json details;
    details["dim"] = c.dim;
    details["cell_width"] = c.cell_width;
    details["collocation_residual"] = residual(k, ref, f, c.parallel);
    return {assemble(c, neumann_fields(r.report), trajectory_gap(r.solution, ref), details), r.report.converged, {}};
}

struct DysonSetup {
    PropagatorPtr prop;
    TimeGrid grid;
    WaveState initial;
    KernelSpec kernel;
    Trajectory source;
};

inline DysonSetup dyson_setup(const RunConfig& c, const PotentialSpec& v) {
    auto prop = make_propagator(SpatialGrid(c.spatial.x_min, c.spatial.x_max, c.spatial.n_points), c.physics);
    const TimeGrid grid(c.T, c.n_steps);
    WaveState initial = gaussian_packet(prop, c.sigma, c.x0, c.k0);
    KernelSpec k = build_dyson_kernel(v, prop, grid);
    Trajectory f = free_trajectory(initial, grid);
    return {prop, grid, std::move(initial), std::move(k), std::move(f)};
}

inline RunResult run_dyson(const RunConfig& c, bool constant) {
    const PotentialSpec v = constant ? PotentialSpec::constant(c.V0) : PotentialSpec::lorentzian(c.amplitude);
    const DysonSetup s = dyson_setup(c, v);
    const NeumannResult r = neumann_solve(s.kernel, s.source, settings_of(c));
    Trajectory ref = constant ? reference_solution(ConstantPotentialPhase{c.V0, s.prop, {s.initial.values().begin(), s.initial.values().end()}},
                                                   s.grid, s.kernel.space())
                              : collocation_solve(s.kernel, s.source);
    const SourceBoundCheck bound = potential_source_bound(r.solution, s.source, v, s.prop);
    Json details;
    details["potential"] = v.id();
    details["potential_sup"] = v.sup_bound();
    details["grid_points"] = c.spatial.n_points;
    details["final_gap"] = norm(axpy(Complex{-1.0}, r.solution, ref)[s.grid.n_steps()]);
    details["source_bound_holds"] = bound.holds;
    details["source_bound_lhs"] = doubles_to_json(bound.lhs);
    details["source_bound_rhs"] = doubles_to_json(bound.rhs);
    RunResult out{assemble(c, neumann_fields(r.report), trajectory_gap(r.solution, ref), details), r.report.converged, {}};
    if (c.snapshots) {
        out.csv.push_back({"snapshot_initial.csv", wave_csv(s.prop->grid(), r.solution[0].coords())});
        out.csv.push_back({"snapshot_final.csv", wave_csv(s.prop->grid(), r.solution[s.grid.n_steps()].coords())});
    }
    return out;
}

inline std::string fresnel_csv(int n, const AbelSchedule& sched, const AbelLimit& lim) {
    std::string out = "alpha,re,im,abs_error\n";
    for (std::size_t k = 0; k < sched.size(); ++k) {
        const Complex v = lim.samples[k];
        out += format_double(sched.alphas()[k]) + "," + format_double(v.real()) + "," + format_double(v.imag()) + "," +
               format_double(std::abs(v - fresnel_closed(n, sched.alphas()[k]))) + "\n";
    }
    out += "0," + format_double(lim.value.real()) + "," + format_double(lim.value.imag()) + "," +
           format_double(std::abs(lim.value - fresnel_closed(n, 0.0))) + "\n";
    return out;
}

} // namespace detail

/// n-dimensional Abel-regularized Fresnel integral by the product of
/// one-dimensional quadratures, extrapolated to alpha = 0.
inline AbelLimit fresnel_extrapolation(int n, const AbelSchedule& sched) {
    return abel_limit([n](double a) { return std::pow(fresnel_quadrature_auto(a), n); }, sched);
}

inline std::string fresnel_table(int n, std::size_t schedule_length) {
    const AbelSchedule sched = AbelSchedule::geometric(schedule_length);
    return detail::fresnel_csv(n, sched, fresnel_extrapolation(n, sched));
}

/// Initial-condition sweep for the Gaussian on a spatial grid.
inline std::vector<double> gaussian_sweep(const RunConfig& c) {
    auto prop = make_propagator(SpatialGrid(c.spatial.x_min, c.spatial.x_max, c.spatial.n_points), c.physics);
    return initial_condition_sweep(gaussian_packet(prop, c.sigma, c.x0, c.k0), c.t_list);
}

inline std::string sweep_table(const std::vector<double>& times, const std::vector<double>& errors) {
    std::string out = "t,sup_error\n";
    for (std::size_t k = 0; k < times.size(); ++k) out += format_double(times[k]) + "," + format_double(errors[k]) + "\n";
    return out;
}

/// Runs one scenario. Throws ConfigError for invalid settings.
inline RunResult run_scenario(const RunConfig& c) {
    try {
        if (c.scenario == "resolvent") return detail::run_resolvent(c);
        if (c.scenario == "hilbert_schmidt") return detail::run_hilbert_schmidt(c);
        if (c.scenario == "dyson_constant") return detail::run_dyson(c, true);
        if (c.scenario == "dyson_lorentzian") return detail::run_dyson(c, false);
        if (c.scenario == "fresnel") {
            const AbelSchedule sched = AbelSchedule::geometric(c.schedule_length);
            const AbelLimit lim = fresnel_extrapolation(c.fresnel_n, sched);
            Json details;
            details["n"] = c.fresnel_n;
            details["schedule_length"] = c.schedule_length;
            details["limit"] = Json::array({lim.value.real(), lim.value.imag()});
            details["error_estimate"] = lim.error_estimate;
            const double gap = std::abs(lim.value - fresnel_closed(c.fresnel_n, 0.0));
            return {detail::assemble(c, detail::empty_neumann_fields(c), gap, details), true,
                    {{"fresnel.csv", detail::fresnel_csv(c.fresnel_n, sched, lim)}}};
        }
        if (c.scenario == "poisson_sweep") {
            const auto errors = gaussian_sweep(c);
            bool decreasing = true;
            for (std::size_t k = 1; k < errors.size(); ++k) decreasing = decreasing && errors[k] < errors[k - 1];
            Json details;
            details["t_list"] = doubles_to_json(c.t_list);
            details["sup_errors"] = doubles_to_json(errors);
            details["strictly_decreasing"] = decreasing;
            return {detail::assemble(c, detail::empty_neumann_fields(c), errors.back(), details), true,
                    {{"sweep.csv", sweep_table(c.t_list, errors)}}};
        }
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("field 'scenario': unknown scenario '" + c.scenario + "'");
}

/// Exit codes of `solve`.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitUnconverged = 3 };

/// Loads a config, runs it, writes report.json (with wall_time) and CSV
/// files into output_dir. Relative output_dir resolves against the current
/// working directory.
inline int run_config_file(const std::string& path, std::optional<bool> parallel_override, std::string& message) {
    RunConfig c;
    try {
        c = load_config(path);
    } catch (const ConfigError& e) {
        message = e.what();
        return kExitConfig;
    }
    if (parallel_override) c.parallel = *parallel_override;
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    try {
        r = run_scenario(c);
    } catch (const ConfigError& e) {
        message = e.what();
        return kExitConfig;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.report["wall_time"] = wall;

    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec) {
        message = "cannot create output_dir '" + c.output_dir + "': " + ec.message();
        return kExitConfig;
    }
    const std::filesystem::path dir(c.output_dir);
    std::ofstream(dir / "report.json") << dump_report(r.report);
    for (const auto& f : r.csv) std::ofstream(dir / f.name) << f.content;
    message = "wrote " + (dir / "report.json").string();
    if (!r.converged) {
        message += " (unconverged: max_terms reached before the certified tail fell below tol)";
        return kExitUnconverged;
    }
    return kExitOk;
}

} // namespace volterra
