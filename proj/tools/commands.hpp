#pragma once

// Subcommand implementations for the polylin command-line tool. Each command
// writes its table or document to the given stream and returns an exit code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polylin/polylin.hpp"

namespace polylin::cli {

enum exit_code : int { ok = 0, bad_config = 2, numerical_failure = 3 };

inline constexpr int model_schema_version = 1;
inline const std::vector<std::size_t> sweep_segments{31, 63, 127, 255, 511};

struct RunConfig {
    std::string function = "gaussian";
    std::optional<std::pair<double, double>> interval;
    std::optional<std::size_t> segments;
    std::optional<double> tolerance;
    std::string partition = "uniform";  // uniform | optimized
    std::string fit = "interpolant";    // interpolant | l2 | l1
    std::string out;
    std::string format = "csv";  // csv | json
    std::uint64_t seed = 1;
    std::string model;
    std::size_t evals = 1000000;
    std::optional<double> quadrature_tol;
};

/// Applies POLYLIN_QUAD_TOL, when set, to the configuration.
inline void apply_environment(RunConfig& cfg) {
    if (const char* env = std::getenv("POLYLIN_QUAD_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("POLYLIN_QUAD_TOL must be a positive number");
        cfg.quadrature_tol = v;
    }
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Problem {
    FunctionSpec spec;
    TargetFunction target;
    double a = 0.0;
    double b = 1.0;
};

inline Problem make_problem(const RunConfig& cfg) {
    Problem p;
    p.spec = parse_function_spec(cfg.function);
    if (cfg.interval) {
        p.a = cfg.interval->first;
        p.b = cfg.interval->second;
    } else if (auto d = p.spec.default_interval()) {
        p.a = d->first;
        p.b = d->second;
    } else {
        throw std::invalid_argument("--interval is required for " + p.spec.name);
    }
    if (!(p.a < p.b)) throw std::invalid_argument("--interval requires a < b");
    p.target = p.spec.make(p.a, p.b);
    return p;
}

inline void check_choice(const std::string& value, std::initializer_list<const char*> allowed, const char* flag) {
    for (const char* a : allowed)
        if (value == a) return;
    throw std::invalid_argument(std::string("invalid value for ") + flag + ": " + value);
}

inline bool optimized(const RunConfig& cfg) { return cfg.partition == "optimized"; }

inline BoundKind kind_for(const RunConfig& cfg) {
    const bool l1 = cfg.fit == "l1";
    if (optimized(cfg)) return l1 ? BoundKind::optimized_best_l1 : BoundKind::optimized_interpolant;
    return l1 ? BoundKind::uniform_best_l1 : BoundKind::uniform_interpolant;
}

/// N from --segments, or the planner's answer for --tolerance. Exactly one must be set.
inline std::size_t resolve_segments(const RunConfig& cfg, const Problem& p) {
    if (cfg.segments && cfg.tolerance) throw std::invalid_argument("give either --segments or --tolerance, not both");
    if (cfg.segments) {
        if (*cfg.segments == 0) throw std::invalid_argument("--segments must be at least 1");
        return *cfg.segments;
    }
    if (cfg.tolerance) {
        if (!(*cfg.tolerance > 0.0)) throw std::invalid_argument("--tolerance must be positive");
        return min_segments_for_tolerance(p.target, p.a, p.b, *cfg.tolerance, kind_for(cfg));
    }
    throw std::invalid_argument("one of --segments or --tolerance is required");
}

inline Partition build_partition(const RunConfig& cfg, const Problem& p, std::size_t n) {
    if (!optimized(cfg)) return uniform_partition(p.a, p.b, n);
    try {
        return optimized_partition(p.target, p.a, p.b, n);
    } catch (const linear_function_error&) {
        return uniform_partition(p.a, p.b, n);
    }
}

inline FitOptions fit_options(const RunConfig& cfg) {
    FitOptions o;
    if (cfg.quadrature_tol) o.quadrature_tol = *cfg.quadrature_tol;
    return o;
}

inline DistanceTolerance distance_tolerance(const RunConfig& cfg) {
    DistanceTolerance t;
    if (cfg.quadrature_tol) t.abs_tol = *cfg.quadrature_tol;
    return t;
}

struct Fitted {
    PolygonalFunction fit;
    std::optional<FitReport> report;
};

inline Fitted run_fit(const RunConfig& cfg, const Problem& p, const Partition& part) {
    if (cfg.fit == "interpolant") return {interpolant(p.target, part), std::nullopt};
    if (cfg.fit == "l2") {
        const double qt = cfg.quadrature_tol.value_or(1e-12);
        return {l2_projection(p.target, part, qt), std::nullopt};
    }
    auto r = best_l1_fit(p.target, part, fit_options(cfg));
    if (!r.report.converged) throw numerical_error("best L1 fit did not converge");
    return {std::move(r.fit), std::move(r.report)};
}

inline nlohmann::json report_json(const FitReport& r) {
    return {{"iterations", r.iterations},
            {"final_cost", r.final_cost},
            {"smoothed_cost", r.smoothed_cost},
            {"final_gradient_norm", r.final_gradient_norm},
            {"converged", r.converged},
            {"function_evals", r.function_evals},
            {"stage_function_evals", r.stage_function_evals},
            {"stage_k", r.stage_k}};
}

inline void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.out.empty() || cfg.out == "-") {
        out << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file " + cfg.out);
    f << text;
}

// ---------------------------------------------------------------------------

inline int cmd_partition(const RunConfig& cfg, std::ostream& out) {
    const Problem p = make_problem(cfg);
    const std::size_t n = resolve_segments(cfg, p);
    const Partition part = build_partition(cfg, p, n);
    std::ostringstream s;
    if (cfg.format == "json") {
        nlohmann::json j{{"function", p.spec.text},
                         {"interval", {p.a, p.b}},
                         {"partition", cfg.partition},
                         {"segments", n},
                         {"uniform", part.is_uniform()},
                         {"knots", std::vector<double>(part.knots().begin(), part.knots().end())}};
        s << j.dump(2) << "\n";
    } else {
        s << "i,x\n";
        for (std::size_t i = 0; i <= n; ++i) s << i << "," << fmt(part.knot(i)) << "\n";
    }
    write_output(cfg, s.str(), out);
    return ok;
}

inline nlohmann::json model_json(const RunConfig& cfg, const Problem& p, const Fitted& f, double distance) {
    const auto& part = f.fit.partition();
    nlohmann::json j{{"schema_version", model_schema_version},
                     {"function", {{"spec", p.spec.text}, {"interval", {p.a, p.b}}}},
                     {"partition", cfg.partition},
                     {"fit", cfg.fit},
                     {"segments", part.segments()},
                     {"knots", std::vector<double>(part.knots().begin(), part.knots().end())},
                     {"ordinates", std::vector<double>(f.fit.ordinates().begin(), f.fit.ordinates().end())},
                     {"l1_distance", distance}};
    if (f.report) j["report"] = report_json(*f.report);
    return j;
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& out) {
    const Problem p = make_problem(cfg);
    const std::size_t n = resolve_segments(cfg, p);
    const Partition part = build_partition(cfg, p, n);
    const Fitted f = run_fit(cfg, p, part);
    const double distance = l1_distance(p.target, f.fit, distance_tolerance(cfg));
    std::ostringstream s;
    if (cfg.format == "csv") {
        s << "i,x,v\n";
        for (std::size_t i = 0; i <= n; ++i)
            s << i << "," << fmt(part.knot(i)) << "," << fmt(f.fit.ordinate(i)) << "\n";
    } else {
        s << model_json(cfg, p, f, distance).dump(2) << "\n";
    }
    write_output(cfg, s.str(), out);
    return ok;
}

struct LoadedModel {
    RunConfig cfg;
    PolygonalFunction fit;
    double stored_distance;
};

inline LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("model file is not valid JSON: " + std::string(e.what()));
    }
    try {
        if (j.at("schema_version").get<int>() != model_schema_version)
            throw std::invalid_argument("unsupported model schema version");
        RunConfig cfg;
        cfg.function = j.at("function").at("spec").get<std::string>();
        const auto iv = j.at("function").at("interval").get<std::vector<double>>();
        if (iv.size() != 2) throw std::invalid_argument("model interval must have two entries");
        cfg.interval = std::pair{iv[0], iv[1]};
        cfg.partition = j.at("partition").get<std::string>();
        cfg.fit = j.at("fit").get<std::string>();
        Partition part(j.at("knots").get<std::vector<double>>());
        cfg.segments = part.segments();
        PolygonalFunction fit(std::move(part), j.at("ordinates").get<std::vector<double>>());
        return {cfg, std::move(fit), j.at("l1_distance").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("malformed model file: " + std::string(e.what()));
    }
}

inline int cmd_error(const RunConfig& cfg_in, std::ostream& out) {
    RunConfig cfg = cfg_in;
    std::optional<PolygonalFunction> fit;
    std::optional<double> stored;
    if (!cfg.model.empty()) {
        auto m = load_model(cfg.model);
        m.cfg.out = cfg.out;
        m.cfg.format = cfg.format;
        m.cfg.quadrature_tol = cfg.quadrature_tol;
        cfg = m.cfg;
        fit = std::move(m.fit);
        stored = m.stored_distance;
    }
    const Problem p = make_problem(cfg);
    std::size_t n = 0;
    if (!fit) {
        n = resolve_segments(cfg, p);
        fit = run_fit(cfg, p, build_partition(cfg, p, n)).fit;
    } else {
        n = fit->partition().segments();
    }
    const double measured = l1_distance(p.target, *fit, distance_tolerance(cfg));
    const auto curv = curvature_integrals(p.target, p.a, p.b);
    const BoundKind kinds[] = {BoundKind::uniform_interpolant, BoundKind::optimized_interpolant,
                               BoundKind::uniform_best_l1, BoundKind::optimized_best_l1};
    std::ostringstream s;
    if (cfg.format == "json") {
        nlohmann::json j{{"function", p.spec.text}, {"segments", n}, {"measured", measured}};
        for (auto k : kinds) j["bounds"][std::string(to_string(k))] = bound_estimate(curv, p.a, p.b, n, k).value;
        if (stored) j["stored"] = *stored;
        s << j.dump(2) << "\n";
    } else {
        s << "segments,measured";
        for (auto k : kinds) s << ",bound_" << to_string(k);
        if (stored) s << ",stored";
        s << "\n" << n << "," << fmt(measured);
        for (auto k : kinds) s << "," << fmt(bound_estimate(curv, p.a, p.b, n, k).value);
        if (stored) s << "," << fmt(*stored);
        s << "\n";
    }
    write_output(cfg, s.str(), out);
    return ok;
}

inline int cmd_plan(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.tolerance) throw std::invalid_argument("plan requires --tolerance");
    if (cfg.segments) throw std::invalid_argument("plan takes --tolerance, not --segments");
    if (!(*cfg.tolerance > 0.0)) throw std::invalid_argument("--tolerance must be positive");
    const Problem p = make_problem(cfg);
    const auto curv = curvature_integrals(p.target, p.a, p.b);
    const BoundKind kinds[] = {BoundKind::uniform_interpolant, BoundKind::optimized_interpolant,
                               BoundKind::uniform_best_l1, BoundKind::optimized_best_l1};
    std::ostringstream s;
    if (cfg.format == "json") {
        nlohmann::json j{{"function", p.spec.text}, {"tolerance", *cfg.tolerance}};
        for (auto k : kinds)
            j["segments"][std::string(to_string(k))] = min_segments_for_tolerance(curv, p.a, p.b, *cfg.tolerance, k);
        s << j.dump(2) << "\n";
    } else {
        s << "kind,segments\n";
        for (auto k : kinds)
            s << to_string(k) << "," << min_segments_for_tolerance(curv, p.a, p.b, *cfg.tolerance, k) << "\n";
    }
    write_output(cfg, s.str(), out);
    return ok;
}

inline int cmd_bench(const RunConfig& cfg, std::ostream& out) {
    if (cfg.evals < 100000) throw std::invalid_argument("--evals must be at least 100000");
    const Problem p = make_problem(cfg);
    std::vector<std::size_t> ns = sweep_segments;
    if (cfg.segments || cfg.tolerance) ns = {resolve_segments(cfg, p)};

    std::ostringstream s;
    s << "segments,mode,mean_ns,min_ns,checksum\n";
    {
        // Direct evaluation of the target as a reference row.
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> dist(p.a, p.b);
        std::vector<double> xs(cfg.evals);
        for (auto& x : xs) x = dist(rng);
        volatile double sink = 0.0;
        double best = 1e300, total = 0.0, checksum = 0.0;
        for (int r = 0; r < 6; ++r) {
            double acc = 0.0;
            const auto t0 = std::chrono::steady_clock::now();
            for (double x : xs) acc += p.target(x);
            const auto t1 = std::chrono::steady_clock::now();
            sink = acc;
            if (r == 0) continue;  // warm-up
            const double ns_per = std::chrono::duration<double, std::nano>(t1 - t0).count() / static_cast<double>(xs.size());
            best = std::min(best, ns_per);
            total += ns_per;
            checksum = acc;
        }
        (void)sink;
        s << "0,direct," << fmt(total / 5.0) << "," << fmt(best) << "," << fmt(checksum) << "\n";
    }
    for (std::size_t n : ns) {
        const Partition part = build_partition(cfg, p, n);
        const Evaluator e(interpolant(p.target, part));
        const BenchStats st = e.bench(cfg.evals, cfg.seed);
        s << n << "," << to_string(e.mode()) << "," << fmt(st.mean_ns) << "," << fmt(st.min_ns) << ","
          << fmt(st.checksum) << "\n";
    }
    write_output(cfg, s.str(), out);
    return ok;
}

/// Measured distances and bounds for the four approximant/partition pairings
/// over the standard N sweep.
inline std::string reproduce_errors(const TargetFunction& f, double a, double b, const RunConfig& cfg) {
    const auto curv = curvature_integrals(f, a, b);
    const FitOptions opts = fit_options(cfg);
    const DistanceTolerance tol = distance_tolerance(cfg);
    std::ostringstream s;
    s << "N,interp_uniform,interp_optimized,bestl1_uniform,bestl1_optimized,"
         "bound_interp_uniform,bound_interp_optimized,bound_bestl1_uniform,bound_bestl1_optimized,"
         "ratio_uniform,ratio_optimized\n";
    for (std::size_t n : sweep_segments) {
        const Partition pu = uniform_partition(a, b, n);
        const Partition po = optimized_partition(f, a, b, n);
        const double iu = l1_distance(f, interpolant(f, pu), tol);
        const double io = l1_distance(f, interpolant(f, po), tol);
        const auto fu = best_l1_fit(f, pu, opts);
        const auto fo = best_l1_fit(f, po, opts);
        if (!fu.report.converged || !fo.report.converged)
            throw numerical_error("best L1 fit did not converge at N = " + std::to_string(n));
        const double lu = l1_distance(f, fu.fit, tol);
        const double lo = l1_distance(f, fo.fit, tol);
        s << n << "," << fmt(iu) << "," << fmt(io) << "," << fmt(lu) << "," << fmt(lo) << ","
          << fmt(bound_estimate(curv, a, b, n, BoundKind::uniform_interpolant).value) << ","
          << fmt(bound_estimate(curv, a, b, n, BoundKind::optimized_interpolant).value) << ","
          << fmt(bound_estimate(curv, a, b, n, BoundKind::uniform_best_l1).value) << ","
          << fmt(bound_estimate(curv, a, b, n, BoundKind::optimized_best_l1).value) << "," << fmt(lu / iu) << ","
          << fmt(lo / io) << "\n";
    }
    return s.str();
}

/// Partition gain of the Gaussian on [0, b] for b = 1, 1.5, ..., 16.
inline std::string reproduce_gain() {
    std::ostringstream s;
    s << "b,gain,gain_over_b2,best_l1_gain\n";
    for (int twice = 2; twice <= 32; ++twice) {
        const double b = 0.5 * twice;
        const double g = partition_gain(gaussian(0.0, b), 0.0, b);
        s << fmt(b) << "," << fmt(g) << "," << fmt(g / (b * b)) << "," << fmt(1.0 / best_l1_factor) << "\n";
    }
    return s.str();
}

inline int cmd_reproduce(const std::string& experiment, const RunConfig& cfg, std::ostream& out) {
    std::string text;
    if (experiment == "gaussian04")
        text = reproduce_errors(gaussian(0.0, 4.0), 0.0, 4.0, cfg);
    else if (experiment == "gaussian08")
        text = reproduce_errors(gaussian(0.0, 8.0), 0.0, 8.0, cfg);
    else if (experiment == "chirp")
        text = reproduce_errors(chirp(0.0, 1.0), 0.0, 1.0, cfg);
    else if (experiment == "gain")
        text = reproduce_gain();
    else
        throw std::invalid_argument("unknown experiment: " + experiment);
    write_output(cfg, text, out);
    return ok;
}

/// Validates the shared flags, then runs `body`, mapping exceptions to exit codes.
template <class Body>
int guarded(const RunConfig& cfg, Body&& body, std::ostream& err = std::cerr) {
    try {
        check_choice(cfg.partition, {"uniform", "optimized"}, "--partition");
        check_choice(cfg.fit, {"interpolant", "l2", "l1"}, "--fit");
        check_choice(cfg.format, {"csv", "json"}, "--format");
        return body();
    } catch (const numerical_error& e) {
        err << "polylin: numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const std::domain_error& e) {
        err << "polylin: numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const std::invalid_argument& e) {
        err << "polylin: " << e.what() << "\n";
        return bad_config;
    } catch (const std::out_of_range& e) {
        err << "polylin: " << e.what() << "\n";
        return bad_config;
    }
}

} // namespace polylin::cli
