#include "tubeflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tubeflow/analysis.hpp"
#include "tubeflow/errors.hpp"
#include "tubeflow/forward.hpp"
#include "tubeflow/io.hpp"
#include "tubeflow/tubes.hpp"

namespace tubeflow {

using io::Json;

RoundtripReport pipeline_roundtrip(const Measure& mu, double kappa, double alpha_max,
                                   const RoundtripOptions& options)
{
    const auto curve = build_curve(mu, kappa, alpha_max, options.n_samples);
    RoundtripReport report;
    report.recovery = recover(curve, options.recovery);
    const auto& result = report.recovery;
    const auto& alpha = result.alpha;
    const std::size_t n = alpha.size();
    const double h = alpha_max / static_cast<double>(n - 1);

    report.v_max = curve.v_max();
    report.phi_total = moment(mu, -1, 0.0, kInfinity);
    for (std::size_t i = 0; i < n; ++i) {
        report.v_error = std::max(report.v_error, std::abs(result.water[i] - v_w(mu, kappa, alpha[i])));
        report.phi_error = std::max(report.phi_error, std::abs(result.phi[i] - moment(mu, -1, 0.0, alpha[i])));
    }

    report.window_lo = std::isnan(options.window_lo) ? options.recovery.alpha_min : options.window_lo;
    report.window_hi = std::isnan(options.window_hi) ? alpha_max - 2.0 * h : options.window_hi;
    if (mu.atoms().empty() && !result.density.empty()) {
        report.density_error = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] < report.window_lo || alpha[i] > report.window_hi || std::isnan(result.density[i])) {
                continue;
            }
            double truth = 0.0;
            for (const auto& piece : mu.pieces()) {
                if (alpha[i] >= piece.lo && alpha[i] < piece.hi) {
                    truth += piece.density;
                }
            }
            report.density_error = std::max(report.density_error, std::abs(result.density[i] - truth));
        }
    }

    for (const auto& atom : mu.atoms()) {
        const double target = moment(mu, -1, 0.0, atom.length) + 0.5 * atom.area / atom.length;
        double offset = kInfinity;
        for (std::size_t i = 0; i < n; ++i) {
            if (result.phi[i] >= target) {
                offset = std::abs(alpha[i] - atom.length) / h;
                break;
            }
        }
        report.atom_offset_cells = std::max(report.atom_offset_cells, offset);
    }
    return report;
}

namespace {

struct Outputs {
    std::ostream& out;
    std::ostream& err;
    std::string path;

    // Writes via `write` to the --out file or to `out`.
    template <typename Write>
    void artifact(Write&& write) const
    {
        if (path.empty()) {
            write(out);
            return;
        }
        std::ofstream file(path);
        if (!file) {
            throw ArgumentError("cannot write " + path);
        }
        write(file);
    }

    void summary(const Json& json) const
    {
        Json line = json;
        line["status"] = "ok";
        (path.empty() ? err : out) << line.dump() << '\n';
    }
};

void write_json_file(const std::string& path, const Json& json)
{
    std::ofstream file(path);
    if (!file) {
        throw ArgumentError("cannot write " + path);
    }
    file << json.dump(2) << '\n';
}

Json load_config(const std::string& path)
{
    return path.empty() ? Json::object() : io::read_json_file(path);
}

double pick(const std::optional<double>& flag, const Json& config, const char* key,
            std::optional<double> fallback = std::nullopt)
{
    if (flag) {
        return *flag;
    }
    if (config.contains(key)) {
        if (!config.at(key).is_number()) {
            throw ArgumentError(std::string("config field \"") + key + "\" must be a number");
        }
        return config.at(key).get<double>();
    }
    if (fallback) {
        return *fallback;
    }
    throw ArgumentError(std::string("missing required value \"") + key + "\"");
}

int pick_int(const std::optional<int>& flag, const Json& config, const char* key, int fallback)
{
    if (flag) {
        return *flag;
    }
    if (config.contains(key)) {
        if (!config.at(key).is_number_integer()) {
            throw ArgumentError(std::string("config field \"") + key + "\" must be an integer");
        }
        return config.at(key).get<int>();
    }
    return fallback;
}

struct RecoveryFlags {
    std::optional<int> n_grid;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<double> alpha_min;
    std::optional<int> quad_order;
    bool uncorrected = false;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--n-grid", n_grid, "Recovery grid points on [0, alpha_max]");
        cmd->add_option("--tol", tol, "Absolute sup-norm stopping tolerance (default 1e-10 * v_max)");
        cmd->add_option("--max-iter", max_iter, "Iteration cap");
        cmd->add_option("--alpha-min", alpha_min, "Lower edge of the density window (default alpha_max / 20)");
        cmd->add_option("--quad-order", quad_order, "Gauss-Legendre points per panel");
        cmd->add_flag("--uncorrected", uncorrected,
                      "Uncorrected endpoint slope and density prefactor (comparison runs only)");
    }

    RecoveryConfig resolve(const Json& config, double alpha_max, int default_grid = 1001) const
    {
        RecoveryConfig rc;
        rc.n_grid = pick_int(n_grid, config, "n_grid", default_grid);
        if (tol || config.contains("tol")) {
            rc.tol = pick(tol, config, "tol");
        }
        rc.max_iter = pick_int(max_iter, config, "max_iter", rc.max_iter);
        rc.alpha_min = pick(alpha_min, config, "alpha_min", alpha_max / 20.0);
        rc.quad_order = pick_int(quad_order, config, "quad_order", rc.quad_order);
        rc.uncorrected = uncorrected || config.value("uncorrected", false);
        rc.validate(alpha_max);
        return rc;
    }
};

Json recovery_diagnostics(const RecoveryResult& result)
{
    return {
        {"iterations", result.iterations},
        {"converged", result.converged},
        {"observed_ratio", result.observed_ratio},
        {"contraction_bound", result.contraction_bound},
        {"last_step", result.last_step},
        {"error_bound", result.error_bound},
        {"residual", result.residual},
        {"tol", result.tol},
        {"clip_count", result.clip_count},
    };
}

// --- forward ---------------------------------------------------------------

struct ForwardOptions {
    std::string config;
    std::optional<double> kappa;
    std::optional<double> alpha_max;
    std::optional<int> n_samples;
};

int run_forward(const ForwardOptions& opt, const Outputs& outputs)
{
    const Json config = load_config(opt.config);
    const Measure mu = io::measure_from_json(config);
    const double kappa = pick(opt.kappa, config, "kappa");
    const double alpha_max = pick(opt.alpha_max, config, "alpha_max");
    const int n_samples = pick_int(opt.n_samples, config, "n_samples", 1001);
    const auto curve = build_curve(mu, kappa, alpha_max, n_samples);

    outputs.artifact([&](std::ostream& os) {
        io::CsvWriter csv(os, {"alpha", "Vw", "Vo", "total", "water_cut"});
        for (int i = 0; i < n_samples; ++i) {
            const double alpha = i == n_samples - 1 ? alpha_max : alpha_max * i / (n_samples - 1);
            const double cut = alpha > 0.0 ? water_cut(mu, kappa, alpha) : 0.0;
            csv.row({alpha, curve.water()[i], v_o(mu, kappa, alpha), curve.total()[i], cut});
        }
    });
    outputs.summary({{"command", "forward"}, {"samples", n_samples}, {"v_max", curve.v_max()},
                     {"water_max", curve.water().back()}});
    return exit_code::kOk;
}

// --- invert ----------------------------------------------------------------

struct InvertOptions {
    std::string curve;
    std::string config;
    std::string diagnostics;
    std::optional<double> kappa;
    std::optional<double> alpha_max;
    RecoveryFlags recovery;
};

int run_invert(const InvertOptions& opt, const Outputs& outputs)
{
    const Json config = load_config(opt.config);
    const double kappa = pick(opt.kappa, config, "kappa");
    const double alpha_max = pick(opt.alpha_max, config, "alpha_max");
    std::ifstream in(opt.curve);
    if (!in) {
        throw ArgumentError("cannot open " + opt.curve);
    }
    const auto curve = io::read_curve_csv(in, alpha_max, kappa);
    const auto rc = opt.recovery.resolve(config, alpha_max);

    Json diagnostics;
    auto write_diagnostics = [&] {
        if (!opt.diagnostics.empty()) {
            write_json_file(opt.diagnostics, diagnostics);
        }
    };
    const auto readoff = curve_readoff(curve);
    const auto literal = curve_readoff(curve, true);
    Json endpoint = {{"water_max", readoff.water},
                     {"water_slope", readoff.water_slope},
                     {"water_slope_uncorrected", literal.water_slope},
                     {"v_max", curve.v_max()}};

    RecoveryResult result;
    try {
        result = recover(curve, rc);
    } catch (const ConvergenceError& e) {
        diagnostics = recovery_diagnostics(e.partial());
        diagnostics["endpoint"] = endpoint;
        write_diagnostics();
        throw;
    }
    diagnostics = recovery_diagnostics(result);
    diagnostics["endpoint"] = endpoint;
    diagnostics["uncorrected"] = rc.uncorrected;
    write_diagnostics();

    outputs.artifact([&](std::ostream& os) {
        io::CsvWriter csv(os, {"alpha", "V", "Phi", "f"});
        for (std::size_t i = 0; i < result.alpha.size(); ++i) {
            const double f = result.density.empty() ? std::nan("") : result.density[i];
            csv.row({result.alpha[i], result.water[i], result.phi[i], f});
        }
    });
    Json summary = recovery_diagnostics(result);
    summary["command"] = "invert";
    outputs.summary(summary);
    return exit_code::kOk;
}

// --- tubes -----------------------------------------------------------------

struct TubesOptions {
    std::string config;
    std::optional<double> kappa;
    std::optional<double> t_max;
    std::optional<int> n_steps;
};

int run_tubes(const TubesOptions& opt, const Outputs& outputs)
{
    const Json config = load_config(opt.config);
    const auto system = io::tubes_from_json(config);
    const double kappa = pick(opt.kappa, config, "kappa");
    if (!config.contains("pump")) {
        throw ArgumentError("tubes config needs a \"pump\" object");
    }
    const auto pump = io::pump_from_json(config.at("pump"));
    const double t_max = pick(opt.t_max, config, "t_max");
    const int n_steps = pick_int(opt.n_steps, config, "n_steps", 100);
    if (!(t_max > 0.0) || n_steps < 1) {
        throw ArgumentError("tubes: need t_max > 0 and n_steps >= 1");
    }
    std::vector<double> grid(n_steps + 1);
    for (int i = 0; i <= n_steps; ++i) {
        grid[i] = t_max * i / n_steps;
    }
    grid.back() = t_max;
    const auto sim = simulate(system, kappa, pump, grid);

    outputs.artifact([&](std::ostream& os) {
        std::vector<std::string> header{"t", "F", "Vw", "Vo"};
        for (std::size_t j = 0; j < system.size(); ++j) {
            header.push_back("l_" + std::to_string(j + 1));
        }
        io::CsvWriter csv(os, header);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::vector<double> row{sim.times[i], sim.pumped[i], sim.water[i], sim.oil[i]};
            for (const auto& positions : sim.positions) {
                row.push_back(positions[i]);
            }
            csv.row(row);
        }
    });
    Json breakthrough = Json::array();
    for (double t : sim.breakthrough_times) {
        breakthrough.push_back(std::isfinite(t) ? Json(t) : Json(nullptr));
    }
    outputs.summary({{"command", "tubes"}, {"tubes", system.size()}, {"breakthrough_times", breakthrough}});
    return exit_code::kOk;
}

// --- stability -------------------------------------------------------------

struct StabilityOptions {
    std::string config;
    std::string curve1;
    std::string curve2;
    std::optional<double> kappa;
    std::optional<double> alpha_max;
    std::optional<int> n_samples;
    std::optional<double> delta0;
    RecoveryFlags recovery;
};

int run_stability(const StabilityOptions& opt, const Outputs& outputs)
{
    const Json config = load_config(opt.config);
    const double kappa = pick(opt.kappa, config, "kappa");
    const double alpha_max = pick(opt.alpha_max, config, "alpha_max");
    const auto rc = opt.recovery.resolve(config, alpha_max);

    auto read_curve = [&](const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw ArgumentError("cannot open " + path);
        }
        return io::read_curve_csv(in, alpha_max, kappa);
    };
    std::optional<DisplacementCurve> first;
    std::optional<DisplacementCurve> second;
    double delta0 = 0.0;
    if (!opt.curve1.empty() || !opt.curve2.empty()) {
        if (opt.curve1.empty() || opt.curve2.empty()) {
            throw ArgumentError("stability: give both --curve1 and --curve2");
        }
        first.emplace(read_curve(opt.curve1));
        second.emplace(read_curve(opt.curve2));
    } else {
        const Measure mu = io::measure_from_json(config);
        first.emplace(build_curve(mu, kappa, alpha_max, pick_int(opt.n_samples, config, "n_samples", 5001)));
        delta0 = pick(opt.delta0, config, "delta0", 1e-3) * first->v_max();
        second.emplace(perturb_curve(*first, delta0));
    }
    const auto report = stability_experiment(*first, *second, rc);
    const Json json = {
        {"delta", report.delta},
        {"delta0", delta0},
        {"v_diff", report.v_diff},
        {"bound_constant", report.bound_constant},
        {"bound", report.bound},
        {"ratio", report.ratio},
        {"solver_slack", report.solver_slack},
        {"within_bound", report.within_bound},
        {"iterations", {report.iterations1, report.iterations2}},
    };
    outputs.artifact([&](std::ostream& os) { os << json.dump(2) << '\n'; });
    if (!report.within_bound) {
        throw ConsistencyError("stability: solution difference exceeds the stability bound");
    }
    outputs.summary({{"command", "stability"}, {"within_bound", report.within_bound}, {"ratio", report.ratio}});
    return exit_code::kOk;
}

// --- mc --------------------------------------------------------------------

struct McOptions {
    std::string summary;
    MonteCarloConfig config;
};

int run_mc(const McOptions& opt, const Outputs& outputs)
{
    const auto records = monte_carlo(opt.config);
    std::vector<double> values;
    outputs.artifact([&](std::ostream& os) {
        io::CsvWriter csv(os, {"seed", "n1", "n2", "v1max", "v2max", "accepted", "c"});
        for (const auto& r : records) {
            csv.row(std::vector<std::string>{std::to_string(r.seed), std::to_string(r.n1), std::to_string(r.n2),
                                             io::format_number(r.v1_max), io::format_number(r.v2_max),
                                             r.accepted ? "1" : "0", io::format_number(r.c_value)});
        }
    });
    for (const auto& r : records) {
        if (r.accepted) {
            values.push_back(r.c_value);
        }
    }
    std::sort(values.begin(), values.end());
    Json json = {{"trials", records.size()}, {"count", values.size()}};
    if (!values.empty()) {
        const std::size_t m = values.size();
        const double median = m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
        json["min_c"] = values.front();
        json["median_c"] = median;
        json["max_c"] = values.back();
        json["max_c_at_least_5"] = values.back() >= 5.0;
    }
    json["seed"] = opt.config.seed;
    json["kappa"] = opt.config.kappa;
    json["alpha_max"] = opt.config.alpha_max;
    json["n_grid"] = opt.config.n_grid;
    json["atoms"] = {opt.config.min_atoms, opt.config.max_atoms};
    if (!opt.summary.empty()) {
        write_json_file(opt.summary, json);
    }
    Json line = json;
    line["command"] = "mc";
    outputs.summary(line);
    for (double c : values) {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw ConsistencyError("mc: accepted pair produced a non-positive or non-finite constant");
        }
    }
    return exit_code::kOk;
}

// --- ambiguity -------------------------------------------------------------

struct AmbiguityOptions {
    double alpha0 = 2.0;
    double k_factor = 1.2;
    double kappa = 0.5;
    std::optional<double> probe;
    int n_grid = 2001;
};

int run_ambiguity(const AmbiguityOptions& opt, const Outputs& outputs)
{
    const auto pair = ambiguity_pair(opt.alpha0, opt.k_factor);
    const double probe = opt.probe.value_or(opt.alpha0);
    if (!(probe <= opt.alpha0)) {
        throw ArgumentError("ambiguity: probe must not exceed alpha0");
    }
    const double gap = curve_gap(pair, opt.kappa, probe, opt.n_grid);
    const double estimate = ambiguity_series_estimate(pair, opt.kappa, probe);
    const Json json = {
        {"alpha0", opt.alpha0},
        {"k", opt.k_factor},
        {"kappa", opt.kappa},
        {"probe", probe},
        {"gap", gap},
        {"series_estimate", estimate},
        {"gap_over_estimate", estimate > 0.0 ? Json(gap / estimate) : Json(nullptr)},
        {"mu1", io::measure_to_json(pair.mu1)},
        {"mu2", io::measure_to_json(pair.mu2)},
    };
    outputs.artifact([&](std::ostream& os) { os << json.dump(2) << '\n'; });
    outputs.summary({{"command", "ambiguity"}, {"gap", gap}, {"series_estimate", estimate}});
    return exit_code::kOk;
}

// --- roundtrip -------------------------------------------------------------

struct RoundtripCliOptions {
    std::string config;
    std::optional<double> kappa;
    std::optional<double> alpha_max;
    std::optional<int> n_samples;
    RecoveryFlags recovery;
};

int run_roundtrip(const RoundtripCliOptions& opt, const Outputs& outputs)
{
    const Json config = load_config(opt.config);
    const Measure mu = io::measure_from_json(config);
    const double kappa = pick(opt.kappa, config, "kappa");
    const double alpha_max = pick(opt.alpha_max, config, "alpha_max");
    RoundtripOptions options;
    options.n_samples = pick_int(opt.n_samples, config, "n_samples", options.n_samples);
    options.recovery = opt.recovery.resolve(config, alpha_max, 2001);
    const auto report = pipeline_roundtrip(mu, kappa, alpha_max, options);
    Json json = {
        {"v_max", report.v_max},
        {"v_error", report.v_error},
        {"phi_total", report.phi_total},
        {"phi_error", report.phi_error},
        {"density_error", report.density_error},
        {"density_window", {report.window_lo, report.window_hi}},
        {"atom_offset_cells", report.atom_offset_cells},
        {"recovery", recovery_diagnostics(report.recovery)},
    };
    outputs.artifact([&](std::ostream& os) { os << json.dump(2) << '\n'; });
    outputs.summary({{"command", "roundtrip"},
                     {"v_error", report.v_error},
                     {"phi_error", report.phi_error},
                     {"density_error", report.density_error}});
    return exit_code::kOk;
}

int fail(std::ostream& err, int code, const std::string& kind, const std::string& message,
         Json extra = Json::object())
{
    extra["status"] = "error";
    extra["exit_code"] = code;
    extra["kind"] = kind;
    extra["message"] = message;
    err << extra.dump() << '\n';
    return code;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quasi-1D tube-bundle waterflood model: forward simulation and geometry recovery", "tubeflow"};
    app.require_subcommand(1);
    std::string out_path;

    ForwardOptions forward_opt;
    auto* forward = app.add_subcommand("forward", "Measure -> displacement curve CSV");
    forward->add_option("--config", forward_opt.config, "Measure JSON (may also hold kappa, alpha_max, n_samples)")
        ->required();
    forward->add_option("--kappa", forward_opt.kappa, "Viscosity ratio mu_w / mu_o");
    forward->add_option("--alpha-max", forward_opt.alpha_max, "Upper end of the alpha range");
    forward->add_option("--n-samples", forward_opt.n_samples, "Number of alpha samples");
    forward->add_option("--out", out_path, "Output CSV (default stdout)");

    InvertOptions invert_opt;
    auto* invert = app.add_subcommand("invert", "Displacement curve CSV -> recovered V, Phi, density");
    invert->add_option("--curve", invert_opt.curve, "CSV with total and water columns")->required();
    invert->add_option("--config", invert_opt.config, "JSON with kappa, alpha_max and recovery settings");
    invert->add_option("--kappa", invert_opt.kappa, "Viscosity ratio mu_w / mu_o");
    invert->add_option("--alpha-max", invert_opt.alpha_max, "Known upper end of the alpha range");
    invert->add_option("--diagnostics", invert_opt.diagnostics, "Write diagnostics JSON here");
    invert->add_option("--out", out_path, "Output CSV (default stdout)");
    invert_opt.recovery.attach(invert);

    TubesOptions tubes_opt;
    auto* tubes = app.add_subcommand("tubes", "Discrete tube system under a pump schedule -> CSV");
    tubes->add_option("--config", tubes_opt.config, "JSON with tubes, kappa, pump, t_max, n_steps")->required();
    tubes->add_option("--kappa", tubes_opt.kappa, "Viscosity ratio mu_w / mu_o");
    tubes->add_option("--t-max", tubes_opt.t_max, "End time");
    tubes->add_option("--n-steps", tubes_opt.n_steps, "Number of time steps");
    tubes->add_option("--out", out_path, "Output CSV (default stdout)");

    StabilityOptions stability_opt;
    auto* stability = app.add_subcommand("stability", "Compare recoveries from two nearby curves");
    stability->add_option("--config", stability_opt.config, "Measure JSON for the base curve");
    stability->add_option("--curve1", stability_opt.curve1, "First curve CSV");
    stability->add_option("--curve2", stability_opt.curve2, "Second curve CSV");
    stability->add_option("--kappa", stability_opt.kappa, "Viscosity ratio mu_w / mu_o");
    stability->add_option("--alpha-max", stability_opt.alpha_max, "Upper end of the alpha range");
    stability->add_option("--n-samples", stability_opt.n_samples, "Samples of the base curve");
    stability->add_option("--delta0", stability_opt.delta0, "Perturbation amplitude relative to v_max");
    stability->add_option("--out", out_path, "Output JSON (default stdout)");
    stability_opt.recovery.attach(stability);

    McOptions mc_opt;
    auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of the sensitivity constant");
    mc->add_option("--count", mc_opt.config.accepted_target, "Accepted pairs to collect")->capture_default_str();
    mc->add_option("--max-trials", mc_opt.config.max_trials, "Trial budget")->capture_default_str();
    mc->add_option("--seed", mc_opt.config.seed, "First trial seed")->capture_default_str();
    mc->add_option("--jobs", mc_opt.config.jobs, "Worker threads")->capture_default_str();
    mc->add_option("--kappa", mc_opt.config.kappa, "Viscosity ratio mu_w / mu_o")->capture_default_str();
    mc->add_option("--alpha-max", mc_opt.config.alpha_max, "Upper end of the alpha range")->capture_default_str();
    mc->add_option("--n-grid", mc_opt.config.n_grid, "Quadrature points per norm")->capture_default_str();
    mc->add_option("--min-atoms", mc_opt.config.min_atoms, "Fewest atoms per measure")->capture_default_str();
    mc->add_option("--max-atoms", mc_opt.config.max_atoms, "Most atoms per measure")->capture_default_str();
    mc->add_option("--summary", mc_opt.summary, "Write summary JSON here");
    mc->add_option("--out", out_path, "Output CSV (default stdout)");

    AmbiguityOptions ambiguity_opt;
    auto* ambiguity = app.add_subcommand("ambiguity", "Curve gap for measures agreeing below alpha0");
    ambiguity->add_option("--alpha0", ambiguity_opt.alpha0, "Agreement threshold")->capture_default_str();
    ambiguity->add_option("--k", ambiguity_opt.k_factor, "Tail scaling factor")->capture_default_str();
    ambiguity->add_option("--kappa", ambiguity_opt.kappa, "Viscosity ratio mu_w / mu_o")->capture_default_str();
    ambiguity->add_option("--probe", ambiguity_opt.probe, "Largest alpha compared (default alpha0)");
    ambiguity->add_option("--n-grid", ambiguity_opt.n_grid, "Volume samples")->capture_default_str();
    ambiguity->add_option("--out", out_path, "Output JSON (default stdout)");

    RoundtripCliOptions roundtrip_opt;
    auto* roundtrip = app.add_subcommand("roundtrip", "forward + invert + comparison with the true measure");
    roundtrip->add_option("--config", roundtrip_opt.config, "Measure JSON")->required();
    roundtrip->add_option("--kappa", roundtrip_opt.kappa, "Viscosity ratio mu_w / mu_o");
    roundtrip->add_option("--alpha-max", roundtrip_opt.alpha_max, "Upper end of the alpha range");
    roundtrip->add_option("--n-samples", roundtrip_opt.n_samples, "Curve samples");
    roundtrip->add_option("--out", out_path, "Output JSON (default stdout)");
    roundtrip_opt.recovery.attach(roundtrip);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::kOk;
    } catch (const CLI::ParseError& e) {
        return fail(err, exit_code::kInvalidConfig, "invalid_arguments", e.what());
    }

    const Outputs outputs{out, err, out_path};
    try {
        if (forward->parsed()) {
            return run_forward(forward_opt, outputs);
        }
        if (invert->parsed()) {
            return run_invert(invert_opt, outputs);
        }
        if (tubes->parsed()) {
            return run_tubes(tubes_opt, outputs);
        }
        if (stability->parsed()) {
            return run_stability(stability_opt, outputs);
        }
        if (mc->parsed()) {
            return run_mc(mc_opt, outputs);
        }
        if (ambiguity->parsed()) {
            return run_ambiguity(ambiguity_opt, outputs);
        }
        if (roundtrip->parsed()) {
            return run_roundtrip(roundtrip_opt, outputs);
        }
    } catch (const ConvergenceError& e) {
        return fail(err, exit_code::kNoConvergence, "no_convergence", e.what(),
                    {{"iterations", e.partial().iterations}, {"last_step", e.partial().last_step}});
    } catch (const ConsistencyError& e) {
        return fail(err, exit_code::kInvariantFailure, "invariant_failure", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(err, exit_code::kInvalidConfig, "invalid_config", e.what());
    } catch (const std::domain_error& e) {
        return fail(err, exit_code::kInvalidConfig, "invalid_config", e.what());
    } catch (const Json::exception& e) {
        return fail(err, exit_code::kInvalidConfig, "invalid_config", e.what());
    } catch (const std::exception& e) {
        return fail(err, exit_code::kInvariantFailure, "internal_error", e.what());
    }
    return fail(err, exit_code::kInvalidConfig, "invalid_arguments", "no subcommand given");
}

} // namespace tubeflow
