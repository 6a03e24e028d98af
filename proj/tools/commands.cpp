#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "config.hpp"
#include "impsim/analysis.hpp"
#include "impsim/errors.hpp"

namespace impsim::cli {

namespace {

constexpr double kIntegralTolerance = 1e-6;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput(fmt::format("{}: cannot open for writing", path.string()));
    return os;
}

/// Writes the report to dir/<name>_report.txt and echoes it.
void emit(const std::filesystem::path& dir, std::string_view name, const std::string& text,
          std::ostream& out) {
    auto os = open_out(dir / fmt::format("{}_report.txt", name));
    os << text;
    out << text;
}

int verdict(bool applicable, bool pass) {
    if (!applicable) return kOk;
    return pass ? kOk : kCheckFailed;
}

DerivedRates rates_for(const ScenarioConfig& cfg) {
    spdlog::info("deriving rates (scan horizon {}, sigma horizons {})",
                 cfg.analysis.rates.scan_horizon, fmt::join(cfg.analysis.rates.sigma_horizons, ","));
    return derive_rates(cfg.spec, cfg.analysis.rates);
}

int analyze_permanence(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
    const auto rates = rates_for(cfg);
    const auto rep = check_permanence(cfg.spec, rates, cfg.integrator(RhsKind::full_model),
                                      cfg.analysis.tail_fraction);
    std::ostringstream text;
    write_report(text, rep);
    emit(dir, "permanence", text.str(), out);
    return verdict(rep.applicable, rep.pass);
}

int analyze_attractivity(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
    const auto rates = rates_for(cfg);
    const AttractivityOptions opts{cfg.analysis.n_pairs, cfg.analysis.seed, cfg.analysis.tail_gap_tol};
    const auto rep = check_attractivity(cfg.spec, rates, cfg.integrator(RhsKind::full_model), opts);
    std::ostringstream text;
    write_report(text, rep);
    emit(dir, "attractivity", text.str(), out);
    if (rep.applicable) {
        auto csv = open_out(dir / "attractivity_decay.csv");
        write_decay_csv(csv, rep);
    }
    return verdict(rep.applicable, rep.pass);
}

int analyze_integral(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
    const auto icfg = cfg.integrator(RhsKind::full_model);
    const double err = check_integral_identity(cfg.spec, icfg);
    const bool pass = err < kIntegralTolerance;
    const auto text = fmt::format("dt = {:.12g}\nconsistent_xi = {:.12g}\nmax_error = {:.6g}\n"
                                  "tolerance = {:.6g}\npass = {}\n",
                                  icfg.dt, consistent_initial_xi(cfg.spec), err, kIntegralTolerance, pass);
    emit(dir, "integral", text, out);
    return pass ? kOk : kCheckFailed;
}

int analyze_ap(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
    const double h = cfg.spec.h;
    const double length = cfg.analysis.ap_window_length > 0.0 ? cfg.analysis.ap_window_length : 20.0 * h;
    const double step = cfg.analysis.ap_scan_step > 0.0 ? cfg.analysis.ap_scan_step : h / 10.0;
    if (cfg.t_end < 1.5 * length)
        throw InvalidInput(fmt::format("integrator.t_end: ap analysis needs t_end >= {} (1.5 windows)",
                                       1.5 * length));
    const Window window{cfg.t_end - 1.5 * length, cfg.t_end - 0.5 * length};
    const auto icfg = cfg.integrator(RhsKind::full_model);
    const auto x = integrate(cfg.spec, DerivedRates{}, icfg);
    std::vector<double> taus;
    const auto n = static_cast<std::int64_t>(std::floor(0.5 * length / step * (1.0 + 1e-12)));
    for (std::int64_t j = 1; j <= n; ++j) taus.push_back(static_cast<double>(j) * step);
    const auto rep = detect_almost_periods(x, cfg.analysis.ap_eps, window, taus, icfg.dt);
    std::ostringstream text;
    fmt::print(text, "window_t0 = {:.12g}\nwindow_t1 = {:.12g}\n", window.t0, window.t1);
    write_report(text, rep);
    emit(dir, "ap", text.str(), out);
    auto csv = open_out(dir / "ap_candidates.csv");
    fmt::print(csv, "tau,accepted\n");
    for (double tau : taus)
        fmt::print(csv, "{:.17g},{}\n", tau,
                   std::binary_search(rep.almost_periods_found.begin(), rep.almost_periods_found.end(), tau)
                       ? 1
                       : 0);
    return rep.asymptotic_pass ? kOk : kCheckFailed;
}

int analyze_asymptotic(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
    const auto rates = rates_for(cfg);
    const double h = cfg.spec.h;
    AsymptoticOptions opts;
    opts.shifts = cfg.analysis.shifts;
    if (opts.shifts.empty()) {
        const double spacing = cfg.analysis.shift_spacing > 0.0 ? cfg.analysis.shift_spacing : 50.0 * h;
        for (int k = 0; k < cfg.analysis.shift_count; ++k) opts.shifts.push_back(0.5 * cfg.t_end + spacing * k);
    }
    opts.window_length = cfg.analysis.asymptotic_window_length;
    opts.eps_target = cfg.analysis.eps_target;
    const auto rep = check_asymptotic_ap(cfg.spec, rates, cfg.integrator(RhsKind::full_model), opts);
    std::ostringstream text;
    write_report(text, rep);
    emit(dir, "asymptotic", text.str(), out);
    if (rep.applicable) {
        auto csv = open_out(dir / "asymptotic_distances.csv");
        fmt::print(csv, "shift,distance\n");
        for (std::size_t k = 0; k < rep.distances.size(); ++k)
            fmt::print(csv, "{:.17g},{:.17g}\n", rep.shifts[k], rep.distances[k]);
    }
    return verdict(rep.applicable, rep.pass);
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("impsim");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("IMPSIM_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int cmd_check(const std::filesystem::path& config, std::ostream& out) {
    const auto cfg = load_config(config);
    const auto rates = rates_for(cfg);
    write_report(out, rates);
    return rates.cond16 && rates.cond17 ? kOk : kCheckFailed;
}

int cmd_simulate(const std::filesystem::path& config, std::string_view rhs, std::optional<double> t_end,
                 const std::filesystem::path& out_path) {
    const auto kind = parse_rhs_kind(rhs);
    if (!kind) throw InvalidInput(fmt::format("--rhs: unknown right-hand side '{}'", rhs));
    auto cfg = load_config(config);
    if (t_end) {
        if (!(*t_end >= 0.0) || !std::isfinite(*t_end)) throw InvalidInput("--t-end: must be nonnegative");
        cfg.t_end = *t_end;
    }
    const bool needs_rates = *kind == RhsKind::transformed_v || *kind == RhsKind::comparison_L ||
                             *kind == RhsKind::comparison_M;
    const auto rates = needs_rates ? rates_for(cfg) : DerivedRates{};
    const auto icfg = cfg.integrator(*kind);
    spdlog::info("integrating {} to t = {} with dt = {}", rhs, icfg.t_end, icfg.dt);
    const auto traj = integrate(cfg.spec, rates, icfg);
    auto os = open_out(out_path);
    traj.write_csv(os);
    spdlog::info("wrote {} knots to {}", traj.knot_count(), out_path.string());
    return kOk;
}

int cmd_analyze(const std::filesystem::path& config, std::string_view which,
                const std::filesystem::path& out_dir, std::ostream& out) {
    using Handler = int (*)(const ScenarioConfig&, const std::filesystem::path&, std::ostream&);
    static constexpr std::pair<std::string_view, Handler> kHandlers[] = {
        {"permanence", analyze_permanence}, {"attractivity", analyze_attractivity},
        {"integral", analyze_integral},     {"ap", analyze_ap},
        {"asymptotic", analyze_asymptotic},
    };
    Handler handler = nullptr;
    for (const auto& [name, fn] : kHandlers)
        if (name == which) handler = fn;
    if (!handler) throw InvalidInput(fmt::format("--which: unknown analysis '{}'", which));
    const auto cfg = load_config(config);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw InvalidInput(fmt::format("{}: cannot create output directory ({})", out_dir.string(), ec.message()));
    try {
        return handler(cfg, out_dir, out);
    } catch (const NumericalFailure& e) {
        throw NumericalFailure(fmt::format("{}: {}", which, e.what()), e.blame_time());
    } catch (const InvalidInput& e) {
        throw InvalidInput(fmt::format("{}: {}", which, e.what()));
    }
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const InvalidInput& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kInvalidInput;
    } catch (const NumericalFailure& e) {
        if (std::isnan(e.blame_time()))
            fmt::print(err, "numerical failure: {}\n", e.what());
        else
            fmt::print(err, "numerical failure at t = {}: {}\n", e.blame_time(), e.what());
        return kNumericalFailure;
    }
}

int run(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Impulsive stage-structured delay model: checks, simulation and analysis"};
    app.require_subcommand(1);

    std::string config;
    auto* check = app.add_subcommand("check", "Derived rates and the permanence / attractivity conditions");
    check->add_option("config", config, "Scenario file")->required();

    std::string rhs;
    std::optional<double> t_end;
    std::string out_path;
    auto* simulate = app.add_subcommand("simulate", "Integrate and write a trajectory CSV");
    simulate->add_option("config", config, "Scenario file")->required();
    simulate->add_option("--rhs", rhs, "full_model, transformed_v, comparison_L, comparison_M, startup, logistic_minorant")
        ->required();
    simulate->add_option("--t-end", t_end, "Override integrator.t_end");
    simulate->add_option("--out", out_path, "Output CSV")->required();

    std::string which;
    std::string out_dir;
    auto* analyze = app.add_subcommand("analyze", "Run one analysis and write its report");
    analyze->add_option("config", config, "Scenario file")->required();
    analyze->add_option("--which", which, "permanence, attractivity, integral, ap or asymptotic")
        ->required()
        ->check(CLI::IsMember({"permanence", "attractivity", "integral", "ap", "asymptotic"}));
    analyze->add_option("--out-dir", out_dir, "Directory for reports and CSVs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidInput;
    }

    return guarded(std::cerr, [&] {
        if (*check) return cmd_check(config, std::cout);
        if (*simulate) return cmd_simulate(config, rhs, t_end, out_path);
        return cmd_analyze(config, which, out_dir, std::cout);
    });
}

}  // namespace impsim::cli
