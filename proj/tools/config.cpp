#include "config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string_view>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "impsim/errors.hpp"

namespace impsim::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw InvalidInput(fmt::format("{}: {}", path, msg));
}

std::string join_path(const std::string& parent, std::string_view key) {
    return parent.empty() ? std::string(key) : fmt::format("{}.{}", parent, key);
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected a table of keys");
    return j;
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> keys) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto k : keys) known = known || k == key;
        if (!known) fail(join_path(path, key), "unknown key");
    }
}

const json& member(const json& obj, const std::string& path, std::string_view key) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) fail(join_path(path, key), "missing required key");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
}

double number(const json& obj, const std::string& path, std::string_view key) {
    return as_number(member(obj, path, key), join_path(path, key));
}

double number_or(const json& obj, const std::string& path, std::string_view key, double fallback) {
    return obj.contains(std::string(key)) ? number(obj, path, key) : fallback;
}

std::int64_t integer_or(const json& obj, const std::string& path, std::string_view key,
                        std::int64_t fallback) {
    if (!obj.contains(std::string(key))) return fallback;
    const auto& j = obj.at(std::string(key));
    if (!j.is_number_integer()) fail(join_path(path, key), "expected an integer");
    return j.get<std::int64_t>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], fmt::format("{}[{}]", path, i)));
    return out;
}

void require_increasing(const std::vector<double>& xs, const std::string& path) {
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) fail(fmt::format("{}[{}]", path, i), "values must be increasing");
}

Mode parse_mode(const json& j, const std::string& path) {
    require_object(j, path);
    allow_keys(j, path, {"amplitude", "frequency", "phase"});
    return {number(j, path, "amplitude"), number(j, path, "frequency"), number_or(j, path, "phase", 0.0)};
}

/// A bare number is a constant signal.
ApSignal parse_signal(const json& j, const std::string& path) {
    if (j.is_number()) return ApSignal::constant(as_number(j, path));
    require_object(j, path);
    allow_keys(j, path, {"offset", "modes"});
    std::vector<Mode> modes;
    if (j.contains("modes")) {
        const auto mpath = join_path(path, "modes");
        const auto& list = j.at("modes");
        if (!list.is_array()) fail(mpath, "expected a list of modes");
        for (std::size_t i = 0; i < list.size(); ++i)
            modes.push_back(parse_mode(list[i], fmt::format("{}[{}]", mpath, i)));
    }
    return ApSignal(number(j, path, "offset"), std::move(modes));
}

IndexSinusoid parse_sinusoid(const json& obj, const std::string& path, std::string_view key) {
    if (!obj.contains(std::string(key))) return {};
    const auto p = join_path(path, key);
    const auto m = parse_mode(obj.at(std::string(key)), p);
    return {m.amplitude, m.frequency, m.phase};
}

ImpulseSchedule parse_impulses(const json& root) {
    const auto it = root.find("impulses");
    if (it == root.end() || it->is_null()) return ImpulseSchedule::none();
    const std::string path = "impulses";
    require_object(*it, path);
    allow_keys(*it, path, {"base_period", "jitter", "magnitude"});
    const double period = number(*it, path, "base_period");
    const auto jitter = parse_sinusoid(*it, path, "jitter");
    const auto mpath = join_path(path, "magnitude");
    const auto& mag = member(*it, path, "magnitude");
    double base = 0.0;
    IndexSinusoid variation{};
    if (mag.is_number()) {
        base = as_number(mag, mpath);
    } else {
        require_object(mag, mpath);
        allow_keys(mag, mpath, {"base", "variation"});
        base = number(mag, mpath, "base");
        variation = parse_sinusoid(mag, mpath, "variation");
    }
    if (!(period > 0.0)) fail(join_path(path, "base_period"), "must be positive");
    if (!(2.0 * std::abs(jitter.amplitude) < period))
        fail(join_path(path, "jitter.amplitude"), "twice the jitter amplitude must stay below base_period");
    if (!(base - std::abs(variation.amplitude) > -1.0))
        fail(mpath, "1 + d_k must stay positive (base - |variation amplitude| > -1)");
    return {period, jitter, base, variation};
}

AnalysisKnobs parse_analysis(const json& root, double t_end) {
    AnalysisKnobs k;
    const auto it = root.find("analysis");
    if (it == root.end() || it->is_null()) return k;
    const std::string path = "analysis";
    const auto& a = require_object(*it, path);
    allow_keys(a, path,
               {"tail_fraction", "n_pairs", "seed", "tail_gap_tol", "ap_eps", "ap_window_length",
                "ap_scan_step", "shifts", "shift_spacing", "shift_count", "asymptotic_window_length",
                "eps_target", "scan_horizon", "scan_step", "sigma_horizons", "sigma_tol"});
    const auto at = [&](std::string_view key) { return join_path(path, key); };
    const auto positive = [&](std::string_view key, double fallback) {
        const double x = number_or(a, path, key, fallback);
        if (!(x > 0.0)) fail(at(key), "must be positive");
        return x;
    };
    const auto nonnegative = [&](std::string_view key, double fallback) {
        const double x = number_or(a, path, key, fallback);
        if (!(x >= 0.0)) fail(at(key), "must be nonnegative");
        return x;
    };

    k.tail_fraction = positive("tail_fraction", k.tail_fraction);
    if (k.tail_fraction > 1.0) fail(at("tail_fraction"), "must not exceed 1");
    const auto pairs = integer_or(a, path, "n_pairs", k.n_pairs);
    if (pairs < 1 || pairs > 10000) fail(at("n_pairs"), "must lie in [1, 10000]");
    k.n_pairs = static_cast<int>(pairs);
    const auto seed = integer_or(a, path, "seed", static_cast<std::int64_t>(k.seed));
    if (seed < 0) fail(at("seed"), "must be nonnegative");
    k.seed = static_cast<std::uint64_t>(seed);
    k.tail_gap_tol = positive("tail_gap_tol", k.tail_gap_tol);
    k.ap_eps = positive("ap_eps", k.ap_eps);
    k.ap_window_length = nonnegative("ap_window_length", 0.0);
    k.ap_scan_step = nonnegative("ap_scan_step", 0.0);
    if (a.contains("shifts")) {
        k.shifts = number_list(a.at("shifts"), at("shifts"));
        if (k.shifts.size() < 2) fail(at("shifts"), "needs at least two entries");
        require_increasing(k.shifts, at("shifts"));
        if (k.shifts.front() < 0.0) fail(at("shifts[0]"), "must be nonnegative");
        if (k.shifts.back() > t_end) fail(at("shifts"), "shifts must not exceed integrator.t_end");
    }
    k.shift_spacing = nonnegative("shift_spacing", 0.0);
    const auto count = integer_or(a, path, "shift_count", k.shift_count);
    if (count < 2 || count > 1000) fail(at("shift_count"), "must lie in [2, 1000]");
    k.shift_count = static_cast<int>(count);
    k.asymptotic_window_length = nonnegative("asymptotic_window_length", 0.0);
    k.eps_target = positive("eps_target", k.eps_target);
    k.rates.scan_horizon = nonnegative("scan_horizon", 0.0);
    k.rates.scan_step = nonnegative("scan_step", 0.0);
    if (a.contains("sigma_horizons")) {
        k.rates.sigma_horizons = number_list(a.at("sigma_horizons"), at("sigma_horizons"));
        if (k.rates.sigma_horizons.size() < 3) fail(at("sigma_horizons"), "needs at least three entries");
        require_increasing(k.rates.sigma_horizons, at("sigma_horizons"));
        if (!(k.rates.sigma_horizons.front() > 0.0)) fail(at("sigma_horizons[0]"), "must be positive");
    }
    k.rates.sigma_tol = positive("sigma_tol", k.rates.sigma_tol);
    return k;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(fmt::format("<root>: malformed config ({})", e.what()));
    }
    require_object(root, "");
    allow_keys(root, "", {"coefficients", "delay", "impulses", "initial", "integrator", "analysis"});

    ScenarioConfig cfg;
    auto& spec = cfg.spec;

    const auto& coeffs = require_object(member(root, "", "coefficients"), "coefficients");
    allow_keys(coeffs, "coefficients", {"alpha", "beta", "gamma"});
    for (auto [key, field] : {std::pair{"alpha", &spec.alpha}, {"beta", &spec.beta}, {"gamma", &spec.gamma}}) {
        const auto path = join_path("coefficients", key);
        *field = parse_signal(member(coeffs, "coefficients", key), path);
        if (!field->strictly_positive())
            fail(path, fmt::format("offset minus the sum of |amplitudes| must be positive, got {}",
                                   field->envelope_min()));
    }

    const auto& delay = require_object(member(root, "", "delay"), "delay");
    allow_keys(delay, "delay", {"h"});
    spec.h = number(delay, "delay", "h");
    if (!(spec.h > 0.0)) fail("delay.h", "must be positive");

    spec.schedule = parse_impulses(root);

    const auto& init = require_object(member(root, "", "initial"), "initial");
    allow_keys(init, "initial", {"xi", "psi"});
    spec.initial_psi = parse_signal(member(init, "initial", "psi"), "initial.psi");
    if (!(spec.initial_psi(0.0) > 0.0)) fail("initial.psi", "psi(0) must be positive");
    {
        ModelSpec probe = spec;
        probe.initial_xi = 1.0;
        try {
            probe.validate();
        } catch (const InvalidInput& e) {
            fail("initial.psi", e.what());
        }
    }
    const auto xi_it = init.find("xi");
    if (xi_it == init.end() || (xi_it->is_string() && xi_it->get<std::string>() == "consistent")) {
        spec.initial_xi = consistent_initial_xi(spec);
    } else {
        spec.initial_xi = as_number(*xi_it, "initial.xi");
        if (!(spec.initial_xi > 0.0)) fail("initial.xi", "must be positive");
    }

    const auto& integ = require_object(member(root, "", "integrator"), "integrator");
    allow_keys(integ, "integrator", {"dt_per_h", "t_end"});
    const auto& n = member(integ, "integrator", "dt_per_h");
    if (!n.is_number_integer() || n.get<std::int64_t>() < 1 || n.get<std::int64_t>() > 1'000'000)
        fail("integrator.dt_per_h", "expected an integer in [1, 1000000]");
    cfg.dt_per_h = static_cast<int>(n.get<std::int64_t>());
    cfg.t_end = number(integ, "integrator", "t_end");
    if (!(cfg.t_end >= 0.0)) fail("integrator.t_end", "must be nonnegative");
    if (!(spec.h / cfg.dt_per_h < spec.schedule.min_gap()))
        fail("integrator.dt_per_h",
             fmt::format("step h / N = {} must be below the minimum impulse gap {}",
                         spec.h / cfg.dt_per_h, spec.schedule.min_gap()));

    cfg.analysis = parse_analysis(root, cfg.t_end);
    spec.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput(fmt::format("{}: cannot open config file", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace impsim::cli
