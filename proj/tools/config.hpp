#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "impsim/integrator.hpp"
#include "impsim/model.hpp"

namespace impsim::cli {

/// Knobs of the analysis subcommands. Zero lengths select defaults scaled by h.
struct AnalysisKnobs {
    double tail_fraction{0.25};
    int n_pairs{8};
    std::uint64_t seed{42};
    double tail_gap_tol{1e-4};
    double ap_eps{1e-4};
    double ap_window_length{0};  // 0: 20 h
    double ap_scan_step{0};      // 0: h / 10
    std::vector<double> shifts;  // empty: shift_count shifts spaced shift_spacing from t_end / 2
    double shift_spacing{0};     // 0: 50 h
    int shift_count{10};
    double asymptotic_window_length{0};  // 0: 10 h
    double eps_target{1e-3};
    RateOptions rates{};
};

struct ScenarioConfig {
    ModelSpec spec;
    int dt_per_h{100};
    double t_end{0};
    AnalysisKnobs analysis;

    [[nodiscard]] IntegratorConfig integrator(RhsKind rhs) const {
        return {spec.h / dt_per_h, t_end, rhs};
    }
};

/// Parses and validates a JSON scenario. Errors are InvalidInput whose message
/// starts with the offending key path, e.g. `coefficients.beta.offset: ...`.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace impsim::cli
