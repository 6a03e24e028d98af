#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace impsim::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kInvalidInput = 2,
    kNumericalFailure = 3,
};

/// Prints the derived-rates report; 0 iff both conditions hold.
int cmd_check(const std::filesystem::path& config, std::ostream& out);

/// Writes the trajectory CSV of the named right-hand side.
int cmd_simulate(const std::filesystem::path& config, std::string_view rhs,
                 std::optional<double> t_end, const std::filesystem::path& out_path);

/// Runs one analysis (permanence, attractivity, integral, ap, asymptotic),
/// writes `<which>_report.txt` plus any CSVs into out_dir and echoes the
/// report. 0 on pass or when the hypotheses are not met (informational).
int cmd_analyze(const std::filesystem::path& config, std::string_view which,
                const std::filesystem::path& out_dir, std::ostream& out);

/// Maps InvalidInput to 2 and NumericalFailure to 3, printing the message.
int guarded(std::ostream& err, const std::function<int()>& body);

/// Entry point behind the executable.
int run(int argc, char** argv);

}  // namespace impsim::cli
