#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "config.hpp"
#include "impsim/errors.hpp"

namespace fs = std::filesystem;
using namespace impsim;
using namespace impsim::cli;

namespace {

const fs::path kConfigs{IMPSIM_CONFIG_DIR};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "impsim_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Runs the executable and returns its exit status.
int run_cli(const std::string& args) {
    const std::string cmd = std::string(IMPSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kConstant = R"({
  "coefficients": {"alpha": 1.0, "beta": 0.5, "gamma": 0.1},
  "delay": {"h": 1.0},
  "initial": {"psi": 1.8},
  "integrator": {"dt_per_h": 100, "t_end": 300.0}
})";

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return "";
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST(Config, ParsesConstantScenario) {
    const auto cfg = parse_config(kConstant);
    EXPECT_EQ(cfg.spec.alpha(3.0), 1.0);
    EXPECT_EQ(cfg.spec.beta(3.0), 0.5);
    EXPECT_EQ(cfg.spec.h, 1.0);
    EXPECT_TRUE(cfg.spec.schedule.empty());
    EXPECT_NEAR(cfg.spec.initial_xi, 1.8 * (1.0 - std::exp(-0.1)) / 0.1, 1e-13);
    EXPECT_EQ(cfg.integrator(RhsKind::full_model).dt, 0.01);
    EXPECT_EQ(cfg.t_end, 300.0);
    EXPECT_EQ(cfg.analysis.n_pairs, 8);
}

TEST(Config, ErrorsNameKeyPath) {
    const std::string base = kConstant;
    EXPECT_EQ(error_of(replaced(base, R"("beta": 0.5, )", "")).rfind("coefficients.beta:", 0), 0u);
    EXPECT_EQ(error_of(replaced(base, R"("beta": 0.5)", R"("beta": -0.5)")).rfind("coefficients.beta:", 0), 0u);
    EXPECT_EQ(error_of(replaced(base, R"("beta": 0.5)", R"("beta": {"offset": "x"})")).rfind("coefficients.beta.offset:", 0), 0u);
    EXPECT_EQ(error_of(replaced(base, "100", "1.5")).rfind("integrator.dt_per_h:", 0), 0u);
    EXPECT_EQ(error_of(replaced(base, R"("h": 1.0)", R"("h": 0)")).rfind("delay.h:", 0), 0u);
    EXPECT_EQ(error_of(replaced(base, R"("psi": 1.8)", R"("psi": 1.8, "zeta": 1)")).rfind("initial.zeta:", 0), 0u);
    EXPECT_EQ(error_of(replaced(base, R"("psi": 1.8)",
                                R"("psi": {"offset": 0.5, "modes": [{"amplitude": 1.0, "frequency": 3.0}]})"))
                  .rfind("initial.psi:", 0),
              0u);
    EXPECT_EQ(error_of(replaced(base, "}\n}", "},\n \"analysis\": {\"tail_fraction\": 2}}")).rfind("analysis.tail_fraction:", 0),
              0u);
    EXPECT_EQ(error_of("{ not json").rfind("<root>:", 0), 0u);
}

TEST(Config, ImpulseErrors) {
    const std::string base = kConstant;
    const auto with = [&](const std::string& imp) {
        return error_of(replaced(base, R"("delay")", "\"impulses\": " + imp + ", \"delay\""));
    };
    EXPECT_EQ(with(R"({"base_period": 1.0, "magnitude": -1.5})").rfind("impulses.magnitude:", 0), 0u);
    EXPECT_EQ(with(R"({"base_period": 1.0, "jitter": {"amplitude": 0.6, "frequency": 1}, "magnitude": 0.1})")
                  .rfind("impulses.jitter.amplitude:", 0),
              0u);
    EXPECT_EQ(with(R"({"magnitude": 0.1})").rfind("impulses.base_period:", 0), 0u);
    EXPECT_EQ(with(R"({"base_period": 0.005, "magnitude": 0.1})").rfind("integrator.dt_per_h:", 0), 0u);
}

TEST(Config, EveryShippedConfigValidates) {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(kConfigs)) {
        if (entry.path().extension() != ".json") continue;
        EXPECT_NO_THROW((void)load_config(entry.path())) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 5);
}

TEST(CmdCheck, ConstantPasses) {
    std::ostringstream out;
    EXPECT_EQ(cmd_check(kConfigs / "constant.json", out), kOk);
    EXPECT_NE(out.str().find("m_bar = 1.80967483607"), std::string::npos) << out.str();
    EXPECT_NE(out.str().find("M_bar = 1.80967483607"), std::string::npos);
}

TEST(CmdCheck, CounterexampleFails) {
    std::ostringstream out;
    EXPECT_EQ(cmd_check(kConfigs / "counterexample.json", out), kCheckFailed);
    EXPECT_NE(out.str().find("cond17_margin = -"), std::string::npos) << out.str();
    EXPECT_NE(out.str().find("cond17 = false"), std::string::npos);
}

TEST(CmdSimulate, ZeroHorizonWritesInitialData) {
    const auto dir = scratch("t0");
    EXPECT_EQ(cmd_simulate(kConfigs / "constant.json", "full_model", 0.0, dir / "x.csv"), kOk);
    EXPECT_EQ(read_file(dir / "x.csv").substr(0, 17), "t,x_1,x_2,is_jump");
    std::istringstream in(read_file(dir / "x.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2);
}

TEST(CmdSimulate, LogisticMinorantMatchesClosedForm) {
    const auto dir = scratch("logistic");
    ASSERT_EQ(cmd_simulate(kConfigs / "logistic.json", "logistic_minorant", std::nullopt, dir / "u.csv"), kOk);
    std::istringstream in(read_file(dir / "u.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,x_1,is_jump");
    int rows = 0;
    while (std::getline(in, line)) {
        double t = 0, u = 0;
        int jump = 0;
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%d", &t, &u, &jump), 3);
        ASSERT_NEAR(u, 1.0 / (1.0 + 0.5 * t), 1e-8) << t;
        ++rows;
    }
    EXPECT_EQ(rows, 1001);
}

TEST(CmdSimulate, FullModelReachesEquilibrium) {
    const auto dir = scratch("full");
    ASSERT_EQ(cmd_simulate(kConfigs / "constant.json", "full_model", std::nullopt, dir / "x.csv"), kOk);
    const auto text = read_file(dir / "x.csv");
    const auto last = text.substr(text.rfind('\n', text.size() - 2) + 1);
    double t = 0, xi = 0, xm = 0;
    ASSERT_EQ(std::sscanf(last.c_str(), "%lf,%lf,%lf", &t, &xi, &xm), 3);
    EXPECT_EQ(t, 300.0);
    EXPECT_NEAR(xm, 2.0 * std::exp(-0.1), 1e-4);
}

TEST(CmdSimulate, JumpsEmitTwoRows) {
    const auto dir = scratch("jumps");
    ASSERT_EQ(cmd_simulate(kConfigs / "impulsive.json", "full_model", 2.5, dir / "x.csv"), kOk);
    std::istringstream in(read_file(dir / "x.csv"));
    std::string line;
    int jump_rows = 0;
    while (std::getline(in, line))
        if (line.back() == '1') ++jump_rows;
    EXPECT_EQ(jump_rows, 6);  // t = 0, 1, 2
}

TEST(CmdSimulate, UnknownRhs) {
    const auto dir = scratch("bad_rhs");
    EXPECT_THROW((void)cmd_simulate(kConfigs / "constant.json", "bogus", std::nullopt, dir / "x.csv"), InvalidInput);
}

TEST(CmdAnalyze, PermanencePassesOnDemo) {
    const auto dir = scratch("perm");
    std::ostringstream out;
    EXPECT_EQ(cmd_analyze(kConfigs / "constant.json", "permanence", dir, out), kOk);
    EXPECT_NE(read_file(dir / "permanence_report.txt").find("pass = true"), std::string::npos);
}

TEST(CmdAnalyze, AttractivityWritesDecayCsv) {
    const auto dir = scratch("attr");
    std::ostringstream out;
    EXPECT_EQ(cmd_analyze(kConfigs / "constant.json", "attractivity", dir, out), kOk);
    EXPECT_NE(out.str().find("pairs = 8"), std::string::npos);
    EXPECT_NE(out.str().find("pass = true"), std::string::npos);
    EXPECT_EQ(read_file(dir / "attractivity_decay.csv").substr(0, 6), "t,gap\n");
}

TEST(CmdAnalyze, GatedRunIsInformational) {
    const auto dir = scratch("gate");
    std::ostringstream out;
    EXPECT_EQ(cmd_analyze(kConfigs / "counterexample.json", "attractivity", dir, out), kOk);
    EXPECT_NE(out.str().find("not applicable"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "attractivity_decay.csv"));
}

TEST(CmdAnalyze, IntegralIdentity) {
    const auto dir = scratch("integral");
    std::ostringstream out;
    EXPECT_EQ(cmd_analyze(kConfigs / "varying.json", "integral", dir, out), kOk);
    EXPECT_NE(out.str().find("pass = true"), std::string::npos) << out.str();
}

TEST(CmdAnalyze, AlmostPeriodsOfPeriodicScenario) {
    const auto dir = scratch("ap");
    std::ostringstream out;
    EXPECT_EQ(cmd_analyze(kConfigs / "periodic.json", "ap", dir, out), kOk);
    EXPECT_NE(out.str().find("almost_periods = 5,10"), std::string::npos) << out.str();
    EXPECT_TRUE(fs::exists(dir / "ap_candidates.csv"));
}

TEST(CmdAnalyze, UnknownWhich) {
    std::ostringstream out;
    EXPECT_THROW((void)cmd_analyze(kConfigs / "constant.json", "bogus", scratch("which"), out), InvalidInput);
}

TEST(Executable, ExitCodes) {
    const auto dir = scratch("exe");
    {
        std::ofstream bad(dir / "bad.json");
        bad << "{ \"coefficients\": ";
    }
    EXPECT_EQ(run_cli("check " + (kConfigs / "constant.json").string()), 0);
    EXPECT_EQ(run_cli("check " + (kConfigs / "counterexample.json").string()), 1);
    EXPECT_EQ(run_cli("check " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run_cli("check " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("analyze " + (kConfigs / "constant.json").string() + " --which bogus --out-dir " +
                      dir.string()),
              2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
}

TEST(Executable, NumericalFailureExitCode) {
    const auto dir = scratch("numfail");
    {
        std::ofstream cfg(dir / "sigma.json");
        cfg << R"({
  "coefficients": {"alpha": 1.0, "beta": 0.5, "gamma": 0.1},
  "delay": {"h": 1.0},
  "impulses": {"base_period": 1.0, "jitter": {"amplitude": 0.3, "frequency": 1.0},
               "magnitude": {"base": 0.5, "variation": {"amplitude": 0.4, "frequency": 0.01}}},
  "initial": {"psi": 1.0},
  "integrator": {"dt_per_h": 100, "t_end": 10.0},
  "analysis": {"sigma_horizons": [10, 20, 40], "sigma_tol": 1e-6}
})";
    }
    EXPECT_EQ(run_cli("check " + (dir / "sigma.json").string()), 3);
}

TEST(Executable, ByteIdenticalReruns) {
    const auto a = scratch("rerun_a");
    const auto b = scratch("rerun_b");
    const auto cfg = (kConfigs / "varying.json").string();
    ASSERT_EQ(run_cli("simulate " + cfg + " --rhs full_model --t-end 50 --out " + (a / "x.csv").string()), 0);
    ASSERT_EQ(run_cli("simulate " + cfg + " --rhs full_model --t-end 50 --out " + (b / "x.csv").string()), 0);
    EXPECT_EQ(read_file(a / "x.csv"), read_file(b / "x.csv"));
    ASSERT_EQ(run_cli("analyze " + (kConfigs / "constant.json").string() + " --which attractivity --out-dir " + a.string()), 0);
    ASSERT_EQ(run_cli("analyze " + (kConfigs / "constant.json").string() + " --which attractivity --out-dir " + b.string()), 0);
    EXPECT_EQ(read_file(a / "attractivity_decay.csv"), read_file(b / "attractivity_decay.csv"));
}
