// natlift: verify natural lifted Kaehler structures on cotangent bundles.
//
//   natlift verify --scenario <file|preset> [--seed N] [--samples K]
//                  [--t-min A --t-max B] [--rho R] [--branch +|-] [--out report.json]
//   natlift sweep  --scenario <file|preset> --vary <c|rho|t_max|branch> --grid v1,v2,...
//   natlift list-presets
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "natlift/natlift.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

natlift::Scenario resolve_scenario(const std::string& name_or_path) {
    if (auto preset = natlift::find_preset(name_or_path)) return *preset;
    if (std::filesystem::exists(name_or_path)) return natlift::load_scenario_file(name_or_path);
    throw natlift::ConfigError("'" + name_or_path + "' is neither a preset name nor a readable file");
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<double> t_min, t_max, rho;
    std::optional<std::string> branch;

    void apply(natlift::Scenario& s) const {
        if (seed) s.seed = *seed;
        if (samples) s.points_per_t = *samples;
        if (t_min) s.t_min = *t_min;
        if (t_max) s.t_max = *t_max;
        if (rho) s.rho = *rho;
        if (branch) {
            if (s.lambda.kind != natlift::LambdaRule::Kind::case2)
                throw natlift::ConfigError("--branch applies only to case2 lambda rules");
            s.lambda.branch = natlift::parse_branch(*branch);
        }
        s.validate();
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw natlift::ConfigError("cannot write '" + path + "'");
    out << text;
}

void print_summary(const natlift::VerificationReport& r, std::ostream& os) {
    os << "scenario " << r.scenario.name << " (seed " << r.scenario.seed << ", " << r.points << " points)\n";
    for (const auto& c : r.checks)
        os << "  " << (c.diagnostic ? "info" : (c.pass() ? "pass" : "FAIL")) << "  " << c.name << "  max "
           << c.max_residual << "  tol " << c.tolerance << "\n";
    for (const auto& c : r.controls) {
        if (!c.applicable) continue;
        os << "  " << (c.pass() ? "pass" : "FAIL") << "  control " << c.name << " -> " << c.measure << "  effect "
           << c.max_effect << "  threshold " << c.threshold << "\n";
    }
    os << (r.pass() ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural lifted Kaehler structures on cotangent bundles of space forms"};
    app.require_subcommand(1);

    std::string scenario_arg;
    std::string out_path;
    bool timing = false;
    bool quiet = false;
    Overrides ov;
    std::uint64_t seed = 0;
    int samples = 0;
    double t_min = 0, t_max = 0, rho = 0;
    std::string branch;

    auto* verify = app.add_subcommand("verify", "Run every check of a scenario and emit a JSON report");
    verify->add_option("--scenario", scenario_arg, "Scenario JSON file or preset name")->required();
    auto* o_seed = verify->add_option("--seed", seed, "Random seed");
    auto* o_samples = verify->add_option("--samples", samples, "Points per t grid value")->check(CLI::PositiveNumber);
    auto* o_tmin = verify->add_option("--t-min", t_min, "Lower end of the t range");
    auto* o_tmax = verify->add_option("--t-max", t_max, "Upper end of the t range");
    auto* o_rho = verify->add_option("--rho", rho, "Einstein constant");
    auto* o_branch = verify->add_option("--branch", branch, "Case-II branch, + or -");
    verify->add_option("--out", out_path, "Write the JSON report here instead of stdout");
    verify->add_flag("--timing", timing, "Include wall time in the report (makes it run-dependent)");
    verify->add_flag("--quiet", quiet, "Suppress the human-readable summary on stderr");

    std::string vary;
    std::vector<std::string> grid;
    auto* sw = app.add_subcommand("sweep", "Rerun a scenario over a parameter grid and print a table");
    sw->add_option("--scenario", scenario_arg, "Scenario JSON file or preset name")->default_val("sphere-case1");
    sw->add_option("--vary", vary, "Parameter to vary: c, rho, t_max or branch")->required();
    sw->add_option("--grid", grid, "Comma-separated grid values")->required()->delimiter(',');
    sw->add_option("--out", out_path, "Write the table here instead of stdout");

    auto* list = app.add_subcommand("list-presets", "List the built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (*list) {
            for (const auto& s : natlift::presets()) std::cout << s.name << "\n";
            return kExitPass;
        }
        natlift::Scenario scenario = resolve_scenario(scenario_arg);
        if (*verify) {
            if (*o_seed) ov.seed = seed;
            if (*o_samples) ov.samples = samples;
            if (*o_tmin) ov.t_min = t_min;
            if (*o_tmax) ov.t_max = t_max;
            if (*o_rho) ov.rho = rho;
            if (*o_branch) ov.branch = branch;
            ov.apply(scenario);
            const natlift::VerificationReport report =
                timing ? natlift::run_scenario_timed(scenario) : natlift::run_scenario(scenario);
            const std::string text = report.dump() + "\n";
            if (out_path.empty())
                std::cout << text;
            else
                write_text(out_path, text);
            if (!quiet) print_summary(report, std::cerr);
            return report.pass() ? kExitPass : kExitFail;
        }
        if (*sw) {
            const auto rows = natlift::sweep(scenario, vary, grid);
            const std::string table = natlift::sweep_table(vary, rows);
            if (out_path.empty())
                std::cout << table;
            else
                write_text(out_path, table);
            for (const auto& r : rows)
                if (!r.report.pass()) return kExitFail;
            return kExitPass;
        }
    } catch (const natlift::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const natlift::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
