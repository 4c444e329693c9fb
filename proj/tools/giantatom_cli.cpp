#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "giantatom/config.hpp"
#include "giantatom/runner.hpp"

using namespace giantatom;

namespace {

struct Flags {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<double> dt;
    std::optional<double> t_max;
    std::optional<std::string> solvers;
    std::optional<int> quad_nodes;
    std::vector<std::string> settings;
    std::string preset;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "key = value config file");
    cmd->add_option("--out", f.out, "output CSV (directory for figure presets)");
    cmd->add_option("--jobs", f.jobs, "worker threads, 0 = all cores");
    cmd->add_option("--dt", f.dt, "time step in 1/h");
    cmd->add_option("--t-max", f.t_max, "final time in 1/h");
    cmd->add_option("--solvers", f.solvers, "comma list of volterra,lattice,ww,markov");
    cmd->add_option("--quad-nodes", f.quad_nodes, "Gauss-Chebyshev nodes for the quadrature kernel");
    cmd->add_option("--set", f.settings, "extra key=value setting (repeatable)");
}

RunConfig build_config(Mode mode, const Flags& f) {
    RunConfig config;
    if (!f.config_path.empty()) apply_config_file(config, f.config_path);
    config.mode = mode;
    for (const auto& s : f.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    if (f.out) config.output = *f.out;
    if (f.jobs) config.jobs = *f.jobs;
    if (f.dt) config.numerics.dt = *f.dt;
    if (f.t_max) config.numerics.t_max = *f.t_max;
    if (f.solvers) apply_setting(config, "solvers", *f.solvers);
    if (f.quad_nodes) config.numerics.quad_nodes = *f.quad_nodes;
    if (mode == Mode::Figure) config.preset = f.preset;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bound states and non-Markovian dynamics of giant atoms on a coupled-resonator waveguide"};
    app.require_subcommand(1);

    Flags flags;
    std::vector<std::pair<CLI::App*, Mode>> commands{
        {app.add_subcommand("spectrum", "bound-state energies and residues"), Mode::Spectrum},
        {app.add_subcommand("dynamics", "time evolution of the atomic amplitudes"), Mode::Dynamics},
        {app.add_subcommand("steady", "long-time populations from the bound states"), Mode::Steady},
        {app.add_subcommand("sweep", "steady state vs late-time solver statistics over a sweep"), Mode::Sweep},
        {app.add_subcommand("validate", "invariant checks with measured deviations"), Mode::Validate},
        {app.add_subcommand("figure", "regenerate the data behind a figure panel"), Mode::Figure},
    };
    for (auto& [cmd, mode] : commands) {
        add_common(cmd, flags);
        if (mode == Mode::Figure) cmd->add_option("preset", flags.preset, "preset name")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cerr, std::cerr);
        return kExitConfig;
    }

    for (auto& [cmd, mode] : commands) {
        if (!cmd->parsed()) continue;
        try {
            return run(build_config(mode, flags), std::cerr);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
    }
    return kExitConfig;
}
