#include "giantatom/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "giantatom/dynamics.hpp"
#include "giantatom/observables.hpp"
#include "giantatom/spectrum.hpp"
#include "giantatom/validation.hpp"

namespace giantatom {

namespace {

int worker_count(const RunConfig& config, std::size_t tasks) {
    unsigned n = config.jobs > 0 ? static_cast<unsigned>(config.jobs) : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

// Evaluates fn(i) for i in [0, count) on up to `jobs` threads; results keep index order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, int jobs, F&& fn) {
    std::vector<R> results(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (jobs <= 1 || count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

CsvTable with_metadata(const RunConfig& config, const std::string& schema) {
    CsvTable t;
    t.comments.push_back(std::string("giantatom ") + kArtifactVersion);
    t.comments.push_back("schema: " + schema);
    for (const auto& [k, v] : describe(config)) t.comments.push_back(k + " = " + v);
    return t;
}

std::vector<double> sweep_points(const RunConfig& config) {
    if (!config.sweep) return {std::nan("")};
    return config.sweep->values();
}

SystemParams point_params(const RunConfig& config, double value) {
    if (!config.sweep) return config.params;
    return with_sweep_value(config.params, config.sweep->parameter, value);
}

std::string sweep_cell(const RunConfig& config, double value) { return config.sweep ? format_number(value) : std::string(); }

Trajectory run_solver(Method method, const SystemParams& params, const Eigen::VectorXcd& c0, const Numerics& num) {
    switch (method) {
        case Method::Volterra: return solve_volterra(params, c0, num.t_max, num.dt, {num.kernel, num.quad_nodes});
        case Method::Lattice: return evolve_lattice(params, c0, num.t_max, num.dt);
        case Method::WW: return solve_ww(params, c0, num.t_max, num.dt);
        case Method::Markov: return solve_markov(params, c0, num.t_max, num.dt);
    }
    throw std::logic_error("unknown solver");
}

void report_near_misses(const SpectrumResult& s, std::ostream& log) {
    for (const auto& m : s.near_misses) {
        log << "note: BIC near-miss at E = " << format_number(m.energy) << " (" << to_string(m.channel)
            << "), residual " << format_number(m.residual) << '\n';
    }
}

// Late-window population statistics of a trajectory.
PopulationEnvelope late_envelope(const Trajectory& tr, int atom, double fraction) {
    const auto n = tr.size();
    const auto start = static_cast<Eigen::Index>(std::floor((1.0 - fraction) * static_cast<double>(n - 1)));
    PopulationEnvelope env{1e300, 0.0, 0.0};
    for (Eigen::Index i = start; i < n; ++i) {
        const double p = tr.population(i, atom);
        env.min = std::min(env.min, p);
        env.max = std::max(env.max, p);
        env.mean += p;
    }
    env.mean /= static_cast<double>(n - start);
    return env;
}

RunConfig derived(const RunConfig& base, Mode mode, const SystemParams& params) {
    RunConfig c = base;
    c.mode = mode;
    c.params = params;
    c.sweep.reset();
    c.preset.clear();
    c.c0.reset();
    return c;
}

RunConfig swept(RunConfig c, const std::string& parameter, double start, double stop, double step) {
    c.sweep = SweepSpec{parameter, start, stop, step};
    return c;
}

SystemParams make_params(int atoms, double delta, double g0, int d, int z = 1) {
    SystemParams p;
    p.n_atoms = atoms;
    p.delta = delta;
    p.g0 = g0;
    p.d = d;
    p.z = z;
    return p;
}

std::string tag(const std::string& name, double value) { return name + "_" + format_number(value); }

}  // namespace

CsvTable spectrum_table(const RunConfig& config, std::ostream& log) {
    CsvTable t = with_metadata(config, "spectrum-v1");
    t.header = {"sweep_value", "energy", "class", "type", "channel", "residue_re", "residue_im", "multiplicity", "resolved"};
    const auto points = sweep_points(config);
    const auto results = parallel_map<SpectrumResult>(points.size(), worker_count(config, points.size()), [&](std::size_t i) {
        return full_spectrum(point_params(config, points[i]), config.spectrum);
    });
    for (std::size_t i = 0; i < points.size(); ++i) {
        report_near_misses(results[i], log);
        for (const auto& bs : results[i].bound_states) {
            if (!bs.resolved) {
                log << "note: unresolved type-I BOC within " << format_number(config.spectrum.resolve_tol)
                    << " of the band edge at sweep value " << sweep_cell(config, points[i]) << '\n';
            }
            t.rows.push_back({sweep_cell(config, points[i]), format_number(bs.energy), to_string(bs.kind),
                              bs.boc_type ? to_string(*bs.boc_type) : "", to_string(bs.channel),
                              format_number(bs.residue.real()), format_number(bs.residue.imag()),
                              std::to_string(bs.multiplicity), bs.resolved ? "1" : "0"});
        }
    }
    return t;
}

CsvTable dynamics_table(const RunConfig& config, std::ostream& log) {
    CsvTable t = with_metadata(config, "dynamics-v1");
    const SystemParams& p = config.params;
    const Eigen::VectorXcd c0 = config.initial_state();
    const auto& solvers = config.solvers;
    const auto trajectories = parallel_map<Trajectory>(solvers.size(), worker_count(config, solvers.size()),
                                                       [&](std::size_t i) { return run_solver(solvers[i], p, c0, config.numerics); });
    t.header = {"t"};
    for (std::size_t s = 0; s < solvers.size(); ++s) {
        for (const auto& w : trajectories[s].warnings) log << "warning (" << to_string(solvers[s]) << "): " << w << '\n';
        const std::string name = to_string(solvers[s]);
        for (int a = 1; a <= p.n_atoms; ++a) {
            const std::string prefix = name + "_c" + std::to_string(a);
            t.header.insert(t.header.end(), {prefix + "_re", prefix + "_im", prefix + "_pop"});
        }
        if (p.n_atoms == 2) t.header.push_back(name + "_concurrence");
    }
    const Eigen::Index rows = trajectories.front().size();
    for (Eigen::Index i = 0; i < rows; i += config.numerics.output_stride) {
        std::vector<std::string> row{format_number(trajectories.front().times[static_cast<std::size_t>(i)])};
        for (const auto& tr : trajectories) {
            for (int a = 0; a < p.n_atoms; ++a) {
                const Complex c = tr.amplitudes(i, a);
                row.push_back(format_number(c.real()));
                row.push_back(format_number(c.imag()));
                row.push_back(format_number(std::norm(c)));
            }
            if (p.n_atoms == 2) row.push_back(format_number(concurrence(reduced_density_matrix(tr.amplitudes(i, 0), tr.amplitudes(i, 1)))));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable steady_table(const RunConfig& config, std::ostream& log) {
    CsvTable t = with_metadata(config, "steady-v1");
    const int atoms = config.params.n_atoms;
    t.header = {"sweep_value"};
    for (int a = 1; a <= atoms; ++a) {
        const std::string prefix = "c" + std::to_string(a);
        t.header.insert(t.header.end(), {prefix + "_population_min", prefix + "_population_mean", prefix + "_population_max"});
    }
    for (int a = 1; a <= atoms; ++a) t.header.push_back("c" + std::to_string(a) + "_frequencies");
    const auto points = sweep_points(config);
    struct Point {
        SpectrumResult spectrum;
        SteadyState steady;
    };
    const auto results = parallel_map<Point>(points.size(), worker_count(config, points.size()), [&](std::size_t i) {
        const SystemParams p = point_params(config, points[i]);
        Point pt;
        pt.spectrum = full_spectrum(p, config.spectrum);
        pt.steady = steady_state(pt.spectrum, config.c0 ? *config.c0 : first_atom_excited(p), p);
        return pt;
    });
    for (std::size_t i = 0; i < points.size(); ++i) {
        report_near_misses(results[i].spectrum, log);
        std::vector<std::string> row{sweep_cell(config, points[i])};
        for (const auto& env : results[i].steady.envelope) {
            row.insert(row.end(), {format_number(env.min), format_number(env.mean), format_number(env.max)});
        }
        for (const auto& osc : results[i].steady.oscillations) {
            std::string freqs;
            for (const auto& o : osc) {
                if (o.amplitude < 1e-12) continue;
                freqs += (freqs.empty() ? "" : ";") + format_number(o.frequency);
            }
            row.push_back(freqs);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable sweep_table(const RunConfig& config, std::ostream& log) {
    CsvTable t = with_metadata(config, "sweep-v1");
    const int atoms = config.params.n_atoms;
    t.header = {"sweep_value"};
    auto add_stats = [&](const std::string& source) {
        for (int a = 1; a <= atoms; ++a) {
            const std::string prefix = source + "_c" + std::to_string(a);
            t.header.insert(t.header.end(), {prefix + "_min", prefix + "_mean", prefix + "_max"});
        }
    };
    add_stats("steady");
    for (Method m : config.solvers) add_stats(to_string(m));

    const auto points = sweep_points(config);
    using Row = std::pair<std::vector<std::string>, std::vector<std::string>>;  // cells, log lines
    const auto rows = parallel_map<Row>(points.size(), worker_count(config, points.size()), [&](std::size_t i) {
        const SystemParams p = point_params(config, points[i]);
        const Eigen::VectorXcd c0 = config.c0 ? *config.c0 : first_atom_excited(p);
        Row r;
        r.first.push_back(sweep_cell(config, points[i]));
        const SteadyState ss = steady_state(full_spectrum(p, config.spectrum), c0, p);
        for (const auto& env : ss.envelope) r.first.insert(r.first.end(), {format_number(env.min), format_number(env.mean), format_number(env.max)});
        for (Method m : config.solvers) {
            try {
                const Trajectory tr = run_solver(m, p, c0, config.numerics);
                for (const auto& w : tr.warnings) r.second.push_back(std::string("warning (") + to_string(m) + "): " + w);
                for (int a = 0; a < atoms; ++a) {
                    const auto env = late_envelope(tr, a, 0.25);
                    r.first.insert(r.first.end(), {format_number(env.min), format_number(env.mean), format_number(env.max)});
                }
            } catch (const std::domain_error& e) {
                r.second.push_back(std::string("skipped ") + to_string(m) + " at " + format_number(points[i]) + ": " + e.what());
                for (int a = 0; a < atoms; ++a) r.first.insert(r.first.end(), {"nan", "nan", "nan"});
            }
        }
        return r;
    });
    for (const auto& r : rows) {
        for (const auto& line : r.second) log << line << '\n';
        t.rows.push_back(r.first);
    }
    return t;
}

CsvTable validate_table(const RunConfig& config, std::ostream& log, bool* all_passed) {
    CsvTable t = with_metadata(config, "validate-v1");
    t.header = {"suite", "check", "measured", "tolerance", "status"};
    bool ok = true;
    for (const auto& r : run_validation(config)) {
        ok = ok && r.passed;
        if (!r.passed) log << "FAIL " << r.suite << "/" << r.check << ": measured " << format_number(r.measured) << '\n';
        t.rows.push_back({r.suite, r.check, format_number(r.measured), format_number(r.tolerance), r.passed ? "pass" : "fail"});
    }
    if (all_passed) *all_passed = ok;
    return t;
}

std::vector<std::string> figure_presets() {
    return {"fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig2g", "fig2h", "fig2i", "fig3a", "fig3b",
            "fig4a", "fig4b", "fig4c", "fig5", "fig5a", "fig5b", "fig5c", "fig5d"};
}

std::vector<std::pair<std::string, RunConfig>> figure_plan(const std::string& preset, const RunConfig& base) {
    std::vector<std::pair<std::string, RunConfig>> plan;
    RunConfig dyn_base = base;
    dyn_base.numerics.output_stride = std::max(base.numerics.output_stride, 10);

    auto dynamics = [&](const std::string& stem, const SystemParams& p, std::vector<Method> solvers) {
        RunConfig c = derived(dyn_base, Mode::Dynamics, p);
        c.solvers = std::move(solvers);
        plan.emplace_back(stem, c);
    };
    auto spectrum = [&](const std::string& stem, const SystemParams& p, const std::string& param, double a, double b, double step) {
        plan.emplace_back(stem, swept(derived(base, Mode::Spectrum, p), param, a, b, step));
    };
    auto steady_and_sweep = [&](const std::string& stem, const SystemParams& p, const std::string& param, double a, double b,
                                double fine, double coarse) {
        plan.emplace_back(stem + "_steady", swept(derived(base, Mode::Steady, p), param, a, b, fine));
        RunConfig s = swept(derived(base, Mode::Sweep, p), param, a, b, coarse);
        s.solvers = {Method::Volterra};
        plan.emplace_back(stem + "_volterra", s);
    };

    // Single atom, Delta = -0.6h, d = 1, versus g0.
    const SystemParams fig2_abc = make_params(1, -0.6, 0.0, 1);
    // Single atom, g0 = 0.8h, versus Delta, for d = 3 and d = 2.
    const SystemParams fig2_def = make_params(1, 0.0, 0.8, 3);
    const SystemParams fig2_ghi = make_params(1, 0.0, 0.8, 2);
    const SystemParams fig5_base = make_params(2, 0.0, 0.6, 3, 3);

    if (preset == "fig2a") {
        for (double g : {0.4, 1.2, 2.7}) {
            SystemParams p = fig2_abc;
            p.g0 = g;
            dynamics("fig2a_" + tag("g0", g), p, {Method::Volterra});
        }
    } else if (preset == "fig2b") {
        spectrum("fig2b_spectrum", fig2_abc, "g0", 0.0, 3.0, 0.02);
    } else if (preset == "fig2c") {
        steady_and_sweep("fig2c", fig2_abc, "g0", 0.0, 3.0, 0.02, 0.1);
    } else if (preset == "fig2d") {
        spectrum("fig2d_spectrum", fig2_def, "delta", -2.0, 2.0, 0.04);
    } else if (preset == "fig2e") {
        steady_and_sweep("fig2e", fig2_def, "delta", -2.0, 2.0, 0.04, 0.2);
    } else if (preset == "fig2f") {
        for (double delta : {-1.0, 0.0, 0.5}) {
            SystemParams p = fig2_def;
            p.delta = delta;
            dynamics("fig2f_" + tag("delta", delta), p, {Method::Volterra, Method::WW});
        }
    } else if (preset == "fig2g") {
        spectrum("fig2g_spectrum", fig2_ghi, "delta", -2.0, 2.0, 0.04);
    } else if (preset == "fig2h") {
        steady_and_sweep("fig2h", fig2_ghi, "delta", -2.0, 2.0, 0.04, 0.2);
    } else if (preset == "fig2i") {
        for (double delta : {-0.5, 0.0, 0.5}) {
            SystemParams p = fig2_ghi;
            p.delta = delta;
            dynamics("fig2i_" + tag("delta", delta), p, {Method::Volterra, Method::WW});
        }
    } else if (preset == "fig3a" || preset == "fig3b") {
        const bool even = preset == "fig3a";
        const SystemParams p0 = make_params(1, 0.0, 0.8, even ? 2 : 1);
        spectrum(preset + "_spectrum", p0, "d", even ? 2.0 : 1.0, even ? 10.0 : 9.0, 1.0);
        for (int d = even ? 2 : 1; d <= 10; d += 2) {
            SystemParams p = p0;
            p.d = d;
            dynamics(preset + "_" + tag("d", d), p, {Method::Volterra});
        }
    } else if (preset == "fig4a" || preset == "fig4b") {
        const SystemParams p0 = preset == "fig4a" ? make_params(2, 0.16, 0.0, 3, 1) : make_params(2, 1.04, 0.0, 2, 1);
        spectrum(preset + "_spectrum", p0, "g0", 0.0, 1.5, 0.01);
        const std::vector<double> couplings = preset == "fig4a" ? std::vector<double>{0.4, 0.7, 1.0}
                                                                : std::vector<double>{0.2, 0.6, 1.0};
        for (double g : couplings) {
            SystemParams p = p0;
            p.g0 = g;
            dynamics(preset + "_" + tag("g0", g), p, {Method::Volterra});
        }
    } else if (preset == "fig4c") {
        const SystemParams p0 = make_params(2, 0.36, 0.6, 3, 1);
        spectrum("fig4c_spectrum", p0, "z", 1.0, 8.0, 1.0);
        for (int z : {1, 3, 5}) {
            SystemParams p = p0;
            p.z = z;
            dynamics("fig4c_" + tag("z", z), p, {Method::Volterra});
        }
    } else if (preset == "fig5" || preset == "fig5a" || preset == "fig5b" || preset == "fig5c" || preset == "fig5d") {
        if (preset == "fig5" || preset == "fig5a") spectrum(preset + "_spectrum", fig5_base, "delta", -2.0, 2.0, 0.04);
        if (preset != "fig5a") {
            for (double delta : {0.36, 1.0, -1.0}) {
                SystemParams p = fig5_base;
                p.delta = delta;
                dynamics(preset + "_" + tag("delta", delta), p, {Method::Volterra});
            }
        }
    } else {
        throw ConfigError("unknown figure preset '" + preset + "'");
    }
    return plan;
}

int run(const RunConfig& config, std::ostream& log) {
    try {
        config.validate();
        auto emit = [&](const CsvTable& table, const std::string& path) {
            if (path.empty()) {
                write_csv(std::cout, table);
            } else {
                write_csv_file(path, table);
            }
        };
        switch (config.mode) {
            case Mode::Spectrum: emit(spectrum_table(config, log), config.output); break;
            case Mode::Dynamics: emit(dynamics_table(config, log), config.output); break;
            case Mode::Steady: emit(steady_table(config, log), config.output); break;
            case Mode::Sweep: emit(sweep_table(config, log), config.output); break;
            case Mode::Validate: {
                bool ok = false;
                emit(validate_table(config, log, &ok), config.output);
                return ok ? kExitOk : kExitInvariant;
            }
            case Mode::Figure: {
                const std::string dir = config.output.empty() ? std::string("figures") : config.output;
                for (const auto& [stem, sub] : figure_plan(config.preset, config)) {
                    sub.validate();
                    const std::string path = (std::filesystem::path(dir) / (stem + ".csv")).string();
                    log << "writing " << path << '\n';
                    switch (sub.mode) {
                        case Mode::Spectrum: emit(spectrum_table(sub, log), path); break;
                        case Mode::Dynamics: emit(dynamics_table(sub, log), path); break;
                        case Mode::Steady: emit(steady_table(sub, log), path); break;
                        case Mode::Sweep: emit(sweep_table(sub, log), path); break;
                        default: throw std::logic_error("unexpected preset mode");
                    }
                }
                break;
            }
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::logic_error& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitInvariant;
    }
}

}  // namespace giantatom
