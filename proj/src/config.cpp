#include "giantatom/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace giantatom {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("invalid number for '" + std::string(key) + "': '" + s + "'");
    }
    return v;
}

int parse_int(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError("invalid integer for '" + std::string(key) + "': '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(std::string_view text, std::string_view separators) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (separators.find(ch) != std::string_view::npos) {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

Method parse_method(std::string_view name) {
    if (name == "volterra") return Method::Volterra;
    if (name == "lattice") return Method::Lattice;
    if (name == "ww") return Method::WW;
    if (name == "markov") return Method::Markov;
    throw ConfigError("unknown solver '" + std::string(name) + "'");
}

// Complex amplitudes as "re" or "(re,im)", separated by ';' or whitespace.
Eigen::VectorXcd parse_amplitudes(std::string_view text) {
    std::vector<Complex> values;
    for (const auto& item : split(text, "; \t")) {
        std::istringstream in(item);
        Complex v;
        in >> v;
        if (!in || !(in >> std::ws).eof()) throw ConfigError("invalid amplitude '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw ConfigError("c0 needs at least one amplitude");
    Eigen::VectorXcd out(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i];
    return out;
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

const char* to_string(Mode mode) {
    switch (mode) {
        case Mode::Spectrum: return "spectrum";
        case Mode::Dynamics: return "dynamics";
        case Mode::Steady: return "steady";
        case Mode::Sweep: return "sweep";
        case Mode::Validate: return "validate";
        case Mode::Figure: return "figure";
    }
    return "unknown";
}

Mode parse_mode(std::string_view name) {
    for (Mode m : {Mode::Spectrum, Mode::Dynamics, Mode::Steady, Mode::Sweep, Mode::Validate, Mode::Figure}) {
        if (name == to_string(m)) return m;
    }
    throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> out;
    if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
    if (stop < start) throw ConfigError("sweep range is empty");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) {
        double v = start + static_cast<double>(i) * step;
        if (parameter == "d" || parameter == "z") v = std::round(v);
        out.push_back(v);
    }
    return out;
}

Eigen::VectorXcd RunConfig::initial_state() const { return c0 ? *c0 : first_atom_excited(params); }

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(numerics.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(numerics.t_max >= numerics.dt)) throw ConfigError("t_max must be at least dt");
    if (numerics.quad_nodes < 16) throw ConfigError("quad_nodes must be at least 16");
    if (numerics.output_stride < 1) throw ConfigError("output_stride must be at least 1");
    if (jobs < 0) throw ConfigError("jobs must be non-negative");
    if (solvers.empty() && (mode == Mode::Dynamics || mode == Mode::Sweep)) throw ConfigError("no solvers selected");
    if (sweep) {
        const auto& p = sweep->parameter;
        if (p != "g0" && p != "delta" && p != "d" && p != "z") throw ConfigError("sweep parameter must be g0, delta, d or z");
        if (!(sweep->step > 0.0)) throw ConfigError("sweep step must be positive");
        if (sweep->stop < sweep->start) throw ConfigError("sweep range is empty");
        for (double v : sweep->values()) {
            try {
                with_sweep_value(params, p, v).validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("sweep value ") + format_number(v) + ": " + e.what());
            }
        }
    }
    if (mode == Mode::Sweep && !sweep) throw ConfigError("sweep mode needs sweep_param/start/stop/step");
    if (mode == Mode::Figure && preset.empty()) throw ConfigError("figure mode needs a preset name");
    if (c0) {
        if (c0->size() != params.n_atoms) throw ConfigError("c0 must list one amplitude per atom");
        if (std::abs(c0->squaredNorm() - 1.0) > 1e-9) throw ConfigError("c0 must be normalized");
    }
}

void apply_setting(RunConfig& config, std::string_view raw_key, std::string_view value) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    auto& p = config.params;
    auto ensure_sweep = [&config]() -> SweepSpec& {
        if (!config.sweep) config.sweep = SweepSpec{};
        return *config.sweep;
    };
    if (key == "delta") p.delta = parse_double(key, value);
    else if (key == "hopping" || key == "h") p.hopping = parse_double(key, value);
    else if (key == "g0") p.g0 = parse_double(key, value);
    else if (key == "d") p.d = parse_int(key, value);
    else if (key == "z") p.z = parse_int(key, value);
    else if (key == "n_atoms") p.n_atoms = parse_int(key, value);
    else if (key == "lattice_length") p.lattice_length = parse_int(key, value);
    else if (key == "dt") config.numerics.dt = parse_double(key, value);
    else if (key == "t_max") config.numerics.t_max = parse_double(key, value);
    else if (key == "quad_nodes") config.numerics.quad_nodes = parse_int(key, value);
    else if (key == "output_stride") config.numerics.output_stride = parse_int(key, value);
    else if (key == "kernel") {
        const std::string v = trim(value);
        if (v == "bessel") config.numerics.kernel = KernelMethod::Bessel;
        else if (v == "quadrature") config.numerics.kernel = KernelMethod::Quadrature;
        else throw ConfigError("kernel must be bessel or quadrature");
    } else if (key == "solvers") {
        config.solvers.clear();
        for (const auto& name : split(value, ", ")) {
            const Method m = parse_method(name);
            if (std::find(config.solvers.begin(), config.solvers.end(), m) == config.solvers.end()) config.solvers.push_back(m);
        }
    } else if (key == "sweep_param") ensure_sweep().parameter = trim(value);
    else if (key == "sweep_start") ensure_sweep().start = parse_double(key, value);
    else if (key == "sweep_stop") ensure_sweep().stop = parse_double(key, value);
    else if (key == "sweep_step") ensure_sweep().step = parse_double(key, value);
    else if (key == "c0") config.c0 = parse_amplitudes(value);
    else if (key == "out" || key == "output") config.output = trim(value);
    else if (key == "jobs") config.jobs = parse_int(key, value);
    else if (key == "mode") config.mode = parse_mode(trim(value));
    else if (key == "preset") config.preset = trim(value);
    else if (key == "edge_offset") config.spectrum.edge_offset = parse_double(key, value);
    else if (key == "resolve_tol") config.spectrum.resolve_tol = parse_double(key, value);
    else if (key == "bic_tol") config.spectrum.bic_tol = parse_double(key, value);
    else throw ConfigError("unknown configuration key '" + key + "'");
}

void apply_config_text(RunConfig& config, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        apply_setting(config, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    }
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_text(config, buf.str());
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& config) {
    const auto& p = config.params;
    std::vector<std::pair<std::string, std::string>> out{
        {"mode", to_string(config.mode)},
        {"delta", format_number(p.delta)},
        {"hopping", format_number(p.hopping)},
        {"g0", format_number(p.g0)},
        {"d", std::to_string(p.d)},
        {"z", std::to_string(p.z)},
        {"n_atoms", std::to_string(p.n_atoms)},
        {"lattice_length", std::to_string(p.lattice_length)},
        {"dt", format_number(config.numerics.dt)},
        {"t_max", format_number(config.numerics.t_max)},
        {"quad_nodes", std::to_string(config.numerics.quad_nodes)},
        {"kernel", config.numerics.kernel == KernelMethod::Bessel ? "bessel" : "quadrature"},
        {"output_stride", std::to_string(config.numerics.output_stride)},
        {"edge_offset", format_number(config.spectrum.edge_offset)},
        {"resolve_tol", format_number(config.spectrum.resolve_tol)},
        {"bic_tol", format_number(config.spectrum.bic_tol)},
    };
    std::string solvers;
    for (Method m : config.solvers) solvers += (solvers.empty() ? "" : ",") + std::string(to_string(m));
    out.emplace_back("solvers", solvers);
    if (config.sweep) {
        out.emplace_back("sweep_param", config.sweep->parameter);
        out.emplace_back("sweep_start", format_number(config.sweep->start));
        out.emplace_back("sweep_stop", format_number(config.sweep->stop));
        out.emplace_back("sweep_step", format_number(config.sweep->step));
    }
    if (config.c0) {
        std::string s;
        for (Eigen::Index i = 0; i < config.c0->size(); ++i) {
            const Complex v = (*config.c0)(i);
            s += (i ? ";" : "") + std::string("(") + format_number(v.real()) + "," + format_number(v.imag()) + ")";
        }
        out.emplace_back("c0", s);
    }
    if (!config.preset.empty()) out.emplace_back("preset", config.preset);
    return out;
}

SystemParams with_sweep_value(const SystemParams& params, const std::string& parameter, double value) {
    SystemParams p = params;
    if (parameter == "g0") p.g0 = value;
    else if (parameter == "delta") p.delta = value;
    else if (parameter == "d") p.d = static_cast<int>(std::lround(value));
    else if (parameter == "z") p.z = static_cast<int>(std::lround(value));
    else throw ConfigError("unknown sweep parameter '" + parameter + "'");
    return p;
}

}  // namespace giantatom
