#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "giantatom/dynamics.hpp"
#include "giantatom/model.hpp"
#include "giantatom/spectrum.hpp"

namespace giantatom {

/// Raised for malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { Spectrum, Dynamics, Steady, Sweep, Validate, Figure };

const char* to_string(Mode mode);
Mode parse_mode(std::string_view name);

struct SweepSpec {
    std::string parameter;  // g0 | delta | d | z
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    std::vector<double> values() const;
};

struct Numerics {
    double dt = kDefaultDt;
    double t_max = kDefaultTMax;
    int quad_nodes = kDefaultQuadratureNodes;
    KernelMethod kernel = KernelMethod::Bessel;
    int output_stride = 1;  // dynamics CSV keeps every n-th step
};

struct RunConfig {
    Mode mode = Mode::Spectrum;
    SystemParams params;
    std::optional<SweepSpec> sweep;
    std::vector<Method> solvers{Method::Volterra};
    Numerics numerics;
    SpectrumOptions spectrum;
    std::optional<Eigen::VectorXcd> c0;  // defaults to the first atom excited
    std::string output;                  // file, or directory for figure presets
    int jobs = 0;                        // 0: hardware concurrency
    std::string preset;

    Eigen::VectorXcd initial_state() const;
    /// Throws ConfigError when mode-required fields are missing or inconsistent.
    void validate() const;
};

/// Apply one `key = value` setting. Throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Parse flat `key = value` text; `#` starts a comment.
void apply_config_text(RunConfig& config, std::string_view text);
void apply_config_file(RunConfig& config, const std::string& path);

/// Echo of every setting as (key, value), in a fixed order.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& config);

/// Copy of `params` with the swept parameter set to `value`.
SystemParams with_sweep_value(const SystemParams& params, const std::string& parameter, double value);

std::string format_number(double value);

}  // namespace giantatom
