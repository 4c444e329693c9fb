#include "giantatom/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace giantatom {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

int step_count(double t_max, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_max >= dt)) throw std::invalid_argument("t_max must be at least dt");
    return static_cast<int>(std::llround(t_max / dt));
}

void check_initial(const SystemParams& params, const Eigen::VectorXcd& c0) {
    params.validate();
    if (c0.size() != params.n_atoms) throw std::invalid_argument("initial amplitude count != n_atoms");
    if (std::abs(c0.squaredNorm() - 1.0) > 1e-9) throw std::invalid_argument("initial amplitudes must be normalized");
}

// Atomic amplitudes -> channel amplitudes (c1 + c2, c1 - c2) and back.
std::vector<Complex> to_channels(const SystemParams& params, const Eigen::VectorXcd& c) {
    if (params.n_atoms == 1) return {c(0)};
    return {c(0) + c(1), c(0) - c(1)};
}

Trajectory make_trajectory(Method method, const SystemParams& params, int steps, double dt) {
    Trajectory tr;
    tr.method = method;
    tr.dt = dt;
    tr.times.resize(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) tr.times[static_cast<std::size_t>(i)] = i * dt;
    tr.amplitudes = Eigen::MatrixXcd::Zero(steps + 1, params.n_atoms);
    return tr;
}

// Fill atomic amplitudes from per-channel series.
void from_channels(const SystemParams& params, const std::vector<std::vector<Complex>>& channels, Trajectory& tr) {
    const auto rows = tr.amplitudes.rows();
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (params.n_atoms == 1) {
            tr.amplitudes(i, 0) = channels[0][k];
        } else {
            tr.amplitudes(i, 0) = 0.5 * (channels[0][k] + channels[1][k]);
            tr.amplitudes(i, 1) = 0.5 * (channels[0][k] - channels[1][k]);
        }
    }
}

// Scalar Volterra integro-differential equation for one channel.
std::vector<Complex> volterra_channel(const SystemParams& params, Channel channel, Complex a0, int steps, double dt,
                                      const DynamicsOptions& options, double bound) {
    const std::size_t n = static_cast<std::size_t>(steps);
    // Kernel stored reversed so the convolution runs over ascending memory.
    // Works on b(t) = exp(i Delta t) c(t), so the kernel picks up exp(i Delta tau) and the
    // free precession is exact.
    std::vector<double> g_re(n + 1), g_im(n + 1);
    Complex g_zero = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double tau = static_cast<double>(k) * dt;
        const Complex g = channel_kernel(tau, params, channel, options.kernel, options.quad_nodes) * std::polar(1.0, params.delta * tau);
        if (k == 0) g_zero = g;
        g_re[n - k] = g.real();
        g_im[n - k] = g.imag();
    }
    std::vector<double> c_re(n + 1, 0.0), c_im(n + 1, 0.0);
    std::vector<Complex> c(n + 1);
    c[0] = a0;
    c_re[0] = a0.real();
    c_im[0] = a0.imag();

    const double half = 0.5 * dt;
    const Complex denom = 1.0 + half * half * g_zero;
    Complex conv = 0.0;  // convolution at the current step
    for (std::size_t step = 0; step < n; ++step) {
        const Complex force = -conv;
        // history part of the convolution at step + 1: dt (G_{m} c_0 / 2 + sum_{j=1}^{m-1} G_{m-j} c_j), m = step + 1
        const std::size_t m = step + 1;
        const std::size_t offset = n - m;  // g_*[offset + j] == G_{m-j}
        double s_re = 0.0, s_im = 0.0;
        for (std::size_t j = 1; j < m; ++j) {
            const double gr = g_re[offset + j], gi = g_im[offset + j];
            s_re += gr * c_re[j] - gi * c_im[j];
            s_im += gr * c_im[j] + gi * c_re[j];
        }
        const Complex g_m(g_re[offset], g_im[offset]);
        const Complex history = dt * (0.5 * g_m * c[0] + Complex(s_re, s_im));
        const Complex next = (c[step] + half * force - half * history) / denom;
        if (!(std::abs(next) <= bound + 1e-6)) {
            throw std::runtime_error("Volterra integration unstable at t = " + std::to_string(static_cast<double>(m) * dt));
        }
        c[m] = next;
        c_re[m] = next.real();
        c_im[m] = next.imag();
        conv = history + half * g_zero * next;
    }
    for (std::size_t k = 0; k <= n; ++k) c[k] *= std::polar(1.0, -params.delta * static_cast<double>(k) * dt);
    return c;
}

void check_bounded(const Trajectory& tr) {
    for (Eigen::Index i = 0; i < tr.amplitudes.rows(); ++i) {
        for (Eigen::Index a = 0; a < tr.amplitudes.cols(); ++a) {
            if (std::abs(tr.amplitudes(i, a)) > 1.0 + 1e-6) {
                throw std::runtime_error("amplitude exceeded unity at t = " + std::to_string(tr.times[static_cast<std::size_t>(i)]));
            }
        }
    }
}

}  // namespace

const char* to_string(Method method) {
    switch (method) {
        case Method::Volterra: return "volterra";
        case Method::Lattice: return "lattice";
        case Method::WW: return "ww";
        case Method::Markov: return "markov";
    }
    return "unknown";
}

Eigen::Index Trajectory::index_at(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12);
    return static_cast<Eigen::Index>(it - times.begin());
}

Eigen::VectorXcd first_atom_excited(const SystemParams& params) {
    Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(params.n_atoms);
    c0(0) = 1.0;
    return c0;
}

Trajectory solve_volterra(const SystemParams& params, const Eigen::VectorXcd& c0, double t_max, double dt,
                          const DynamicsOptions& options) {
    check_initial(params, c0);
    const int steps = step_count(t_max, dt);
    Trajectory tr = make_trajectory(Method::Volterra, params, steps, dt);
    const auto initial = to_channels(params, c0);
    const auto channels = dynamical_channels(params);
    const double bound = params.n_atoms == 1 ? 1.0 : std::sqrt(2.0);
    std::vector<std::vector<Complex>> series;
    for (std::size_t k = 0; k < channels.size(); ++k) {
        series.push_back(volterra_channel(params, channels[k], initial[k], steps, dt, options, bound));
    }
    from_channels(params, series, tr);
    check_bounded(tr);
    return tr;
}

Trajectory solve_ww(const SystemParams& params, const Eigen::VectorXcd& c0, double t_max, double dt) {
    check_initial(params, c0);
    const int steps = step_count(t_max, dt);
    Trajectory tr = make_trajectory(Method::WW, params, steps, dt);
    const auto initial = to_channels(params, c0);
    const auto channels = dynamical_channels(params);
    std::vector<std::vector<Complex>> series;
    for (std::size_t k = 0; k < channels.size(); ++k) {
        // K(t) = int_0^t A, A(t) = int_0^t G, each by the end-corrected trapezoid rule.
        std::vector<Complex> out(static_cast<std::size_t>(steps) + 1);
        Complex g = channel_kernel(0.0, params, channels[k]);
        Complex dg = channel_kernel_derivative(0.0, params, channels[k]);
        Complex a = 0.0, kk = 0.0;
        out[0] = initial[k];
        for (int i = 1; i <= steps; ++i) {
            const double t = i * dt;
            const Complex g1 = channel_kernel(t, params, channels[k]);
            const Complex dg1 = channel_kernel_derivative(t, params, channels[k]);
            const Complex a1 = a + 0.5 * dt * (g + g1) + dt * dt / 12.0 * (dg - dg1);
            kk += 0.5 * dt * (a + a1) + dt * dt / 12.0 * (g - g1);
            a = a1;
            g = g1;
            dg = dg1;
            out[static_cast<std::size_t>(i)] = std::exp(-kI * params.delta * t - kk) * initial[k];
        }
        series.push_back(std::move(out));
    }
    from_channels(params, series, tr);
    return tr;
}

double ww_long_time_population(const SystemParams& params) {
    if (params.g0 == 0.0) return 1.0;
    const FormFactor f = form_factor(params, Channel::Single);
    double scale = 0.0;
    for (const auto& t : f.terms()) scale += std::abs(t.weight);
    if (std::abs(f(0.0)) > 1e-12 * scale) return 0.0;
    // J0 vanishes quadratically at w = 0, so int J0 / w^2 is an ordinary integral.
    return std::exp(-2.0 * regular_second_moment(0.0, Channel::Single, params));
}

Trajectory solve_markov(const SystemParams& params, const Eigen::VectorXcd& c0, double t_max, double dt) {
    check_initial(params, c0);
    const double h = params.hopping;
    if (!(std::abs(params.delta) < 2.0 * h - 1e-3 * h)) {
        throw std::domain_error("Born-Markov solution needs Delta inside the band (|Delta| < 2h - 1e-3 h)");
    }
    const int steps = step_count(t_max, dt);
    Trajectory tr = make_trajectory(Method::Markov, params, steps, dt);
    const auto initial = to_channels(params, c0);
    const auto channels = dynamical_channels(params);
    std::vector<std::vector<Complex>> series;
    for (std::size_t k = 0; k < channels.size(); ++k) {
        const double rate = kPi * spectral_density(params.delta, params, channels[k]);
        const double shifted = level_shift_principal(params.delta, channels[k], params);
        const Complex exponent(-rate, -shifted);
        std::vector<Complex> out(static_cast<std::size_t>(steps) + 1);
        for (int i = 0; i <= steps; ++i) out[static_cast<std::size_t>(i)] = std::exp(exponent * (i * dt)) * initial[k];
        series.push_back(std::move(out));
    }
    from_channels(params, series, tr);
    return tr;
}

Complex SteadyState::amplitude(int atom, double t) const {
    Complex sum = 0.0;
    for (const auto& term : terms.at(static_cast<std::size_t>(atom))) sum += term.weight * std::polar(1.0, -term.energy * t);
    return sum;
}

SteadyState steady_state(const SpectrumResult& spectrum, const Eigen::VectorXcd& c0, const SystemParams& params) {
    if (c0.size() != params.n_atoms) throw std::invalid_argument("initial amplitude count != n_atoms");
    SteadyState ss;
    ss.terms.resize(static_cast<std::size_t>(params.n_atoms));

    auto add = [](std::vector<SteadyTerm>& list, double energy, Complex weight) {
        for (auto& t : list) {
            if (std::abs(t.energy - energy) < 1e-9) {
                t.weight += weight;
                return;
            }
        }
        list.push_back({energy, weight});
    };

    const auto initial = to_channels(params, c0);
    for (const auto& bs : spectrum.bound_states) {
        const Complex z = bs.residue;
        switch (bs.channel) {
            case Channel::Single:
                add(ss.terms[0], bs.energy, z * initial[0]);
                break;
            case Channel::Even:
                add(ss.terms[0], bs.energy, 0.5 * z * initial[0]);
                add(ss.terms[1], bs.energy, 0.5 * z * initial[0]);
                break;
            case Channel::Odd:
                add(ss.terms[0], bs.energy, 0.5 * z * initial[1]);
                add(ss.terms[1], bs.energy, -0.5 * z * initial[1]);
                break;
            case Channel::ProductDegenerate:
                // Each product state carries one atom's own single-atom BIC.
                for (int a = 0; a < params.n_atoms; ++a) add(ss.terms[static_cast<std::size_t>(a)], bs.energy, z * c0(a));
                break;
        }
    }

    for (auto& list : ss.terms) {
        std::erase_if(list, [](const SteadyTerm& t) { return std::abs(t.weight) < 1e-15; });
        std::sort(list.begin(), list.end(), [](const SteadyTerm& a, const SteadyTerm& b) { return a.energy < b.energy; });
    }

    for (std::size_t a = 0; a < ss.terms.size(); ++a) {
        const auto& list = ss.terms[a];
        PopulationEnvelope env;
        std::vector<Oscillation> osc;
        for (const auto& t : list) env.mean += std::norm(t.weight);
        for (std::size_t i = 0; i < list.size(); ++i) {
            for (std::size_t j = i + 1; j < list.size(); ++j) {
                const double f = std::abs(list[i].energy - list[j].energy);
                const double amp = 2.0 * std::abs(list[i].weight) * std::abs(list[j].weight);
                auto it = std::find_if(osc.begin(), osc.end(), [f](const Oscillation& o) { return std::abs(o.frequency - f) < 1e-9; });
                if (it != osc.end()) {
                    it->amplitude += amp;
                } else {
                    osc.push_back({f, amp});
                }
            }
        }
        std::sort(osc.begin(), osc.end(), [](const Oscillation& x, const Oscillation& y) { return x.frequency < y.frequency; });

        if (list.size() <= 1) {
            env.min = env.max = env.mean;
        } else if (list.size() == 2) {
            const double p = std::abs(list[0].weight), q = std::abs(list[1].weight);
            env.min = (p - q) * (p - q);
            env.max = (p + q) * (p + q);
        } else {
            // Sample over many periods of the slowest beat.
            const double f_min = osc.front().frequency;
            const double f_max = osc.back().frequency;
            const double span = std::min(100.0 * 2.0 * kPi / f_min, 1e6);
            const auto samples = static_cast<long>(std::clamp(span * f_max / 0.05, 2e4, 4e5));
            env.min = 1e300;
            env.max = 0.0;
            for (long s = 0; s <= samples; ++s) {
                const double t = span * static_cast<double>(s) / static_cast<double>(samples);
                Complex sum = 0.0;
                for (const auto& term : list) sum += term.weight * std::polar(1.0, -term.energy * t);
                const double p = std::norm(sum);
                env.min = std::min(env.min, p);
                env.max = std::max(env.max, p);
            }
        }
        ss.envelope.push_back(env);
        ss.oscillations.push_back(std::move(osc));
    }
    return ss;
}

double peak_bin_width(const Trajectory& trajectory, double fraction) {
    const auto n = trajectory.size();
    const auto start = static_cast<Eigen::Index>(std::floor((1.0 - fraction) * static_cast<double>(n - 1)));
    const auto m = n - start;
    return 2.0 * kPi / (static_cast<double>(m) * trajectory.dt);
}

std::vector<SpectralPeak> population_peaks(const Trajectory& trajectory, int atom, double fraction,
                                           double min_amplitude, double max_frequency) {
    const auto n = trajectory.size();
    const auto start = static_cast<Eigen::Index>(std::floor((1.0 - fraction) * static_cast<double>(n - 1)));
    const auto m = n - start;
    if (m < 8) throw std::invalid_argument("trajectory too short for spectral analysis");
    std::vector<double> window(static_cast<std::size_t>(m)), y(static_cast<std::size_t>(m));
    double wsum = 0.0, mean = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(m)));
        window[static_cast<std::size_t>(k)] = w;
        wsum += w;
        mean += w * trajectory.population(start + k, atom);
    }
    mean /= wsum;
    for (Eigen::Index k = 0; k < m; ++k) {
        y[static_cast<std::size_t>(k)] = window[static_cast<std::size_t>(k)] * (trajectory.population(start + k, atom) - mean);
    }
    const double bin = peak_bin_width(trajectory, fraction);
    const auto bins = static_cast<Eigen::Index>(std::min<double>(std::floor(max_frequency / bin), static_cast<double>(m / 2)));
    std::vector<double> magnitude(static_cast<std::size_t>(bins) + 2, 0.0);
    for (Eigen::Index b = 0; b <= bins + 1; ++b) {
        Complex acc = 0.0;
        const double omega = 2.0 * kPi * static_cast<double>(b) / static_cast<double>(m);
        for (Eigen::Index k = 0; k < m; ++k) acc += y[static_cast<std::size_t>(k)] * std::polar(1.0, -omega * static_cast<double>(k));
        magnitude[static_cast<std::size_t>(b)] = 2.0 * std::abs(acc) / wsum;
    }
    std::vector<SpectralPeak> peaks;
    for (Eigen::Index b = 1; b <= bins; ++b) {
        const double v = magnitude[static_cast<std::size_t>(b)];
        if (v >= min_amplitude && v >= magnitude[static_cast<std::size_t>(b - 1)] && v > magnitude[static_cast<std::size_t>(b + 1)]) {
            peaks.push_back({static_cast<double>(b) * bin, v});
        }
    }
    return peaks;
}

}  // namespace giantatom
