#include "giantatom/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace giantatom {

namespace {

constexpr double kPi = std::numbers::pi;

void require_in_band(double omega, const SystemParams& params) {
    if (!(std::abs(omega) < params.band_edge())) {
        throw std::domain_error("spectral density evaluated outside the open band: omega = " +
                                std::to_string(omega));
    }
}

// i^n for integer n >= 0.
Complex i_power(int n) {
    switch (n % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace

void SystemParams::validate() const {
    if (!(hopping > 0.0)) throw std::invalid_argument("hopping must be positive");
    if (!(g0 >= 0.0)) throw std::invalid_argument("g0 must be non-negative");
    if (!std::isfinite(delta)) throw std::invalid_argument("delta must be finite");
    if (d < 1) throw std::invalid_argument("d must be at least 1");
    if (n_atoms != 1 && n_atoms != 2) throw std::invalid_argument("n_atoms must be 1 or 2");
    if (n_atoms == 2 && z < 1) throw std::invalid_argument("z must be at least 1 for two atoms");
    const int gap = n_atoms == 2 ? z : 0;
    if (lattice_length < 2 * (d + gap) + 4) {
        throw std::invalid_argument("lattice_length must be at least 2(d + z) + 4");
    }
}

std::vector<std::vector<int>> SystemParams::coupling_offsets() const {
    if (n_atoms == 1) return {{0, d}};
    return {{0, d}, {d + z, 2 * d + z}};
}

int SystemParams::span() const { return n_atoms == 1 ? d : 2 * d + z; }

const char* to_string(Channel channel) {
    switch (channel) {
        case Channel::Single: return "single";
        case Channel::Even: return "even";
        case Channel::Odd: return "odd";
        case Channel::ProductDegenerate: return "product_degenerate";
    }
    return "unknown";
}

FormFactor::FormFactor(std::vector<Term> terms) {
    std::map<int, double> merged;
    for (const auto& t : terms) {
        if (t.order < 0) throw std::invalid_argument("negative Chebyshev order");
        merged[t.order] += t.weight;
    }
    for (const auto& [order, weight] : merged) {
        if (weight != 0.0) terms_.push_back({order, weight});
    }
}

int FormFactor::max_order() const { return terms_.empty() ? 0 : terms_.back().order; }

double FormFactor::operator()(double x) const {
    double sum = 0.0;
    for (const auto& t : terms_) sum += t.weight * chebyshev(t.order, x);
    return sum;
}

double FormFactor::derivative(double x) const {
    if (std::abs(x) > 1.0) throw std::domain_error("FormFactor::derivative outside [-1, 1]");
    // T_n'(x) = n U_{n-1}(x); U by recurrence.
    const int top = max_order();
    std::vector<double> u(static_cast<std::size_t>(std::max(top, 1)) + 1, 0.0);
    u[0] = 1.0;
    if (top >= 1) u[1] = 2.0 * x;
    for (int k = 2; k < top; ++k) u[k] = 2.0 * x * u[k - 1] - u[k - 2];
    double sum = 0.0;
    for (const auto& t : terms_) {
        if (t.order > 0) sum += t.weight * t.order * u[t.order - 1];
    }
    return sum;
}

double FormFactor::power_series(double r) const {
    double sum = 0.0;
    for (const auto& t : terms_) sum += t.weight * std::pow(r, t.order);
    return sum;
}

double FormFactor::power_series_derivative(double r) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
        if (t.order > 0) sum += t.weight * t.order * std::pow(r, t.order - 1);
    }
    return sum;
}

FormFactor form_factor(const SystemParams& params, Channel channel) {
    // |1 + e^{ikd}|^2 = 2 + 2 cos(kd) per atom, and the cross term between the
    // two atoms' site pairs gives cos(kz) + 2 cos(k(z+d)) + cos(k(z+2d)).
    std::vector<FormFactor::Term> terms{{0, 2.0}, {params.d, 2.0}};
    if (channel == Channel::Even || channel == Channel::Odd) {
        if (params.n_atoms != 2) throw std::invalid_argument("even/odd channels need two atoms");
        const double sign = channel == Channel::Even ? 1.0 : -1.0;
        terms.push_back({params.z, sign});
        terms.push_back({params.z + params.d, 2.0 * sign});
        terms.push_back({params.z + 2 * params.d, sign});
    }
    return FormFactor(std::move(terms));
}

std::vector<Channel> dynamical_channels(const SystemParams& params) {
    if (params.n_atoms == 1) return {Channel::Single};
    return {Channel::Even, Channel::Odd};
}

double dispersion(double k, const SystemParams& params) { return -2.0 * params.hopping * std::cos(k); }

double chebyshev(int n, double x) {
    if (n < 0) throw std::domain_error("chebyshev: negative order");
    if (std::abs(x) > 1.0) throw std::domain_error("chebyshev: |x| > 1");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double spectral_density(double omega, const SystemParams& params, Channel channel) {
    require_in_band(omega, params);
    const double h = params.hopping;
    const double root = std::sqrt((2.0 * h - omega) * (2.0 * h + omega));
    const FormFactor f = form_factor(params, channel);
    return params.g0 * params.g0 / kPi * f(-omega / (2.0 * h)) / root;
}

double spectral_density_j0(double omega, const SystemParams& params) {
    return spectral_density(omega, params, Channel::Single);
}

double spectral_density_j1(double omega, const SystemParams& params) {
    if (params.n_atoms != 2) throw std::invalid_argument("J1 requires two atoms");
    require_in_band(omega, params);
    return 0.5 * (spectral_density(omega, params, Channel::Even) -
                  spectral_density(omega, params, Channel::Odd));
}

Eigen::MatrixXd spectral_matrix(double omega, const SystemParams& params) {
    const double j0 = spectral_density_j0(omega, params);
    if (params.n_atoms == 1) return Eigen::MatrixXd::Constant(1, 1, j0);
    const double j1 = spectral_density_j1(omega, params);
    Eigen::MatrixXd m(2, 2);
    m << j0, j1, j1, j0;
    return m;
}

ChebyshevRule gauss_chebyshev(int n_nodes) {
    if (n_nodes < 1) throw std::invalid_argument("gauss_chebyshev: need at least one node");
    ChebyshevRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n_nodes));
    for (int k = 0; k < n_nodes; ++k) {
        rule.nodes[static_cast<std::size_t>(k)] = std::cos((k + 0.5) * kPi / n_nodes);
    }
    rule.weight = kPi / n_nodes;
    return rule;
}

Complex channel_kernel(double t, const SystemParams& params, Channel channel, KernelMethod method,
                       int quad_nodes) {
    const FormFactor f = form_factor(params, channel);
    const double g2 = params.g0 * params.g0;
    const double x = 2.0 * params.hopping * t;
    if (method == KernelMethod::Bessel) {
        Complex sum = 0.0;
        for (const auto& term : f.terms()) {
            sum += term.weight * i_power(term.order) * std::cyl_bessel_j(static_cast<double>(term.order), x);
        }
        return g2 * sum;
    }
    // omega = -2h cos(theta) maps the band weight onto the Chebyshev weight.
    const ChebyshevRule rule = gauss_chebyshev(quad_nodes);
    Complex sum = 0.0;
    for (double node : rule.nodes) sum += f(node) * std::polar(1.0, x * node);
    return g2 / kPi * rule.weight * sum;
}

Complex channel_kernel_derivative(double t, const SystemParams& params, Channel channel) {
    const FormFactor f = form_factor(params, channel);
    const double g2 = params.g0 * params.g0;
    const double h = params.hopping;
    const double x = 2.0 * h * t;
    auto bessel = [x](int n) { return std::cyl_bessel_j(static_cast<double>(std::abs(n)), x) * ((n < 0 && (n % 2)) ? -1.0 : 1.0); };
    Complex sum = 0.0;
    for (const auto& term : f.terms()) {
        const double dj = 0.5 * (bessel(term.order - 1) - bessel(term.order + 1));
        sum += term.weight * i_power(term.order) * dj;
    }
    return g2 * 2.0 * h * sum;
}

Eigen::MatrixXcd memory_kernel(double t, const SystemParams& params, KernelMethod method, int quad_nodes) {
    if (t < 0.0) throw std::domain_error("memory_kernel: negative time");
    if (params.n_atoms == 1) {
        return Eigen::MatrixXcd::Constant(1, 1, channel_kernel(t, params, Channel::Single, method, quad_nodes));
    }
    const Complex even = channel_kernel(t, params, Channel::Even, method, quad_nodes);
    const Complex odd = channel_kernel(t, params, Channel::Odd, method, quad_nodes);
    Eigen::MatrixXcd m(2, 2);
    m << 0.5 * (even + odd), 0.5 * (even - odd), 0.5 * (even - odd), 0.5 * (even + odd);
    return m;
}

}  // namespace giantatom
