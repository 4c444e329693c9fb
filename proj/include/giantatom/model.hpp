#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace giantatom {

using Complex = std::complex<double>;

/// Physical parameters of one or two giant atoms on a coupled-resonator
/// waveguide. Energies are in units of the hopping `hopping` (h), times in 1/h.
struct SystemParams {
    double delta = 0.0;    ///< atom-resonator detuning
    double hopping = 1.0;  ///< nearest-neighbour resonator coupling h > 0
    double g0 = 0.0;       ///< per-site atom-resonator coupling
    int d = 1;             ///< separation of one atom's two coupling sites
    int z = 1;             ///< gap between the inner sites of atom 1 and atom 2
    int n_atoms = 1;
    int lattice_length = 800;

    static constexpr int kSitesPerAtom = 2;

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const;

    /// Coupling-site offsets per atom (non-braided layout):
    /// atom 1 at {0, d}, atom 2 at {d+z, 2d+z}.
    std::vector<std::vector<int>> coupling_offsets() const;

    /// Distance between the outermost coupling sites.
    int span() const;

    double band_edge() const { return 2.0 * hopping; }
};

/// Branch of the eigen-equation. `Single` is the one-atom equation Y(E) = E,
/// `Even`/`Odd` are the symmetric/antisymmetric two-atom channels and
/// `ProductDegenerate` marks the pair of degenerate product-state BICs, which
/// share the single-atom density.
enum class Channel { Single, Even, Odd, ProductDegenerate };

const char* to_string(Channel channel);

/// Numerator of a channel's spectral density as a Chebyshev series
/// F(x) = sum_n c_n T_n(x), with x = -omega / 2h, so that
///   J(omega) = (g0^2 / pi) F(-omega/2h) / sqrt(4h^2 - omega^2).
/// The coefficients are small integers; orders may repeat and are merged.
class FormFactor {
public:
    struct Term {
        int order;
        double weight;
    };

    FormFactor() = default;
    explicit FormFactor(std::vector<Term> terms);

    const std::vector<Term>& terms() const { return terms_; }
    int max_order() const;

    /// F(x) on [-1, 1].
    double operator()(double x) const;
    /// dF/dx on [-1, 1], via the Chebyshev derivative identity in angle form.
    double derivative(double x) const;

    /// P(r) = sum_n c_n r^n and its derivative; the power-series form used by
    /// the out-of-band level shift.
    double power_series(double r) const;
    double power_series_derivative(double r) const;

private:
    std::vector<Term> terms_;
};

/// Form factor for a channel; `ProductDegenerate` maps to the single-atom one.
FormFactor form_factor(const SystemParams& params, Channel channel);

/// Channels carrying the eigen-equation for `params.n_atoms`.
std::vector<Channel> dynamical_channels(const SystemParams& params);

double dispersion(double k, const SystemParams& params);

/// T_n(x) by three-term recurrence; std::domain_error for |x| > 1.
double chebyshev(int n, double x);

/// J0(omega); std::domain_error at |omega| >= 2h.
double spectral_density_j0(double omega, const SystemParams& params);
/// J1(omega) (two atoms only); std::domain_error at |omega| >= 2h.
double spectral_density_j1(double omega, const SystemParams& params);
/// J0, J0 + J1 or J0 - J1 depending on the channel.
double spectral_density(double omega, const SystemParams& params, Channel channel);

/// n_atoms x n_atoms matrix J(omega).
Eigen::MatrixXd spectral_matrix(double omega, const SystemParams& params);

/// Gauss-Chebyshev (first kind) rule: integral_0^pi f(cos theta) dtheta is
/// approximated by weight * sum_k f(nodes[k]). Exact for polynomials in
/// cos theta of degree < 2 * nodes.size().
struct ChebyshevRule {
    std::vector<double> nodes;
    double weight = 0.0;
};

ChebyshevRule gauss_chebyshev(int n_nodes);

enum class KernelMethod { Bessel, Quadrature };

constexpr int kDefaultQuadratureNodes = 2000;

/// Channel memory kernel G_c(t) = integral J_c(omega) exp(-i omega t) domega.
Complex channel_kernel(double t, const SystemParams& params, Channel channel,
                       KernelMethod method = KernelMethod::Bessel,
                       int quad_nodes = kDefaultQuadratureNodes);

/// dG_c/dt, Bessel closed form.
Complex channel_kernel_derivative(double t, const SystemParams& params, Channel channel);

/// Full n_atoms x n_atoms correlation matrix G(t).
Eigen::MatrixXcd memory_kernel(double t, const SystemParams& params,
                               KernelMethod method = KernelMethod::Bessel,
                               int quad_nodes = kDefaultQuadratureNodes);

}  // namespace giantatom
