#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "giantatom/model.hpp"
#include "giantatom/spectrum.hpp"

namespace giantatom {

enum class Method { Volterra, Lattice, WW, Markov };

const char* to_string(Method method);

/// Excited-state amplitudes c_n(t) on a uniform time grid.
struct Trajectory {
    Method method = Method::Volterra;
    double dt = 0.0;
    std::vector<double> times;
    Eigen::MatrixXcd amplitudes;        // rows: time, cols: atom
    std::vector<std::string> warnings;  // non-fatal diagnostics (e.g. lattice reflection time)

    Eigen::Index size() const { return amplitudes.rows(); }
    int n_atoms() const { return static_cast<int>(amplitudes.cols()); }
    double population(Eigen::Index step, int atom) const { return std::norm(amplitudes(step, atom)); }
    /// Index of the first grid point with time >= t.
    Eigen::Index index_at(double t) const;
};

struct DynamicsOptions {
    KernelMethod kernel = KernelMethod::Bessel;
    int quad_nodes = kDefaultQuadratureNodes;
};

constexpr double kDefaultDt = 0.005;
constexpr double kDefaultTMax = 200.0;

/// Excitation on atom 1 only, field in vacuum.
Eigen::VectorXcd first_atom_excited(const SystemParams& params);

/// Exact amplitudes from the integro-differential equation
///   c'(t) + i Delta c(t) + integral_0^t G(t - s) c(s) ds = 0,
/// integrated with second-order product (trapezoidal) convolution weights.
/// Throws std::runtime_error when |c_n| exceeds 1 + 1e-6.
Trajectory solve_volterra(const SystemParams& params, const Eigen::VectorXcd& c0, double t_max, double dt,
                          const DynamicsOptions& options = {});

/// Wigner-Weisskopf (first Markov) amplitudes.
Trajectory solve_ww(const SystemParams& params, const Eigen::VectorXcd& c0, double t_max, double dt);

/// lim |c_WW(t)|^2 for one atom initially excited: exp(-2 integral J0/w^2) when
/// J0(0) = 0, otherwise zero.
double ww_long_time_population(const SystemParams& params);

/// Born-Markov amplitudes with decay pi J(Delta) and Lamb-shifted frequency.
/// std::domain_error unless Delta lies inside the band by more than 1e-3 h.
Trajectory solve_markov(const SystemParams& params, const Eigen::VectorXcd& c0, double t_max, double dt);

/// Exact diagonalization of the finite chain in the single-excitation sector.
class LatticeOracle {
public:
    explicit LatticeOracle(const SystemParams& params);

    const SystemParams& params() const { return params_; }
    int dimension() const { return static_cast<int>(energies_.size()); }
    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
    const Eigen::MatrixXd& hamiltonian() const { return hamiltonian_; }

    /// Basis index of atom n and of resonator `site` (0-based).
    int atom_index(int atom) const { return atom; }
    int site_index(int site) const { return params_.n_atoms + site; }
    /// Chain index of the first coupling site of atom 1.
    int first_site() const { return first_site_; }

    /// Time before the emitted wave front returns from the chain ends.
    double reflection_time() const;

    /// Full single-excitation state at time t from atomic initial amplitudes.
    Eigen::VectorXcd state_at(double t, const Eigen::VectorXcd& c0) const;

    /// Eigenvalues with |E| > 2h - margin.
    std::vector<double> isolated_energies(double margin) const;

private:
    SystemParams params_;
    int first_site_ = 0;
    Eigen::MatrixXd hamiltonian_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd vectors_;
};

Trajectory evolve_lattice(const SystemParams& params, const Eigen::VectorXcd& c0, double t_max, double dt);
Trajectory evolve_lattice(const LatticeOracle& oracle, const Eigen::VectorXcd& c0, double t_max, double dt);

struct SteadyTerm {
    double energy;
    Complex weight;
};

struct PopulationEnvelope {
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

struct Oscillation {
    double frequency;
    double amplitude;  // peak amplitude of the population component
};

/// Long-time amplitudes c_n(t) ~ sum_j w_j exp(-i E_j t) built from bound-state residues.
struct SteadyState {
    std::vector<std::vector<SteadyTerm>> terms;  // per atom, equal energies merged
    std::vector<PopulationEnvelope> envelope;    // per atom
    std::vector<std::vector<Oscillation>> oscillations;  // per atom, population frequencies

    Complex amplitude(int atom, double t) const;
    double population(int atom, double t) const { return std::norm(amplitude(atom, t)); }
};

SteadyState steady_state(const SpectrumResult& spectrum, const Eigen::VectorXcd& c0, const SystemParams& params);

struct SpectralPeak {
    double frequency;
    double amplitude;
};

/// Peaks of |c_n(t)|^2 over the final `fraction` of a trajectory, from a
/// Hann-windowed discrete Fourier transform evaluated on the FFT bin grid.
/// Amplitudes are rescaled to the height of the underlying cosine component.
std::vector<SpectralPeak> population_peaks(const Trajectory& trajectory, int atom, double fraction = 0.25,
                                           double min_amplitude = 1e-3, double max_frequency = 12.0);

/// FFT bin width 2 pi / T for the analysed window.
double peak_bin_width(const Trajectory& trajectory, double fraction = 0.25);

}  // namespace giantatom
