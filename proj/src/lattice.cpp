#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "giantatom/dynamics.hpp"

namespace giantatom {

LatticeOracle::LatticeOracle(const SystemParams& params) : params_(params) {
    params_.validate();
    const int length = params_.lattice_length;
    const int atoms = params_.n_atoms;
    const int dim = atoms + length;
    // Centre the coupling sites so both ends are equally far away.
    first_site_ = (length - 1 - params_.span()) / 2;

    hamiltonian_ = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < atoms; ++a) hamiltonian_(a, a) = params_.delta;
    for (int x = 0; x + 1 < length; ++x) {
        hamiltonian_(site_index(x), site_index(x + 1)) = -params_.hopping;
        hamiltonian_(site_index(x + 1), site_index(x)) = -params_.hopping;
    }
    const auto offsets = params_.coupling_offsets();
    for (int a = 0; a < atoms; ++a) {
        for (int off : offsets[static_cast<std::size_t>(a)]) {
            const int s = site_index(first_site_ + off);
            hamiltonian_(a, s) += params_.g0;
            hamiltonian_(s, a) += params_.g0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian_);
    if (solver.info() != Eigen::Success) throw std::runtime_error("lattice diagonalization failed");
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

double LatticeOracle::reflection_time() const {
    // Fastest group velocity is 2h sites per unit time.
    const double distance = 0.5 * params_.lattice_length - params_.span();
    return distance / (2.0 * params_.hopping);
}

Eigen::VectorXcd LatticeOracle::state_at(double t, const Eigen::VectorXcd& c0) const {
    const int atoms = params_.n_atoms;
    Eigen::VectorXcd overlap = vectors_.topRows(atoms).transpose().cast<Complex>() * c0;
    for (Eigen::Index m = 0; m < overlap.size(); ++m) overlap(m) *= std::polar(1.0, -energies_(m) * t);
    return vectors_.cast<Complex>() * overlap;
}

std::vector<double> LatticeOracle::isolated_energies(double margin) const {
    std::vector<double> out;
    const double edge = params_.band_edge();
    for (Eigen::Index m = 0; m < energies_.size(); ++m) {
        if (std::abs(energies_(m)) > edge - margin) out.push_back(energies_(m));
    }
    return out;
}

Trajectory evolve_lattice(const LatticeOracle& oracle, const Eigen::VectorXcd& c0, double t_max, double dt) {
    const SystemParams& params = oracle.params();
    if (c0.size() != params.n_atoms) throw std::invalid_argument("initial amplitude count != n_atoms");
    if (std::abs(c0.squaredNorm() - 1.0) > 1e-9) throw std::invalid_argument("initial amplitudes must be normalized");
    if (!(dt > 0.0) || !(t_max >= dt)) throw std::invalid_argument("need dt > 0 and t_max >= dt");
    const int steps = static_cast<int>(std::llround(t_max / dt));
    const int atoms = params.n_atoms;

    Trajectory tr;
    tr.method = Method::Lattice;
    tr.dt = dt;
    tr.times.resize(static_cast<std::size_t>(steps) + 1);
    tr.amplitudes = Eigen::MatrixXcd::Zero(steps + 1, atoms);
    if (t_max > oracle.reflection_time()) {
        tr.warnings.push_back("t_max = " + std::to_string(t_max) + " exceeds the boundary reflection time " +
                              std::to_string(oracle.reflection_time()) + "; increase lattice_length");
    }

    const Eigen::MatrixXd& v = oracle.eigenvectors();
    const Eigen::VectorXd& e = oracle.energies();
    const Eigen::Index dim = e.size();
    // weight(m, a) = <atom a | m> <m | psi(0)>
    const Eigen::VectorXcd overlap = v.topRows(atoms).transpose().cast<Complex>() * c0;
    Eigen::MatrixXcd weight(dim, atoms);
    for (int a = 0; a < atoms; ++a) weight.col(a) = v.row(a).transpose().cast<Complex>().cwiseProduct(overlap);

    Eigen::RowVectorXcd phase(dim);
    for (int i = 0; i <= steps; ++i) {
        const double t = i * dt;
        tr.times[static_cast<std::size_t>(i)] = t;
        for (Eigen::Index m = 0; m < dim; ++m) phase(m) = std::polar(1.0, -e(m) * t);
        tr.amplitudes.row(i) = phase * weight;
    }
    return tr;
}

Trajectory evolve_lattice(const SystemParams& params, const Eigen::VectorXcd& c0, double t_max, double dt) {
    return evolve_lattice(LatticeOracle(params), c0, t_max, dt);
}

}  // namespace giantatom
