#include "giantatom/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace giantatom {

namespace {

// sigma_y (x) sigma_y in the {ee, eg, ge, gg} basis.
Eigen::Matrix4cd spin_flip() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 3) = -1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 0) = -1.0;
    return m;
}

}  // namespace

TwoQubitState reduced_density_matrix(Complex c1, Complex c2) {
    const double excited = std::norm(c1) + std::norm(c2);
    if (excited > 1.0 + 1e-9) throw std::invalid_argument("atomic populations exceed one");
    TwoQubitState s;
    Eigen::Vector4cd phi(0.0, c1, c2, 0.0);
    s.rho = phi * phi.adjoint();
    s.rho(3, 3) = std::max(0.0, 1.0 - excited);
    return s;
}

constexpr double kEigenFloor = 1e-14;

double concurrence(const TwoQubitState& state) {
    const Eigen::Matrix4cd& rho = state.rho;
    const Eigen::Matrix4cd flip = spin_flip();
    const Eigen::Matrix4cd tilde = flip * rho.conjugate() * flip;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(rho * tilde, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("concurrence eigen-solve failed");
    std::array<double, 4> lambda{};
    for (int i = 0; i < 4; ++i) {
        const Complex ev = solver.eigenvalues()(i);
        if (std::abs(ev.imag()) > 1e-12) throw std::runtime_error("rho rho~ has a complex eigenvalue");
        if (ev.real() < -1e-10) throw std::runtime_error("rho rho~ has a negative eigenvalue");
        // Round-off eigenvalues sit near eps and would contribute sqrt(eps) to C.
        lambda[static_cast<std::size_t>(i)] = ev.real() > kEigenFloor ? ev.real() : 0.0;
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    const double c = std::sqrt(lambda[0]) - std::sqrt(lambda[1]) - std::sqrt(lambda[2]) - std::sqrt(lambda[3]);
    return std::max(0.0, c);
}

}  // namespace giantatom
