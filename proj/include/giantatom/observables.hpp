#pragma once

#include <Eigen/Dense>

#include "giantatom/model.hpp"

namespace giantatom {

/// Two-atom density matrix over the basis {|ee>, |eg>, |ge>, |gg>}.
struct TwoQubitState {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
};

/// Atomic state after tracing out the field from
/// (c1 |eg> + c2 |ge>) |vac> + |gg> |one photon>.
/// Throws std::invalid_argument when |c1|^2 + |c2|^2 > 1 + 1e-9.
TwoQubitState reduced_density_matrix(Complex c1, Complex c2);

/// Wootters concurrence max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)),
/// l_i the decreasing eigenvalues of rho (sy x sy) rho* (sy x sy).
double concurrence(const TwoQubitState& state);

}  // namespace giantatom
