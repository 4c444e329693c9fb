#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "giantatom/observables.hpp"

using namespace giantatom;

namespace {

// Basis order: ee, eg, ge, gg.
constexpr int kEG = 1, kGE = 2, kGG = 3;

}  // namespace

TEST_CASE("reduced density matrix examples") {
    const TwoQubitState eg = reduced_density_matrix(1.0, 0.0);
    CHECK(eg.rho(kEG, kEG) == Complex(1.0));
    CHECK(eg.rho.cwiseAbs().sum() == doctest::Approx(1.0));

    const double s = std::sqrt(0.5);
    const TwoQubitState bell = reduced_density_matrix(s, s);
    for (int i : {kEG, kGE}) {
        for (int j : {kEG, kGE}) CHECK(bell.rho(i, j).real() == doctest::Approx(0.5));
    }
    CHECK(std::abs(bell.rho(kGG, kGG)) < 1e-15);

    const TwoQubitState mixed = reduced_density_matrix(0.5, 0.5);
    CHECK(mixed.rho(kGG, kGG).real() == doctest::Approx(0.5));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(mixed.rho);
    int rank = 0;
    for (double ev : es.eigenvalues()) rank += ev > 1e-12;
    CHECK(rank == 2);
    CHECK(mixed.rho.row(0).cwiseAbs().sum() == 0.0);
    CHECK(mixed.rho.trace().real() == doctest::Approx(1.0));

    CHECK_THROWS_AS(reduced_density_matrix(0.8, 0.7), std::invalid_argument);
}

TEST_CASE("concurrence examples") {
    const double s = std::sqrt(0.5);
    CHECK(concurrence(reduced_density_matrix(s, s)) == doctest::Approx(1.0));
    CHECK(concurrence(reduced_density_matrix(s, -s)) == doctest::Approx(1.0));
    CHECK(concurrence(reduced_density_matrix(1.0, 0.0)) == doctest::Approx(0.0));
    CHECK(concurrence(reduced_density_matrix(0.0, 0.0)) == doctest::Approx(0.0));
}

TEST_CASE("concurrence closed form on random single-excitation states") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double r1 = uni(rng);
        const double r2 = uni(rng) * std::sqrt(1.0 - r1 * r1);
        const double a1 = 2.0 * std::numbers::pi * uni(rng), a2 = 2.0 * std::numbers::pi * uni(rng);
        const double c = concurrence(reduced_density_matrix(std::polar(r1, a1), std::polar(r2, a2)));
        CHECK(std::abs(c - 2.0 * r1 * r2) < 1e-10);
        CHECK(c <= r1 * r1 + r2 * r2 + 1e-12);
        const double rotated = concurrence(reduced_density_matrix(std::polar(r1, a1 + 0.4), std::polar(r2, a2 - 1.3)));
        CHECK(std::abs(rotated - c) < 1e-10);
    }
}

TEST_CASE("concurrence of a general Bell-diagonal state") {
    // Werner state p |Psi+><Psi+| + (1-p) I/4 has C = max(0, (3p - 1)/2).
    for (double p : {0.2, 1.0 / 3.0, 0.6, 0.9}) {
        TwoQubitState w;
        w.rho = Eigen::Matrix4cd::Identity() * ((1.0 - p) / 4.0);
        w.rho(kEG, kEG) += p / 2;
        w.rho(kGE, kGE) += p / 2;
        w.rho(kEG, kGE) += p / 2;
        w.rho(kGE, kEG) += p / 2;
        CHECK(concurrence(w) == doctest::Approx(std::max(0.0, (3 * p - 1) / 2)).epsilon(1e-9));
    }
}
