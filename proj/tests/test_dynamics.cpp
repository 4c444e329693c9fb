#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "giantatom/dynamics.hpp"

using namespace giantatom;
using std::numbers::pi;

namespace {

SystemParams atoms(int n, double delta, double g0, int d, int z = 1) {
    SystemParams p;
    p.n_atoms = n;
    p.delta = delta;
    p.g0 = g0;
    p.d = d;
    p.z = z;
    return p;
}

double max_gap(const Trajectory& a, const Trajectory& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
        for (int n = 0; n < a.n_atoms(); ++n) worst = std::max(worst, std::abs(a.population(i, n) - b.population(i, n)));
    }
    return worst;
}

}  // namespace

TEST_CASE("decoupled atoms precess freely") {
    const SystemParams p = atoms(1, 0.7, 0.0, 2);
    const Eigen::VectorXcd c0 = first_atom_excited(p);
    for (const Trajectory& tr : {solve_volterra(p, c0, 20.0, 0.01), solve_ww(p, c0, 20.0, 0.01), evolve_lattice(p, c0, 20.0, 0.01)}) {
        for (Eigen::Index i = 0; i < tr.size(); i += 50) {
            const double t = tr.times[static_cast<std::size_t>(i)];
            CHECK(std::abs(tr.amplitudes(i, 0) - std::polar(1.0, -0.7 * t)) < 1e-10);
        }
    }
}

TEST_CASE("short-time loss is quadratic") {
    // |c|^2 = 1 - G(0) t^2 + O(t^4) with G(0) = 2 g0^2.
    for (int d : {1, 2, 5}) {
        const SystemParams p = atoms(1, 0.3, 0.5, d);
        const Trajectory tr = solve_volterra(p, first_atom_excited(p), 0.01, 0.0005);
        const double t = tr.times.back();
        CHECK(t == doctest::Approx(0.01));
        CHECK(std::abs(tr.population(tr.size() - 1, 0) - (1.0 - 2.0 * 0.25 * t * t)) < 1e-8);
    }
}

TEST_CASE("Volterra stepper is second order") {
    for (const SystemParams& p : {atoms(1, -0.6, 1.2, 1), atoms(2, 0.36, 0.6, 3, 3)}) {
        const Eigen::VectorXcd c0 = first_atom_excited(p);
        const Trajectory a = solve_volterra(p, c0, 10.0, 0.04);
        const Trajectory b = solve_volterra(p, c0, 10.0, 0.02);
        const Trajectory c = solve_volterra(p, c0, 10.0, 0.01);
        double e1 = 0.0, e2 = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            for (int n = 0; n < p.n_atoms; ++n) {
                e1 = std::max(e1, std::abs(a.amplitudes(i, n) - b.amplitudes(2 * i, n)));
                e2 = std::max(e2, std::abs(b.amplitudes(2 * i, n) - c.amplitudes(4 * i, n)));
            }
        }
        CHECK(e1 / e2 >= 3.5);
        CHECK(e1 / e2 <= 4.5);
    }
}

TEST_CASE("quadrature and Bessel kernels give the same trajectory") {
    const SystemParams p = atoms(2, 0.2, 0.7, 2, 3);
    const Eigen::VectorXcd c0 = first_atom_excited(p);
    const Trajectory a = solve_volterra(p, c0, 10.0, 0.01);
    const Trajectory b = solve_volterra(p, c0, 10.0, 0.01, {KernelMethod::Quadrature, 2000});
    CHECK((a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("lattice evolution is unitary") {
    const SystemParams p = atoms(2, 0.36, 0.6, 3, 3);
    const LatticeOracle oracle(p);
    CHECK(oracle.dimension() == 802);
    CHECK((oracle.hamiltonian() - oracle.hamiltonian().transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXcd c0 = first_atom_excited(p);
    for (double t : {0.0, 1.3, 47.0, 150.0}) CHECK(std::abs(oracle.state_at(t, c0).squaredNorm() - 1.0) < 1e-10);
}

TEST_CASE("lattice sites are centred") {
    const SystemParams p = atoms(2, 0.0, 0.6, 3, 3);
    const LatticeOracle oracle(p);
    const int first = oracle.first_site();
    const int last = first + p.span();
    CHECK(std::abs(first - (p.lattice_length - 1 - last)) <= 1);
    CHECK(oracle.hamiltonian()(0, oracle.site_index(first)) == doctest::Approx(0.6));
    CHECK(oracle.hamiltonian()(1, oracle.site_index(first + 6)) == doctest::Approx(0.6));
    CHECK(oracle.hamiltonian()(oracle.site_index(10), oracle.site_index(11)) == doctest::Approx(-1.0));
    CHECK(oracle.reflection_time() == doctest::Approx((400.0 - 9.0) / 2.0));
}

TEST_CASE("lattice warns past the reflection time") {
    SystemParams p = atoms(1, 0.0, 0.5, 1);
    p.lattice_length = 40;
    const Trajectory tr = evolve_lattice(p, first_atom_excited(p), 30.0, 0.1);
    CHECK(!tr.warnings.empty());
    const Trajectory ok = evolve_lattice(p, first_atom_excited(p), 5.0, 0.1);
    CHECK(ok.warnings.empty());
}

TEST_CASE("Volterra agrees with the lattice oracle") {
    for (const SystemParams& p : {atoms(1, -0.6, 1.2, 1), atoms(2, -1.0, 0.6, 3, 3)}) {
        const Eigen::VectorXcd c0 = first_atom_excited(p);
        const Trajectory v = solve_volterra(p, c0, 60.0, 0.005);
        const Trajectory l = evolve_lattice(p, c0, 60.0, 0.005);
        CHECK(max_gap(v, l) < 1e-3);
    }
}

TEST_CASE("Wigner-Weisskopf long-time limit") {
    CHECK(ww_long_time_population(atoms(1, 0.0, 0.8, 2)) == doctest::Approx(std::exp(-1.28)).epsilon(1e-10));
    CHECK(ww_long_time_population(atoms(1, 0.3, 0.5, 6)) == doctest::Approx(std::exp(-6.0 * 0.25)).epsilon(1e-10));
    CHECK(ww_long_time_population(atoms(1, 0.0, 0.8, 3)) == 0.0);
    CHECK(ww_long_time_population(atoms(1, 0.0, 0.8, 4)) == 0.0);

    // The trajectory approaches the limit only like t^(-1/2) (band-edge oscillation),
    // so compare its late-window mean.
    const SystemParams p = atoms(1, 0.0, 0.8, 2);
    const Trajectory tr = solve_ww(p, first_atom_excited(p), 200.0, 0.01);
    double mean = 0.0;
    const Eigen::Index first = tr.index_at(150.0);
    for (Eigen::Index i = first; i < tr.size(); ++i) mean += tr.population(i, 0);
    mean /= static_cast<double>(tr.size() - first);
    CHECK(mean == doctest::Approx(std::exp(-1.28)).epsilon(2e-3));
    for (int d : {1, 3, 5}) {
        const SystemParams q = atoms(1, 0.0, 0.8, d);
        const Trajectory odd = solve_ww(q, first_atom_excited(q), 200.0, 0.01);
        CHECK(odd.population(odd.size() - 1, 0) < 1e-6);
    }
}

TEST_CASE("Born-Markov decay") {
    const SystemParams p = atoms(1, 0.0, 0.1, 1);
    const Trajectory tr = solve_markov(p, first_atom_excited(p), 50.0, 0.1);
    const double rate = 2.0 * pi * spectral_density_j0(0.0, p);
    for (Eigen::Index i = 0; i < tr.size(); i += 25) {
        CHECK(tr.population(i, 0) == doctest::Approx(std::exp(-rate * tr.times[static_cast<std::size_t>(i)])).epsilon(1e-12));
    }
    const SystemParams bic = atoms(1, 0.0, 0.5, 2);
    const Trajectory frozen = solve_markov(bic, first_atom_excited(bic), 50.0, 0.1);
    CHECK(frozen.population(frozen.size() - 1, 0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(solve_markov(atoms(1, 2.5, 0.5, 1), first_atom_excited(atoms(1, 2.5, 0.5, 1)), 1.0, 0.1), std::domain_error);
    CHECK_THROWS_AS(solve_markov(atoms(1, 1.9995, 0.5, 1), first_atom_excited(atoms(1, 1.9995, 0.5, 1)), 1.0, 0.1), std::domain_error);
}

TEST_CASE("weak coupling: exact and approximate solutions coincide") {
    const SystemParams p = atoms(1, 0.0, 0.05, 1);
    const Eigen::VectorXcd c0 = first_atom_excited(p);
    const Trajectory v = solve_volterra(p, c0, 50.0, 0.01);
    CHECK(max_gap(v, solve_ww(p, c0, 50.0, 0.01)) < 1e-2);
    CHECK(max_gap(v, solve_markov(p, c0, 50.0, 0.01)) < 1e-2);
}

TEST_CASE("steady state from the spectrum") {
    SUBCASE("no bound states gives complete decay") {
        const SystemParams p = atoms(1, -0.6, 0.4, 1);
        SpectrumResult empty;
        empty.params = p;
        const SteadyState none = steady_state(empty, first_atom_excited(p), p);
        CHECK(none.population(0, 123.0) == 0.0);
        CHECK(none.envelope[0].max == 0.0);
    }
    SUBCASE("three bound states oscillate at E and 2E") {
        const SystemParams p = atoms(1, 0.0, 0.8, 2);
        const SpectrumResult s = full_spectrum(p);
        const SteadyState ss = steady_state(s, first_atom_excited(p), p);
        const double e = s.bound_states.back().energy;
        std::vector<double> freqs;
        for (const auto& o : ss.oscillations[0]) freqs.push_back(o.frequency);
        std::sort(freqs.begin(), freqs.end());
        REQUIRE(freqs.size() == 2);
        CHECK(freqs[0] == doctest::Approx(e));
        CHECK(freqs[1] == doctest::Approx(2 * e));
    }
    SUBCASE("two-atom channel combination") {
        const SystemParams p = atoms(2, -1.0, 0.6, 3, 3);
        const SpectrumResult s = full_spectrum(p);
        const SteadyState ss = steady_state(s, first_atom_excited(p), p);
        // The product-state BIC feeds atom 1 only.
        const auto has = [](const std::vector<SteadyTerm>& terms, double e) {
            return std::any_of(terms.begin(), terms.end(), [e](const SteadyTerm& t) { return std::abs(t.energy - e) < 1e-9; });
        };
        CHECK(has(ss.terms[0], -1.0));
        CHECK(!has(ss.terms[1], -1.0));
        CHECK(ss.oscillations[0].size() == 3);
        CHECK(ss.oscillations[1].size() == 1);
    }
}

TEST_CASE("late-time dynamics follow the steady state") {
    // Envelopes rather than pointwise values: at strong coupling the stepper's O(dt^2)
    // phase drift on the fast beat shifts the oscillation but not its extent.
    for (const SystemParams& p : {atoms(1, -0.6, 0.4, 1), atoms(1, -0.6, 1.2, 1), atoms(1, -0.6, 2.7, 1), atoms(1, 0.0, 0.8, 2)}) {
        const Eigen::VectorXcd c0 = first_atom_excited(p);
        const SteadyState ss = steady_state(full_spectrum(p), c0, p);
        const Trajectory tr = solve_volterra(p, c0, 200.0, 0.005);
        // Both sides sampled on the same window, so finite-window averaging cancels.
        PopulationEnvelope num{1.0, 0.0, 0.0}, ref{1.0, 0.0, 0.0};
        const Eigen::Index first = tr.index_at(150.0);
        for (Eigen::Index i = first; i < tr.size(); ++i) {
            const double a = tr.population(i, 0), b = ss.population(0, tr.times[static_cast<std::size_t>(i)]);
            num = {std::min(num.min, a), num.mean + a, std::max(num.max, a)};
            ref = {std::min(ref.min, b), ref.mean + b, std::max(ref.max, b)};
        }
        CHECK(std::abs(num.min - ref.min) < 1e-3);
        CHECK(std::abs(num.max - ref.max) < 1e-3);
        CHECK(std::abs(num.mean - ref.mean) / static_cast<double>(tr.size() - first) < 1e-3);
        CHECK(std::abs(ref.max - ss.envelope[0].max) < 1e-2);
    }
}

TEST_CASE("stepper error at strong coupling halves twice per halving of dt") {
    const SystemParams p = atoms(1, -0.6, 2.7, 1);
    const Eigen::VectorXcd c0 = first_atom_excited(p);
    const SteadyState ss = steady_state(full_spectrum(p), c0, p);
    auto late_error = [&](double dt) {
        const Trajectory tr = solve_volterra(p, c0, 100.0, dt);
        double worst = 0.0;
        for (Eigen::Index i = tr.index_at(80.0); i < tr.size(); ++i) {
            worst = std::max(worst, std::abs(tr.population(i, 0) - ss.population(0, tr.times[static_cast<std::size_t>(i)])));
        }
        return worst;
    };
    const double coarse = late_error(0.01), fine = late_error(0.005);
    CHECK(coarse / fine > 3.0);
}

TEST_CASE("spectral peaks of a synthetic population") {
    Trajectory tr;
    tr.dt = 0.01;
    const int n = 40001;
    tr.amplitudes.resize(n, 1);
    for (int i = 0; i < n; ++i) {
        const double t = i * tr.dt;
        tr.times.push_back(t);
        tr.amplitudes(i, 0) = 0.5 * std::polar(1.0, -0.3 * t) + 0.3 * std::polar(1.0, -2.1 * t);
    }
    const auto peaks = population_peaks(tr, 0);
    REQUIRE(peaks.size() == 1);
    CHECK(std::abs(peaks[0].frequency - 1.8) < peak_bin_width(tr));
    CHECK(peaks[0].amplitude == doctest::Approx(0.3).epsilon(0.05));
    CHECK(peak_bin_width(tr) == doctest::Approx(2 * pi / 100.0).epsilon(1e-3));
}

TEST_CASE("input validation") {
    const SystemParams p = atoms(1, 0.0, 0.5, 1);
    Eigen::VectorXcd bad(1);
    bad << 0.5;
    CHECK_THROWS_AS(solve_volterra(p, bad, 1.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(solve_volterra(p, first_atom_excited(p), 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_volterra(p, first_atom_excited(p), 0.001, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(solve_volterra(atoms(2, 0, 0.5, 1), first_atom_excited(p), 1.0, 0.01), std::invalid_argument);
}
