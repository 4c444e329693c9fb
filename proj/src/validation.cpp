#include "giantatom/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "giantatom/dynamics.hpp"
#include "giantatom/observables.hpp"
#include "giantatom/spectrum.hpp"

namespace giantatom {

namespace {

CheckResult at_most(std::string suite, std::string check, double measured, double tolerance) {
    return {std::move(suite), std::move(check), measured, tolerance, measured <= tolerance};
}

double max_population_gap(const Trajectory& a, const Trajectory& b, double t_end) {
    double worst = 0.0;
    const auto n = std::min(a.size(), b.size());
    for (Eigen::Index i = 0; i < n && a.times[static_cast<std::size_t>(i)] <= t_end + 1e-12; ++i) {
        for (int atom = 0; atom < a.n_atoms(); ++atom) {
            worst = std::max(worst, std::abs(a.population(i, atom) - b.population(i, atom)));
        }
    }
    return worst;
}

}  // namespace

std::vector<CheckResult> run_validation(const RunConfig& config) {
    const SystemParams& p = config.params;
    std::vector<CheckResult> out;

    {
        double worst = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double t = 0.5 * i;
            const Eigen::MatrixXcd a = memory_kernel(t, p, KernelMethod::Bessel);
            const Eigen::MatrixXcd b = memory_kernel(t, p, KernelMethod::Quadrature, config.numerics.quad_nodes);
            worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
        }
        out.push_back(at_most("model", "kernel_bessel_vs_quadrature", worst, 1e-10));
    }
    {
        double worst = 0.0;
        const int samples = 10000;
        const double edge = p.band_edge();
        for (int i = 0; i < samples; ++i) {
            const double w = -edge + 2.0 * edge * (i + 0.5) / samples;
            const Eigen::MatrixXd j = spectral_matrix(w, p);
            const double asym = (j - j.transpose()).cwiseAbs().maxCoeff();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
            const double scale = std::max(1e-300, j.cwiseAbs().maxCoeff());
            worst = std::max({worst, asym / scale, -es.eigenvalues().minCoeff() / scale});
        }
        out.push_back(at_most("model", "spectral_matrix_psd", worst, 1e-12));
    }

    const SpectrumResult spectrum = full_spectrum(p, config.spectrum);
    {
        double worst = 0.0;
        for (const auto& bs : spectrum.bound_states) {
            if (bs.kind != BoundClass::BOC || !bs.resolved) continue;
            worst = std::max(worst, std::abs(level_shift(bs.energy, bs.channel, p) - bs.energy));
        }
        out.push_back(at_most("spectrum", "boc_root_residual", worst, 1e-9));
    }
    {
        int violations = 0;
        const double edge = p.band_edge();
        for (Channel ch : dynamical_channels(p)) {
            for (double dir : {1.0, -1.0}) {
                double prev = 0.0;
                for (int i = 0; i <= 400; ++i) {
                    const double e = dir * (edge + 1e-6 * std::pow(1e7, i / 400.0));
                    const double f = level_shift(e, ch, p) - e;
                    // Y(E) - E decreases in E on both sides of the band.
                    const double g = dir * f;
                    if (i > 0 && !(g < prev)) ++violations;
                    prev = g;
                }
            }
        }
        out.push_back(at_most("spectrum", "level_shift_monotonic_violations", violations, 0.0));
    }
    {
        double worst_sum = 0.0;
        for (Channel ch : dynamical_channels(p)) {
            double sum = 0.0;
            for (const auto& bs : spectrum.bound_states) {
                if (bs.channel == ch || bs.channel == Channel::ProductDegenerate) sum += bs.residue.real();
            }
            worst_sum = std::max(worst_sum, sum);
        }
        out.push_back(at_most("spectrum", "residue_sum", worst_sum, 1.0 + 1e-12));
    }

    const LatticeOracle oracle(p);
    {
        const auto isolated = oracle.isolated_energies(0.0);
        double worst = 0.0;
        for (const auto& bs : spectrum.bound_states) {
            if (bs.kind != BoundClass::BOC || std::abs(bs.energy) - p.band_edge() < 1e-3) continue;
            double best = 1e300;
            for (double e : isolated) best = std::min(best, std::abs(e - bs.energy));
            worst = std::max(worst, best);
        }
        out.push_back(at_most("spectrum", "boc_vs_lattice_eigenvalue", worst, 1e-4));
    }
    {
        const double t_end = std::min(50.0, oracle.reflection_time());
        const Eigen::VectorXcd c0 = config.initial_state();
        const Trajectory v = solve_volterra(p, c0, t_end, config.numerics.dt);
        const Trajectory l = evolve_lattice(oracle, c0, t_end, config.numerics.dt);
        out.push_back(at_most("dynamics", "volterra_vs_lattice_population", max_population_gap(v, l, t_end), 1e-3));
    }
    {
        const Eigen::VectorXcd c0 = config.initial_state();
        const double t_end = 10.0;
        const Trajectory coarse = solve_volterra(p, c0, t_end, 0.04);
        const Trajectory mid = solve_volterra(p, c0, t_end, 0.02);
        const Trajectory fine = solve_volterra(p, c0, t_end, 0.01);
        double e1 = 0.0, e2 = 0.0;
        for (Eigen::Index i = 0; i < coarse.size(); ++i) {
            for (int a = 0; a < p.n_atoms; ++a) {
                e1 = std::max(e1, std::abs(coarse.amplitudes(i, a) - mid.amplitudes(2 * i, a)));
                e2 = std::max(e2, std::abs(mid.amplitudes(2 * i, a) - fine.amplitudes(4 * i, a)));
            }
        }
        const double ratio = e2 > 0.0 ? e1 / e2 : 4.0;
        out.push_back({"dynamics", "volterra_richardson_ratio", ratio, 0.5, ratio >= 3.5 && ratio <= 4.5});
    }
    {
        std::mt19937_64 rng(20240917);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double r1 = uni(rng);
            const double r2 = uni(rng) * std::sqrt(1.0 - r1 * r1);
            const Complex c1 = std::polar(r1, 2.0 * std::numbers::pi * uni(rng));
            const Complex c2 = std::polar(r2, 2.0 * std::numbers::pi * uni(rng));
            const double c = concurrence(reduced_density_matrix(c1, c2));
            worst = std::max(worst, std::abs(c - 2.0 * std::abs(c1) * std::abs(c2)));
        }
        out.push_back(at_most("observables", "concurrence_closed_form", worst, 1e-10));
    }
    return out;
}

}  // namespace giantatom
