#include "giantatom/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace giantatom {

namespace {

constexpr double kPi = std::numbers::pi;

struct OutsideBand {
    double s;     // sqrt(E^2 - 4h^2)
    double rho;   // root of h r^2 + E r + h = 0 inside the unit disc
    double sign;  // sign of E
};

OutsideBand outside_band(double energy, const SystemParams& params) {
    const double h = params.hopping;
    const double a = std::abs(energy);
    if (!(a > 2.0 * h)) throw std::domain_error("level shift requires |E| > 2h");
    OutsideBand o;
    o.s = std::sqrt((a - 2.0 * h) * (a + 2.0 * h));
    o.sign = energy > 0.0 ? 1.0 : -1.0;
    o.rho = (-energy + o.sign * o.s) / (2.0 * h);
    return o;
}

double in_band_angle(double energy, const SystemParams& params) {
    const double h = params.hopping;
    if (!(std::abs(energy) < 2.0 * h)) throw std::domain_error("in-band evaluation requires |E| < 2h");
    return std::acos(-energy / (2.0 * h));
}

// Decreasing f with f(lo) > 0 > f(hi); bisect until the bracket cannot shrink.
template <class F>
double bisect_decreasing(F&& f, double lo, double hi) {
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = f(mid);
        if (v == 0.0) return mid;
        if (v > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Return the endpoint with the smaller residual.
    return std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
}

double bracket_extent(const SystemParams& params) {
    const double h = params.hopping;
    const int gap = params.n_atoms == 2 ? params.z : 0;
    return 2.0 * h + std::abs(params.delta) + (2 * gap + params.d) * params.g0 * params.g0 / h + h;
}

void sort_states(std::vector<BoundState>& states) {
    std::sort(states.begin(), states.end(), [](const BoundState& a, const BoundState& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return static_cast<int>(a.channel) < static_cast<int>(b.channel);
    });
}

}  // namespace

const char* to_string(BoundClass kind) { return kind == BoundClass::BOC ? "BOC" : "BIC"; }
const char* to_string(BocType type) { return type == BocType::TypeI ? "I" : "II"; }

double level_shift(double energy, Channel channel, const SystemParams& params) {
    const OutsideBand o = outside_band(energy, params);
    const FormFactor f = form_factor(params, channel);
    return params.delta + params.g0 * params.g0 * o.sign * f.power_series(o.rho) / o.s;
}

double level_shift_slope(double energy, Channel channel, const SystemParams& params) {
    const OutsideBand o = outside_band(energy, params);
    const FormFactor f = form_factor(params, channel);
    const double s2 = o.s * o.s;
    const double term = -o.rho * f.power_series_derivative(o.rho) / s2 -
                        f.power_series(o.rho) * std::abs(energy) / (s2 * o.s);
    return params.g0 * params.g0 * term;
}

double level_shift_principal(double energy, Channel channel, const SystemParams& params) {
    const double phi = in_band_angle(energy, params);
    const FormFactor f = form_factor(params, channel);
    const double h = params.hopping;
    double sum = 0.0;
    for (const auto& t : f.terms()) sum += t.weight * std::sin(t.order * phi);
    const double root = std::sqrt((2.0 * h - energy) * (2.0 * h + energy));
    return params.delta + params.g0 * params.g0 * sum / root;
}

double regular_second_moment(double energy, Channel channel, const SystemParams& params) {
    const double phi = in_band_angle(energy, params);
    const FormFactor f = form_factor(params, channel);
    const double x0 = std::cos(phi);
    double scale = 0.0;
    double slope_scale = 0.0;
    for (const auto& t : f.terms()) {
        scale += std::abs(t.weight);
        slope_scale += std::abs(t.weight) * t.order * t.order;
    }
    if (std::abs(f(x0)) > 1e-8 * scale || std::abs(f.derivative(x0)) > 1e-6 * std::max(slope_scale, 1.0)) {
        throw std::domain_error("second moment is singular: spectral density has no double zero at E = " +
                                std::to_string(energy));
    }
    // Finite part of integral cos(n t) / (cos t - cos phi)^2 dt over [0, pi],
    // which equals the ordinary integral when F(x0) = F'(x0) = 0.
    const double sphi = std::sin(phi);
    const double cphi = std::cos(phi);
    double sum = 0.0;
    for (const auto& t : f.terms()) {
        const double n = t.order;
        sum += t.weight * (std::sin(n * phi) * cphi - n * std::cos(n * phi) * sphi);
    }
    const double h = params.hopping;
    return params.g0 * params.g0 / (4.0 * h * h) * sum / (sphi * sphi * sphi);
}

double level_shift_edge_limit(Channel channel, BandEdge edge, const SystemParams& params) {
    const FormFactor f = form_factor(params, channel);
    const double h = params.hopping;
    const double r = edge == BandEdge::Upper ? -1.0 : 1.0;
    const double g2 = params.g0 * params.g0;
    double scale = 0.0;
    for (const auto& t : f.terms()) scale += std::abs(t.weight);
    const double p = f.power_series(r);
    if (g2 > 0.0 && std::abs(p) > 1e-12 * scale) {
        return edge == BandEdge::Upper ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
    }
    return params.delta + g2 * f.power_series_derivative(r) / (2.0 * h);
}

std::vector<BoundState> find_bocs(const SystemParams& params, const SpectrumOptions& options) {
    params.validate();
    const double edge = params.band_edge();
    const double extent = bracket_extent(params);
    const double tiny = 4.0 * std::numeric_limits<double>::epsilon() * edge;
    std::vector<BoundState> out;

    for (Channel channel : dynamical_channels(params)) {
        auto f = [&](double e) { return level_shift(e, channel, params) - e; };
        for (BandEdge side : {BandEdge::Upper, BandEdge::Lower}) {
            const double limit = level_shift_edge_limit(channel, side, params);
            const bool divergent = std::isinf(limit);
            const double dir = side == BandEdge::Upper ? 1.0 : -1.0;
            // Work in the distance x > 2h from the band centre; q is decreasing in x.
            auto q = [&](double x) { return dir * f(dir * x); };
            const double inner = edge + options.edge_offset;
            double distance = 0.0;
            if (q(inner) > 0.0) {
                distance = bisect_decreasing(q, inner, extent);
            } else if (divergent) {
                // The root lies between the edge and the bracket start.
                const double closest = edge + tiny;
                distance = q(closest) > 0.0 ? bisect_decreasing(q, closest, inner) : closest;
            } else {
                continue;
            }
            const double energy = dir * distance;
            BoundState bs;
            bs.energy = energy;
            bs.kind = BoundClass::BOC;
            bs.boc_type = divergent ? BocType::TypeI : BocType::TypeII;
            bs.channel = channel;
            bs.resolved = std::abs(energy) - edge >= options.resolve_tol;
            bs.residue = residue(bs, channel, params);
            out.push_back(bs);
        }
    }
    sort_states(out);
    return out;
}

std::vector<BoundState> find_bics(const SystemParams& params, const SpectrumOptions& options,
                                  std::vector<BicNearMiss>* near_misses) {
    params.validate();
    const double h = params.hopping;
    const double edge = params.band_edge();
    std::vector<BoundState> out;

    auto in_band = [&](double e) { return std::abs(e) < edge * (1.0 - 1e-12); };

    if (params.g0 == 0.0) {
        // Decoupled atoms: the bare excitation is an eigenstate at E = Delta.
        if (in_band(params.delta)) {
            BoundState bs;
            bs.energy = params.delta;
            bs.kind = BoundClass::BIC;
            bs.channel = params.n_atoms == 1 ? Channel::Single : Channel::ProductDegenerate;
            bs.multiplicity = params.n_atoms;
            bs.residue = 1.0;
            out.push_back(bs);
        }
        return out;
    }

    auto consider = [&](double energy, Channel channel, Channel equation, int multiplicity) {
        const double r = level_shift_principal(energy, equation, params) - energy;
        if (std::abs(r) < options.bic_tol) {
            BoundState bs;
            bs.energy = energy;
            bs.kind = BoundClass::BIC;
            bs.channel = channel;
            bs.multiplicity = multiplicity;
            bs.residue = residue(bs, channel, params);
            out.push_back(bs);
        } else if (near_misses && std::abs(r) < 10.0 * options.bic_tol) {
            near_misses->push_back({energy, channel, r});
        }
    };

    // Zeros of J0: E = -2h cos((2l+1) pi / d).
    std::vector<double> single_zeros;
    for (int l = 0; l < params.d; ++l) {
        const double e = -2.0 * h * std::cos((2 * l + 1) * kPi / params.d);
        if (!in_band(e)) continue;
        const bool seen = std::any_of(single_zeros.begin(), single_zeros.end(),
                                      [e](double x) { return std::abs(x - e) < 1e-12; });
        if (!seen) single_zeros.push_back(e);
    }

    if (params.n_atoms == 1) {
        for (double e : single_zeros) consider(e, Channel::Single, Channel::Single, 1);
    } else {
        const int period = params.d + params.z;
        const FormFactor single = form_factor(params, Channel::Single);
        for (int l = 1; l < period; ++l) {
            const double e = -2.0 * h * std::cos(l * kPi / period);
            if (!in_band(e)) continue;
            // Candidates that are also zeros of J0 belong to the degenerate pair below.
            if (std::abs(single(-e / (2.0 * h))) < 1e-9) continue;
            const Channel channel = (l % 2 == 1) ? Channel::Even : Channel::Odd;
            consider(e, channel, channel, 1);
        }
        for (double e : single_zeros) consider(e, Channel::ProductDegenerate, Channel::Single, 2);
    }
    sort_states(out);
    return out;
}

Complex residue(const BoundState& state, Channel channel, const SystemParams& params) {
    const Channel eq = channel == Channel::ProductDegenerate ? Channel::Single : channel;
    if (state.kind == BoundClass::BOC) {
        return 1.0 / (1.0 - level_shift_slope(state.energy, eq, params));
    }
    if (params.g0 == 0.0) return 1.0;
    const double moment = regular_second_moment(state.energy, eq, params);
    if (!std::isfinite(moment)) throw std::runtime_error("non-finite BIC residue integrand");
    return 1.0 / (1.0 + moment);
}

SpectrumResult full_spectrum(const SystemParams& params, const SpectrumOptions& options) {
    SpectrumResult result;
    result.params = params;
    result.band_lower = -params.band_edge();
    result.band_upper = params.band_edge();
    result.bound_states = find_bocs(params, options);
    auto bics = find_bics(params, options, &result.near_misses);
    result.bound_states.insert(result.bound_states.end(), bics.begin(), bics.end());
    sort_states(result.bound_states);
    return result;
}

}  // namespace giantatom
