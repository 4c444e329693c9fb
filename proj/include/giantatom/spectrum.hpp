#pragma once

#include <optional>
#include <string>
#include <vector>

#include "giantatom/model.hpp"

namespace giantatom {

enum class BoundClass { BOC, BIC };
enum class BocType { TypeI, TypeII };
enum class BandEdge { Lower, Upper };

const char* to_string(BoundClass kind);
const char* to_string(BocType type);

/// One discrete solution of the single-excitation eigen-equation.
struct BoundState {
    double energy = 0.0;
    BoundClass kind = BoundClass::BOC;
    std::optional<BocType> boc_type;  // BOCs only
    Channel channel = Channel::Single;
    Complex residue = 0.0;
    int multiplicity = 1;   // 2 for the degenerate product-state BIC pair
    bool resolved = true;   // false: type-I BOC pinned within the resolve tolerance of the edge
};

/// A BIC candidate whose condition residual fell in [tol, 10 tol).
struct BicNearMiss {
    double energy;
    Channel channel;
    double residual;
};

struct SpectrumResult {
    double band_lower = -2.0;
    double band_upper = 2.0;
    std::vector<BoundState> bound_states;  // ascending in energy
    std::vector<BicNearMiss> near_misses;
    SystemParams params;
};

struct SpectrumOptions {
    double edge_offset = 1e-8;    // bracket start distance from the band edge (units of h)
    double resolve_tol = 1e-6;    // type-I BOCs closer than this to the edge are "unresolved"
    double bic_tol = 1e-6;        // acceptance of the BIC transcendental condition
};

/// Y_c(E) = Delta + integral J_c(w) / (E - w) dw for |E| > 2h (closed form).
double level_shift(double energy, Channel channel, const SystemParams& params);

/// dY_c/dE = -integral J_c(w) / (E - w)^2 dw for |E| > 2h.
double level_shift_slope(double energy, Channel channel, const SystemParams& params);

/// Delta + P.V. integral J_c(w) / (E - w) dw for |E| < 2h.
double level_shift_principal(double energy, Channel channel, const SystemParams& params);

/// integral J_c(w) / (E - w)^2 dw for |E| < 2h, finite when J_c has a double zero at E.
/// Throws std::domain_error when the integrand is not regular at w = E.
double regular_second_moment(double energy, Channel channel, const SystemParams& params);

/// lim Y_c(E) as E approaches the given band edge from outside; +-infinity for
/// Van Hove divergent limits.
double level_shift_edge_limit(Channel channel, BandEdge edge, const SystemParams& params);

std::vector<BoundState> find_bocs(const SystemParams& params, const SpectrumOptions& options = {});

std::vector<BoundState> find_bics(const SystemParams& params, const SpectrumOptions& options = {},
                                  std::vector<BicNearMiss>* near_misses = nullptr);

/// Residue weight Z of a bound state in `channel`.
Complex residue(const BoundState& state, Channel channel, const SystemParams& params);

SpectrumResult full_spectrum(const SystemParams& params, const SpectrumOptions& options = {});

}  // namespace giantatom
