#pragma once

// Realizes the family in the adapted coordinate w = u + i v. Along u the
// Kaehler angle and the integrating factor g = exp(int F dalpha) satisfy
//
//     dalpha/du = 2 g,    dg/du = 2 F(alpha) g^2,
//
// and mu = g / (a + b) follows algebraically. Nothing depends on v.

#include <cstddef>
#include <string_view>
#include <vector>

#include "pmclab/core_formulas.hpp"
#include "pmclab/params.hpp"

namespace pmclab::family {

using core::cplx;

enum class StopReason { SpanExhausted, EndpointProximity, StepUnderflow };

[[nodiscard]] std::string_view to_string(StopReason r) noexcept;

struct IntegratorOptions {
    /// Endpoint guard in sin^2(alpha).
    double delta = kDefaultEndpointGuard;
    /// Steps starting within refine_band_factor * delta of a singular
    /// endpoint are subdivided by step doubling until they agree to
    /// refine_tol.
    double refine_band_factor = 10.0;
    double refine_tol = 1e-12;
    /// Smallest substep, as a fraction of h.
    double h_min_fraction = 1.0 / 1048576.0;
    /// Value of g at u = 0. Fixes the free constant of int F dalpha.
    double g0 = 1.0;
};

/// Nodes u_k = k h for k in [-n_back, n_fwd], stored in increasing u.
struct AlphaProfile {
    ModelParams params;
    double h = 0.0;
    double delta = kDefaultEndpointGuard;
    std::vector<double> u_nodes;
    std::vector<double> alpha;
    std::vector<double> g;
    std::vector<cplx> mu;
    StopReason stop_reason = StopReason::SpanExhausted;
    StopReason forward_stop = StopReason::SpanExhausted;
    StopReason backward_stop = StopReason::SpanExhausted;
    /// Index of the u = 0 node.
    std::size_t origin = 0;

    [[nodiscard]] std::size_t size() const noexcept { return u_nodes.size(); }
    [[nodiscard]] bool empty() const noexcept { return u_nodes.empty(); }
};

/// alpha whose sin^2 is the midpoint of the branch interval, on
/// params.alpha_side.
[[nodiscard]] double default_alpha0(const ModelParams& params);

/// Fixed-step classical RK4 from (alpha0, g0) over [-u_span, u_span].
/// Each direction halts early with EndpointProximity once the next lattice
/// node would come within delta of a singular endpoint (or the trajectory
/// leaves the interval inside the step). Throws InadmissibleStart and
/// NonFiniteState.
[[nodiscard]] AlphaProfile integrate_profile(const ModelParams& params, double alpha0, double u_span,
                                             double h, const IntegratorOptions& options = {});

struct GridCell {
    double u = 0.0;
    double v = 0.0;
    double alpha = 0.0;
    double g = 0.0;
    cplx a;
    cplx tau;
    cplx mu;
    cplx c;
    double radicand = 0.0;
    double K_closed = 0.0;
    double K_gauss = 0.0;
    core::HopfCoefficients hopf;
    /// false where |c|^2 < 0 (c, hopf are NaN there).
    bool valid = true;
};

struct SurfaceGrid {
    AlphaProfile profile;
    std::vector<double> v_nodes;
    /// Row-major: cells[iu * v_count() + iv].
    std::vector<GridCell> cells;
    /// u-indices of nodes where c is undefined.
    std::vector<std::size_t> invalid_u;

    [[nodiscard]] std::size_t u_count() const noexcept { return profile.size(); }
    [[nodiscard]] std::size_t v_count() const noexcept { return v_nodes.size(); }
    [[nodiscard]] const GridCell& at(std::size_t iu, std::size_t iv) const { return cells[iu * v_count() + iv]; }
    [[nodiscard]] bool valid() const noexcept { return invalid_u.empty(); }
};

/// `count` nodes spaced `step` apart and centred on v = 0.
[[nodiscard]] std::vector<double> make_v_nodes(int count, double step);

/// Evaluates every pointwise quantity at all (u, v) nodes with k1 = 0.
[[nodiscard]] SurfaceGrid build_grid(const AlphaProfile& profile, std::vector<double> v_nodes);

} // namespace pmclab::family
