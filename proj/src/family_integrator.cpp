#include "pmclab/family_integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "pmclab/errors.hpp"

namespace pmclab::family {

std::string_view to_string(StopReason r) noexcept {
    switch (r) {
    case StopReason::SpanExhausted: return "SpanExhausted";
    case StopReason::EndpointProximity: return "EndpointProximity";
    case StopReason::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

namespace {

struct State {
    double alpha;
    double g;
};

class Marcher {
public:
    Marcher(const ModelParams& params, const SinSqInterval& interval, const IntegratorOptions& opt)
        : params_(params), interval_(interval), opt_(opt) {}

    /// Right-hand side, or nullopt when the state has left the region the
    /// trajectory can reach: alpha outside the interval, or g pushed through
    /// zero by a step overshooting an endpoint where g vanishes.
    std::optional<State> rhs(const State& y) const {
        if (!std::isfinite(y.alpha) || !std::isfinite(y.g)) {
            throw PmcError(ErrorKind::NonFiniteState, "state became non-finite");
        }
        if (!(y.g > 0.0) || !interval_.contains(core::sin_sq(y.alpha), 0.0)) return std::nullopt;
        const cplx a = core::a_of_alpha(y.alpha, params_, 0.0);
        const double F = core::F_of_alpha(y.alpha, a, params_.b, params_.rho);
        return State{2.0 * y.g, 2.0 * F * y.g * y.g};
    }

    std::optional<State> rk4(const State& y, double h) const {
        const auto k1 = rhs(y);
        if (!k1) return std::nullopt;
        const auto k2 = rhs({y.alpha + 0.5 * h * k1->alpha, y.g + 0.5 * h * k1->g});
        if (!k2) return std::nullopt;
        const auto k3 = rhs({y.alpha + 0.5 * h * k2->alpha, y.g + 0.5 * h * k2->g});
        if (!k3) return std::nullopt;
        const auto k4 = rhs({y.alpha + h * k3->alpha, y.g + h * k3->g});
        if (!k4) return std::nullopt;
        const State next{y.alpha + h / 6.0 * (k1->alpha + 2.0 * k2->alpha + 2.0 * k3->alpha + k4->alpha),
                         y.g + h / 6.0 * (k1->g + 2.0 * k2->g + 2.0 * k3->g + k4->g)};
        if (std::isfinite(next.g) && !(next.g > 0.0)) return std::nullopt;
        return next;
    }

    enum class Outcome { Ok, Crossed, Underflow };

    /// Step doubling: accept two half steps once they agree with one full
    /// step, otherwise recurse on each half.
    Outcome refined(State& y, double h, double h_min) const {
        const auto one = rk4(y, h);
        const auto half = rk4(y, 0.5 * h);
        const auto two = half ? rk4(*half, 0.5 * h) : std::nullopt;
        if (one && two) {
            const double err = std::max(std::abs(one->alpha - two->alpha),
                                        std::abs(one->g - two->g) / (1.0 + std::abs(two->g)));
            if (err <= opt_.refine_tol) {
                y = *two;
                return Outcome::Ok;
            }
        }
        if (0.5 * std::abs(h) < h_min) {
            return (one || two) ? Outcome::Underflow : Outcome::Crossed;
        }
        State mid = y;
        if (auto r = refined(mid, 0.5 * h, h_min); r != Outcome::Ok) return r;
        if (auto r = refined(mid, 0.5 * h, h_min); r != Outcome::Ok) return r;
        y = mid;
        return Outcome::Ok;
    }

    double endpoint_distance(double s) const {
        const double lo = s - interval_.lo;
        return interval_.hi_closed ? lo : std::min(lo, interval_.hi - s);
    }

    /// Twice the first-order change of sin^2 over one step, d(sin^2)/du = 2 sin(2 alpha) g.
    bool endpoint_in_reach(const State& y, double h) const {
        const double reach = 4.0 * std::abs(std::sin(2.0 * y.alpha)) * y.g * std::abs(h);
        return endpoint_distance(core::sin_sq(y.alpha)) < reach;
    }

    /// Marches n lattice steps of signed size h; nodes are appended to out.
    StopReason march(State y, double h, long n, std::vector<State>& out) const {
        const double h_min = std::abs(h) * opt_.h_min_fraction;
        for (long k = 0; k < n; ++k) {
            const bool near = endpoint_distance(core::sin_sq(y.alpha)) < opt_.refine_band_factor * opt_.delta;
            State next = y;
            const auto stepped = near ? std::nullopt : rk4(y, h);
            if (stepped) {
                next = *stepped;
            } else {
                // Either close to an endpoint or a full step overshot one.
                const Outcome r = refined(next, h, h_min);
                // When the endpoint is within reach of this step, it is the
                // singularity there that defeats the refinement.
                if (r == Outcome::Underflow) {
                    return near || endpoint_in_reach(y, h) ? StopReason::EndpointProximity : StopReason::StepUnderflow;
                }
                if (r == Outcome::Crossed) return StopReason::EndpointProximity;
            }
            if (!std::isfinite(next.alpha) || !std::isfinite(next.g) || !(next.g > 0.0)) {
                throw PmcError(ErrorKind::NonFiniteState,
                               "non-finite or nonpositive state after " + std::to_string(k + 1) + " steps");
            }
            if (!interval_.contains(core::sin_sq(next.alpha), opt_.delta)) return StopReason::EndpointProximity;
            out.push_back(next);
            y = next;
        }
        return StopReason::SpanExhausted;
    }

private:
    const ModelParams& params_;
    SinSqInterval interval_;
    IntegratorOptions opt_;
};

} // namespace

double default_alpha0(const ModelParams& params) {
    return core::alpha_from_sin_sq(core::branch_interval(params).midpoint(), params.alpha_side);
}

AlphaProfile integrate_profile(const ModelParams& params, double alpha0, double u_span, double h,
                               const IntegratorOptions& options) {
    params.validate();
    if (!(h > 0.0) || !std::isfinite(h) || !(u_span >= 0.0) || !std::isfinite(u_span)) {
        throw PmcError(ErrorKind::InvalidArgument, "need h > 0 and u_span >= 0");
    }
    if (!(options.g0 > 0.0) || !(options.delta >= 0.0)) {
        throw PmcError(ErrorKind::InvalidArgument, "need g0 > 0 and delta >= 0");
    }
    const SinSqInterval interval = core::branch_interval(params);
    if (!(alpha0 > 0.0 && alpha0 < std::numbers::pi) || !interval.contains(core::sin_sq(alpha0), options.delta)) {
        throw PmcError(ErrorKind::InadmissibleStart,
                       "alpha0 = " + std::to_string(alpha0) + " has sin^2 = " +
                           std::to_string(core::sin_sq(alpha0)) + " outside the admissible interval");
    }

    // Tolerate u_span / h landing a hair below an integer.
    const double ratio = u_span / h;
    const long n = static_cast<long>(std::floor(ratio + 1e-9 * std::max(1.0, ratio)));

    const Marcher marcher(params, interval, options);
    const State start{alpha0, options.g0};
    std::vector<State> fwd;
    std::vector<State> bwd;
    const StopReason fstop = marcher.march(start, h, n, fwd);
    const StopReason bstop = marcher.march(start, -h, n, bwd);

    AlphaProfile p;
    p.params = params;
    p.h = h;
    p.delta = options.delta;
    p.forward_stop = fstop;
    p.backward_stop = bstop;
    if (fstop == StopReason::StepUnderflow || bstop == StopReason::StepUnderflow) {
        p.stop_reason = StopReason::StepUnderflow;
    } else if (fstop == StopReason::EndpointProximity || bstop == StopReason::EndpointProximity) {
        p.stop_reason = StopReason::EndpointProximity;
    } else {
        p.stop_reason = StopReason::SpanExhausted;
    }

    const std::size_t total = bwd.size() + 1 + fwd.size();
    p.u_nodes.reserve(total);
    p.alpha.reserve(total);
    p.g.reserve(total);
    p.mu.reserve(total);
    auto push = [&](long k, const State& y) {
        p.u_nodes.push_back(static_cast<double>(k) * h);
        p.alpha.push_back(y.alpha);
        p.g.push_back(y.g);
        p.mu.push_back(core::mu_of(y.g, core::a_of_alpha(y.alpha, params, options.delta), params.b));
    };
    for (std::size_t i = bwd.size(); i-- > 0;) push(-static_cast<long>(i + 1), bwd[i]);
    p.origin = p.u_nodes.size();
    push(0, start);
    for (std::size_t i = 0; i < fwd.size(); ++i) push(static_cast<long>(i + 1), fwd[i]);
    return p;
}

std::vector<double> make_v_nodes(int count, double step) {
    if (count < 1 || !(step > 0.0)) {
        throw PmcError(ErrorKind::InvalidArgument, "need at least one v node and a positive v step");
    }
    std::vector<double> v(static_cast<std::size_t>(count));
    const double centre = 0.5 * static_cast<double>(count - 1);
    for (int j = 0; j < count; ++j) v[static_cast<std::size_t>(j)] = (static_cast<double>(j) - centre) * step;
    return v;
}

SurfaceGrid build_grid(const AlphaProfile& profile, std::vector<double> v_nodes) {
    if (profile.empty()) throw PmcError(ErrorKind::InvalidArgument, "empty profile");
    if (v_nodes.empty()) throw PmcError(ErrorKind::InvalidArgument, "no v nodes");

    const ModelParams& prm = profile.params;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const cplx cnan{nan, nan};

    SurfaceGrid grid;
    grid.profile = profile;
    grid.v_nodes = std::move(v_nodes);
    grid.cells.reserve(profile.size() * grid.v_nodes.size());

    for (std::size_t iu = 0; iu < profile.size(); ++iu) {
        const double alpha = profile.alpha[iu];
        GridCell base;
        base.u = profile.u_nodes[iu];
        base.alpha = alpha;
        base.g = profile.g[iu];
        base.a = core::a_of_alpha(alpha, prm, 0.0);
        base.tau = core::tau_of_a(base.a, prm.b);
        base.mu = profile.mu[iu];
        base.radicand = core::ricci_radicand(alpha, base.a, prm.rho);
        base.K_closed = core::gauss_curvature_closed(alpha, prm.b, prm.c3);
        base.K_gauss = core::gauss_curvature_from_a(alpha, base.a, prm.b, prm.rho);
        base.valid = base.radicand > 0.0;
        if (!base.valid) grid.invalid_u.push_back(iu);

        for (const double v : grid.v_nodes) {
            GridCell cell = base;
            cell.v = v;
            if (cell.valid) {
                cell.c = core::c_of(alpha, v, cell.a, prm.b, prm.rho, 0.0);
                cell.hopf = core::hopf_coefficients(alpha, cell.a, cell.c, cell.mu, prm.b, prm.rho);
            } else {
                cell.c = cnan;
                cell.hopf = {cnan, cnan, cnan, cnan, cnan, cnan, cnan, nan};
            }
            grid.cells.push_back(cell);
        }
    }
    return grid;
}

} // namespace pmclab::family
