#include "pmclab/core_formulas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pmclab/errors.hpp"

namespace pmclab::core {

namespace {

constexpr double kSingularEps = 1e-14;

void require_nonsingular_angle(double alpha) {
    if (std::abs(std::sin(alpha)) < kSingularEps) {
        throw PmcError(ErrorKind::SingularAngle, "sin(alpha) vanishes at alpha = " + std::to_string(alpha));
    }
}

void require_nonzero(cplx den, double scale, const char* what) {
    if (!(std::abs(den) > kSingularEps * scale)) {
        throw PmcError(ErrorKind::SingularDenominator, std::string(what) + " vanishes");
    }
}

double cot(double alpha) { return std::cos(alpha) / std::sin(alpha); }

} // namespace

std::vector<SinSqInterval> admissible_intervals(double c3) {
    if (is_degenerate_c3(c3)) {
        throw PmcError(ErrorKind::DegenerateConstant, "c3 = " + std::to_string(c3) + " is excluded");
    }
    if (c3 < 0.0) return {SinSqInterval{kEightNinths, 1.0, true}};
    if (c3 < kEightNinths) return {SinSqInterval{c3, kEightNinths, false}};
    // For c3 > 1 the constraint s <= 1 cuts the interval before s = c3, and
    // s = 1 is then a regular point.
    if (c3 > 1.0) return {SinSqInterval{kEightNinths, 1.0, true}};
    return {SinSqInterval{kEightNinths, c3, false}};
}

SinSqInterval branch_interval(const ModelParams& params) {
    const auto intervals = admissible_intervals(params.c3);
    if (default_branch(params.c3) != params.branch) {
        throw PmcError(ErrorKind::InvalidArgument, "branch " + std::string(to_string(params.branch)) +
                                                       " is empty for c3 = " + std::to_string(params.c3));
    }
    return intervals.front();
}

double alpha_from_sin_sq(double s, AlphaSide side) {
    if (!(s > 0.0 && s <= 1.0)) {
        throw PmcError(ErrorKind::InvalidArgument, "sin^2(alpha) must lie in (0, 1]");
    }
    const double acute = std::asin(std::sqrt(s));
    return side == AlphaSide::AcuteSide ? acute : std::numbers::pi - acute;
}

double y_squared(double s, double c3) {
    const double y2 = 8.0 * c3 / ((8.0 - 9.0 * s) * (s - c3));
    if (!std::isfinite(y2) || !(y2 > 0.0)) {
        throw PmcError(ErrorKind::OutsideAdmissibleRegion,
                       "y^2 is not positive at s = " + std::to_string(s) + ", c3 = " + std::to_string(c3));
    }
    return y2;
}

cplx a_of_alpha(double alpha, const ModelParams& params, double guard) {
    const double s = sin_sq(alpha);
    const SinSqInterval interval = branch_interval(params);
    if (!interval.contains(s, guard)) {
        throw PmcError(ErrorKind::OutsideAdmissibleRegion,
                       "sin^2(alpha) = " + std::to_string(s) + " is outside the " +
                           std::string(to_string(params.branch)) + " interval");
    }
    const double c3 = params.c3;
    (void)y_squared(s, c3);

    const double det = 8.0 - 9.0 * c3;
    const double re = params.b * ((-16.0 * c3 + (8.0 + 27.0 * c3) * s - 18.0 * s * s) / (det * s));

    double im_mag = 0.0;
    if (c3 > 0.0) {
        const double gap = 8.0 - 9.0 * s;
        im_mag = params.b *
                 (std::sqrt(c3) / (std::numbers::sqrt2 * det) * gap * std::sqrt(gap * (s - c3)) / s);
    } else {
        const double c4 = -c3;
        const double gap = 9.0 * s - 8.0;
        im_mag = params.b * (std::sqrt(c4) / (std::numbers::sqrt2 * (8.0 + 9.0 * c4)) * gap *
                             std::sqrt(gap * (c4 + s)) / s);
    }
    return {re, params.im_sign_factor() * im_mag};
}

cplx tau_of_a(cplx a, double b) {
    require_nonzero(a + b, b, "a + b");
    return (a - b) / (a + b);
}

cplx a_of_tau(cplx tau, double b) {
    require_nonzero(1.0 - tau, 1.0, "1 - tau");
    return b * (1.0 + tau) / (1.0 - tau);
}

double F_of_alpha(double alpha, cplx a, double b, double rho) {
    require_nonsingular_angle(alpha);
    require_nonzero(a + b, b, "a + b");
    const double s = sin_sq(alpha);
    return (std::norm(a - b) + 1.5 * rho * s) / std::norm(a + b) * cot(alpha);
}

cplx da_dalpha(double alpha, cplx a, double b, double rho) {
    require_nonsingular_angle(alpha);
    require_nonzero(std::conj(a) + b, b, "conj(a) + b");
    const double s = sin_sq(alpha);
    return cot(alpha) / (std::conj(a) + b) * (-2.0 * b * a + 2.0 * std::norm(a) + 1.5 * rho * s);
}

double d_abs_a_sq_dalpha(double alpha, cplx a, double b, double rho) {
    require_nonsingular_angle(alpha);
    require_nonzero(a + b, b, "a + b");
    const double s = sin_sq(alpha);
    const double a2 = std::norm(a);
    return cot(alpha) / std::norm(a + b) * (a2 - b * b) * (4.0 * a2 - (4.0 / 3.0) * rho + 3.0 * rho * s);
}

cplx dlogmu_dalpha(double alpha, cplx a, double b) {
    require_nonsingular_angle(alpha);
    require_nonzero(std::conj(a) + b, b, "conj(a) + b");
    return -(std::conj(a) - b) / (std::conj(a) + b) * cot(alpha);
}

double y_ode_residual(double alpha, double y2, double dy2_dalpha) {
    require_nonsingular_angle(alpha);
    const double s = sin_sq(alpha);
    const double ct = cot(alpha);
    return dy2_dalpha + 4.0 * ct * (4.0 - 9.0 * s) / (8.0 - 9.0 * s) * y2 +
           ct * (8.0 - 9.0 * s) / 4.0 * y2 * y2;
}

cplx mu_of(double g, cplx a, double b) {
    require_nonzero(a + b, b, "a + b");
    return g / (a + b);
}

double ricci_radicand(double alpha, cplx a, double rho) {
    const double s = sin_sq(alpha);
    return std::norm(a) + 0.5 * rho * (-2.0 + 3.0 * s);
}

double c_modulus(double alpha, cplx a, double rho) {
    const double rad = ricci_radicand(alpha, a, rho);
    if (rad < 0.0) {
        throw PmcError(ErrorKind::NegativeRadicand,
                       "|c|^2 = " + std::to_string(rad) + " < 0 at alpha = " + std::to_string(alpha));
    }
    return std::sqrt(rad);
}

cplx c_of(double alpha, double v, cplx a, double b, double rho, double k1) {
    require_nonzero(a + b, b, "a + b");
    const cplx c = c_modulus(alpha, a, rho) * ((std::conj(a) + b) / (a + b));
    if (k1 == 0.0) return c;
    return c * std::polar(1.0, -k1 * v);
}

cplx k1_expression(double alpha, cplx a, cplx mu, double b, double rho) {
    require_nonsingular_angle(alpha);
    const double s = sin_sq(alpha);
    const double a2 = std::norm(a);
    const double num = 8.0 * a2 + 9.0 * b * (2.0 * a.real()) * s - 8.0 * b * b + 18.0 * b * b * s;
    const cplx den = (std::conj(a) + b) * (a2 + 0.5 * rho * (-2.0 + 3.0 * s));
    require_nonzero(den, b * b * b, "k1 denominator");
    return 0.5 * rho * mu * num / den * cot(alpha);
}

double identity_31_residual(double alpha, cplx a, double b) {
    const double s = sin_sq(alpha);
    return 8.0 * std::norm(a) + 9.0 * b * (2.0 * a.real()) * s - 8.0 * b * b + 18.0 * b * b * s;
}

double lemma31_product(double alpha, cplx a, double b, double rho) {
    require_nonsingular_angle(alpha);
    const double s = sin_sq(alpha);
    return cot(alpha) * (s - kEightNinths) * (std::norm(a) - b * b) * (rho + 3.0 * b * b);
}

double gauss_curvature_from_a(double alpha, cplx a, double b, double rho) {
    // cos^2 = 1 - sin^2 keeps alpha = pi/2 exact.
    const double cos2 = 1.0 - sin_sq(alpha);
    return -4.0 * (std::norm(a) - b * b) + 6.0 * rho * cos2;
}

double gauss_curvature_closed_s(double s, double b, double c3) {
    if (c3 != 0.0 && is_degenerate_c3(c3)) {
        throw PmcError(ErrorKind::DegenerateConstant, "8 - 9 c3 vanishes");
    }
    const double det = 8.0 - 9.0 * c3;
    const double dev = 9.0 * s - 8.0;
    return -2.0 * b * b / det * (dev * dev + det);
}

double gauss_curvature_closed(double alpha, double b, double c3) {
    return gauss_curvature_closed_s(sin_sq(alpha), b, c3);
}

std::pair<double, double> real_a_curvatures(double a, double b) {
    const double shifted = a + b;
    return {-2.0 * b * b, -2.0 * (2.0 * shifted * shifted + b * b)};
}

HopfCoefficients hopf_coefficients(double alpha, cplx a, cplx c, cplx mu, double b, double rho) {
    const double s = sin_sq(alpha);
    const cplx cbar = std::conj(c);
    const cplx mu2 = mu * mu;
    const cplx e = 8.0 * b * a - 3.0 * rho * s;

    HopfCoefficients h;
    h.phi1_coeff = mu2 * e;
    h.phi2_coeff = mu2 * cbar;
    h.q_coeff = 8.0 * b * (cbar + a) - 3.0 * rho * s;
    h.qprime_coeff = 8.0 * b * (cbar - a) + 3.0 * rho * s;
    // On the k1 = 0 locus the exponential factor of the second constant is 1.
    h.c1 = h.phi1_coeff;
    h.c2 = h.phi2_coeff;
    if (!(std::abs(c) > 0.0)) {
        throw PmcError(ErrorKind::ZeroC, "gamma is undefined where c = 0");
    }
    h.gamma = e / (b * cbar);
    // a + b and |c| both vanish at the 8/9 endpoint; leave k1 undefined there.
    try {
        h.k1 = k1_expression(alpha, a, mu, b, rho).real();
    } catch (const PmcError& err) {
        if (err.kind() != ErrorKind::SingularDenominator) throw;
        h.k1 = std::numeric_limits<double>::quiet_NaN();
    }
    return h;
}

double gamma_sq_signed(double alpha, cplx a, double b, double rho) {
    const double s = sin_sq(alpha);
    const double rad = ricci_radicand(alpha, a, rho);
    if (rad == 0.0) throw PmcError(ErrorKind::ZeroC, "gamma is undefined where c = 0");
    return std::norm(8.0 * b * a - 3.0 * rho * s) / (b * b * rad);
}

SecondFundamentalPoint evaluate_point(double alpha, double g, double v, const ModelParams& params,
                                      double guard) {
    SecondFundamentalPoint p;
    p.alpha = alpha;
    p.g = g;
    p.a = a_of_alpha(alpha, params, guard);
    p.tau = tau_of_a(p.a, params.b);
    p.y = p.tau.imag();
    p.c_modulus = c_modulus(alpha, p.a, params.rho);
    p.c = c_of(alpha, v, p.a, params.b, params.rho, 0.0);
    p.theta = std::arg(p.a + params.b);
    p.nu = std::arg(p.c);
    p.mu = mu_of(g, p.a, params.b);
    return p;
}

} // namespace pmclab::core
