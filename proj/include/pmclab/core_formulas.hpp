#pragma once

// Closed-form pointwise evaluators for the parallel mean curvature family
// with k1 = 0. Every function here is pure; angles are radians in (0, pi).
//
// Notation: s = sin^2(alpha), b = |H|/2, rho = holomorphic sectional
// curvature / 4, a and c are the complex second fundamental form data, mu is
// the coefficient of phi = mu dw and g = mu (a + b) is the real integrating
// factor exp(int F dalpha).

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "pmclab/params.hpp"

namespace pmclab::core {

using cplx = std::complex<double>;

struct SecondFundamentalPoint {
    double alpha = 0.0;
    cplx a;
    cplx tau;
    double y = 0.0;
    cplx c;
    double c_modulus = 0.0;
    double theta = 0.0;
    double nu = 0.0;
    cplx mu;
    double g = 1.0;
};

struct HopfCoefficients {
    cplx phi1_coeff;   // mu^2 (8ba - 3 rho s)
    cplx phi2_coeff;   // mu^2 conj(c)
    cplx q_coeff;      // 8b(conj(c) + a) - 3 rho s
    cplx qprime_coeff; // 8b(conj(c) - a) + 3 rho s
    cplx c1;
    cplx c2;
    cplx gamma; // (8ba - 3 rho s) / (b conj(c))
    double k1 = 0.0;
};

// ---------------------------------------------------------------------------
// Admissible domain

/// Intervals of sin^2(alpha) on which y^2 > 0. For c3 > 0 at most one of the
/// LowPos / HighPos intervals is nonempty; for c3 < 0 the single Neg interval
/// (8/9, 1] is returned. Throws DegenerateConstant for c3 in {0, 8/9}.
[[nodiscard]] std::vector<SinSqInterval> admissible_intervals(double c3);

/// The interval selected by params.branch. Throws InvalidArgument when the
/// branch is empty for this c3.
[[nodiscard]] SinSqInterval branch_interval(const ModelParams& params);

/// alpha in (0, pi) with sin^2(alpha) = s on the requested side of pi/2.
[[nodiscard]] double alpha_from_sin_sq(double s, AlphaSide side);

[[nodiscard]] inline double sin_sq(double alpha) noexcept {
    const double sn = std::sin(alpha);
    return sn * sn;
}

// ---------------------------------------------------------------------------
// The explicit solution

/// (Im tau)^2 = 8 c3 / ((8 - 9 s)(s - c3)). Throws OutsideAdmissibleRegion
/// unless the value is finite and strictly positive.
[[nodiscard]] double y_squared(double s, double c3);

/// a(alpha) from the closed forms for Re a and |Im a|; the sign of Im a is
/// params.im_sign. Points closer than `guard` to a singular endpoint of the
/// branch interval are rejected with OutsideAdmissibleRegion.
[[nodiscard]] cplx a_of_alpha(double alpha, const ModelParams& params,
                              double guard = kDefaultEndpointGuard);

/// (a - b)/(a + b).
[[nodiscard]] cplx tau_of_a(cplx a, double b);

/// Inverse of tau_of_a: b (1 + tau)/(1 - tau).
[[nodiscard]] cplx a_of_tau(cplx tau, double b);

// ---------------------------------------------------------------------------
// ODE right-hand sides

/// F(alpha) = (|a - b|^2 + (3 rho / 2) s) / |a + b|^2 * cot(alpha).
[[nodiscard]] double F_of_alpha(double alpha, cplx a, double b, double rho);

/// da/dalpha = cot(alpha) / (conj(a) + b) * (-2ba + 2|a|^2 + (3 rho / 2) s).
[[nodiscard]] cplx da_dalpha(double alpha, cplx a, double b, double rho);

/// d|a|^2/dalpha in the factored form valid on the k1 = 0 locus.
[[nodiscard]] double d_abs_a_sq_dalpha(double alpha, cplx a, double b, double rho);

/// d log(mu)/dalpha = -(conj(a) - b)/(conj(a) + b) cot(alpha).
[[nodiscard]] cplx dlogmu_dalpha(double alpha, cplx a, double b);

/// Left side of the first order equation satisfied by y^2, given its
/// derivative: dy2 + 4 cot (4 - 9s)/(8 - 9s) y2 + cot (8 - 9s)/4 y2^2.
[[nodiscard]] double y_ode_residual(double alpha, double y2, double dy2_dalpha);

// ---------------------------------------------------------------------------
// Frame data

/// g / (a + b).
[[nodiscard]] cplx mu_of(double g, cplx a, double b);

/// |a|^2 + (rho/2)(-2 + 3 s); may be negative.
[[nodiscard]] double ricci_radicand(double alpha, cplx a, double rho);

/// sqrt of ricci_radicand; throws NegativeRadicand when it is negative.
[[nodiscard]] double c_modulus(double alpha, cplx a, double rho);

/// |c| (conj(a) + b)/(a + b) exp(-i k1 v).
[[nodiscard]] cplx c_of(double alpha, double v, cplx a, double b, double rho, double k1 = 0.0);

/// k1 as given by its closed expression (half of the 2 k1 formula). Returned
/// complex so realness can be checked.
[[nodiscard]] cplx k1_expression(double alpha, cplx a, cplx mu, double b, double rho);

/// 8|a|^2 + 9b(a + conj(a)) s - 8b^2 + 18 b^2 s; vanishes on the family.
[[nodiscard]] double identity_31_residual(double alpha, cplx a, double b);

/// cot(alpha)(s - 8/9)(|a|^2 - b^2)(rho + 3b^2).
[[nodiscard]] double lemma31_product(double alpha, cplx a, double b, double rho);

// ---------------------------------------------------------------------------
// Curvature

/// Gauss equation: -4(|a|^2 - b^2) + 6 rho cos^2(alpha).
[[nodiscard]] double gauss_curvature_from_a(double alpha, cplx a, double b, double rho);

/// Closed form on the family: -2b^2/(8 - 9c3) ((9s - 8)^2 + (8 - 9c3)).
[[nodiscard]] double gauss_curvature_closed(double alpha, double b, double c3);

/// Same as above but taking s directly, so sin^2 = 8/9 can be hit exactly.
[[nodiscard]] double gauss_curvature_closed_s(double s, double b, double c3);

/// Curvatures for the a = conj(a) regime: (constant-alpha value,
/// nonconstant-alpha value) = (-2b^2, -2(2(a + b)^2 + b^2)).
[[nodiscard]] std::pair<double, double> real_a_curvatures(double a, double b);

// ---------------------------------------------------------------------------
// Holomorphic quadratic differentials

/// All Hopf-type coefficients at one point. gamma requires c != 0 and throws
/// ZeroC otherwise. k1 is the real part of k1_expression.
[[nodiscard]] HopfCoefficients hopf_coefficients(double alpha, cplx a, cplx c, cplx mu, double b,
                                                 double rho);

/// |8ba - 3 rho s|^2 / (b^2 * ricci_radicand). Equals |gamma|^2 when c is
/// defined and keeps its sign otherwise.
[[nodiscard]] double gamma_sq_signed(double alpha, cplx a, double b, double rho);

/// Full record at one node of a profile.
[[nodiscard]] SecondFundamentalPoint evaluate_point(double alpha, double g, double v,
                                                    const ModelParams& params,
                                                    double guard = kDefaultEndpointGuard);

} // namespace pmclab::core
