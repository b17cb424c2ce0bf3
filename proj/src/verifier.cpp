#include "pmclab/verifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "pmclab/core_formulas.hpp"
#include "pmclab/errors.hpp"

namespace pmclab::verify {

using core::cplx;
using family::SurfaceGrid;

std::string_view to_string(ResidualKind k) noexcept {
    switch (k) {
    case ResidualKind::FiniteDifference: return "finite_difference";
    case ResidualKind::Integrator: return "integrator";
    case ResidualKind::Analytic: return "analytic";
    }
    return "?";
}

namespace {

struct ResidualDef {
    const char* name;
    ResidualKind kind;
    /// tolerance = coefficient * h^h_power
    double tolerance;
    int h_power;
    const char* identity;
};

// clang-format off
constexpr std::array<ResidualDef, 16> kResiduals{{
    {"dalpha_structure", ResidualKind::FiniteDifference, 500.0, 2,
     "dalpha = (a+b) phi + (conj(a)+b) conj(phi)"},
    {"dphi_structure",   ResidualKind::FiniteDifference, 5000.0, 2,
     "dphi = (conj(a)-b) cot(alpha) phi ^ conj(phi)"},
    {"codazzi_a",        ResidualKind::FiniteDifference, 3000.0, 2,
     "da ^ phi = -(2a(conj(a)-b) cot(alpha) + 3/2 rho sin(alpha) cos(alpha)) phi ^ conj(phi)"},
    {"codazzi_c",        ResidualKind::FiniteDifference, 6000.0, 2,
     "dc ^ conj(phi) = 2c(a-b) cot(alpha) phi ^ conj(phi)"},
    {"gauss_consistency", ResidualKind::FiniteDifference, 4000.0, 2,
     "-Laplacian(log|mu|)/|mu|^2 = -4(|a|^2-b^2) + 6 rho cos^2(alpha)"},
    {"ricci_radicand",   ResidualKind::Analytic, 0.0, 0,
     "|c|^2 = |a|^2 + rho/2 (-2 + 3 sin^2(alpha)) > 0"},
    {"hopf_constancy",   ResidualKind::Integrator, 1e-6, 0,
     "mu^2 (8ba - 3 rho sin^2(alpha)) = c1 and mu^2 conj(c) = c2"},
    {"mu_ode",           ResidualKind::FiniteDifference, 8000.0, 2,
     "dlog(mu)/dalpha = -(conj(a)-b)/(conj(a)+b) cot(alpha)"},
    {"a_ode",            ResidualKind::FiniteDifference, 3000.0, 2,
     "da/dalpha = cot(alpha)/(conj(a)+b) (-2ba + 2|a|^2 + 3/2 rho sin^2(alpha))"},
    {"y_ode_36",         ResidualKind::FiniteDifference, 1e5, 2,
     "d(y^2)/dalpha + 4 cot (4-9s)/(8-9s) y^2 + cot (8-9s)/4 y^4 = 0"},
    {"eq_33",            ResidualKind::FiniteDifference, 500.0, 2,
     "d|a|^2/dalpha = cot/|a+b|^2 (|a|^2-b^2)(4|a|^2 - 4/3 rho + 3 rho sin^2(alpha))"},
    {"k1_zero",          ResidualKind::Analytic, 1e-8, 0,
     "k1 = 0 and 8|a|^2 + 9b(a+conj(a)) s - 8b^2 + 18b^2 s = 0"},
    {"log_mu2c_const",   ResidualKind::Integrator, 1e8, 4,
     "d/du log(|mu|^2 |c|) = k1 = 0"},
    {"gamma_lemma42",    ResidualKind::Analytic, 1e-8, 0,
     "8ba - 3 rho s = b gamma conj(c), gamma constant, |gamma|^2 = 2(8-9c3)"},
    {"curvature_bound",  ResidualKind::Analytic, 1e-9, 0,
     "K <= -2b^2 when 8 - 9c3 > 0"},
    {"closed_form_K",    ResidualKind::Analytic, 1e-9, 0,
     "-4(|a|^2-b^2) + 6 rho cos^2 = -2b^2/(8-9c3) ((9s-8)^2 + 8-9c3)"},
}};
// clang-format on

const ResidualDef& def_for(std::string_view name) {
    for (const auto& s : kResiduals) {
        if (name == s.name) return s;
    }
    throw PmcError(ErrorKind::InvalidArgument, "unknown residual '" + std::string(name) + "'");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

/// max that lets NaN poison the result as +inf.
void fold(double& acc, double x) {
    if (std::isnan(x)) x = kInf;
    acc = std::max(acc, x);
}

/// Derivative at x[j] of the quadratic through (x[k], f[k]), k = 0..2.
template <typename T>
T lagrange_derivative(const std::array<double, 3>& x, const std::array<T, 3>& f, int j) {
    const double x0 = x[0], x1 = x[1], x2 = x[2];
    const double t = x[j];
    const double w0 = ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2));
    const double w1 = ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2));
    const double w2 = ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1));
    return w0 * f[0] + w1 * f[1] + w2 * f[2];
}

/// Second-order derivative of samples f at node i with abscissae x.
template <typename T>
T derivative(const std::vector<double>& x, const std::vector<T>& f, std::size_t i) {
    const std::size_t n = f.size();
    std::size_t start = 0;
    int j = 1;
    if (i == 0) {
        start = 0;
        j = 0;
    } else if (i + 1 == n) {
        start = n - 3;
        j = 2;
    } else {
        start = i - 1;
    }
    return lagrange_derivative<T>({x[start], x[start + 1], x[start + 2]}, {f[start], f[start + 1], f[start + 2]}, j);
}

/// Second derivative on a uniform lattice, one-sided at the ends.
double second_derivative(const std::vector<double>& f, std::size_t i, double h) {
    const std::size_t n = f.size();
    if (i == 0) return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
    if (i + 1 == n) return (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
    return (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
}

std::size_t nearest_to_zero(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < v.size(); ++j) {
        if (std::abs(v[j]) < std::abs(v[best])) best = j;
    }
    return best;
}

template <typename T>
T mean_of(const std::vector<T>& xs, const std::vector<std::size_t>& idx) {
    T sum{};
    for (auto i : idx) sum += xs[i];
    return sum / static_cast<double>(idx.size());
}

} // namespace

const std::vector<std::string>& residual_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& s : kResiduals) out.emplace_back(s.name);
        return out;
    }();
    return names;
}

ResidualKind residual_kind(std::string_view name) { return def_for(name).kind; }

void Tolerances::set(const std::string& name, double value) {
    (void)def_for(name);
    if (!(value >= 0.0) || std::isnan(value)) {
        throw PmcError(ErrorKind::InvalidArgument, "tolerance for '" + name + "' must be nonnegative");
    }
    overrides_[name] = value;
}

double Tolerances::for_entry(std::string_view name, double h) const {
    if (auto it = overrides_.find(std::string(name)); it != overrides_.end()) return it->second;
    const ResidualDef& s = def_for(name);
    return s.tolerance * std::pow(h, s.h_power);
}

const ResidualEntry& ResidualReport::entry(std::string_view name) const {
    for (const auto& e : entries) {
        if (e.name == name) return e;
    }
    throw PmcError(ErrorKind::InvalidArgument, "report has no entry '" + std::string(name) + "'");
}

std::vector<std::string> ResidualReport::failing() const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
        if (!e.pass) out.push_back(e.name);
    }
    return out;
}

ResidualReport run_residual_suite(const SurfaceGrid& grid, double h, const SuiteOptions& options) {
    const family::AlphaProfile& prof = grid.profile;
    const std::size_t n = grid.u_count();
    if (n < 5) {
        throw PmcError(ErrorKind::GridTooSmall, "need at least 5 u-nodes, got " + std::to_string(n));
    }
    if (!(h > 0.0)) throw PmcError(ErrorKind::InvalidArgument, "h must be positive");
    for (std::size_t i = 1; i < n; ++i) {
        const double du = prof.u_nodes[i] - prof.u_nodes[i - 1];
        if (std::abs(du - h) > 1e-9 * h) {
            throw PmcError(ErrorKind::NonUniformGrid, "u spacing " + std::to_string(du) + " differs from h");
        }
    }
    if (!(options.window >= 0.0 && options.window < 0.5)) {
        throw PmcError(ErrorKind::InvalidArgument, "window must lie in [0, 0.5)");
    }

    const ModelParams& prm = prof.params;
    const double b = prm.b;
    const double b2 = b * b;
    const double rho = prm.rho;
    const std::size_t nv = grid.v_count();
    const std::size_t j0 = nearest_to_zero(grid.v_nodes);

    // Verification window in sin^2.
    const SinSqInterval iv = core::branch_interval(prm);
    const double margin = options.window * iv.width();
    auto in_window = [&](double s) {
        if (!(s >= iv.lo + margin)) return false;
        return iv.hi_closed ? s <= iv.hi : s <= iv.hi - margin;
    };
    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = grid.at(i, j0);
        const bool interior = options.include_boundary || (i > 0 && i + 1 < n);
        if (interior && in_window(core::sin_sq(cell.alpha))) window.push_back(i);
    }
    if (window.size() < 3) {
        throw PmcError(ErrorKind::GridTooSmall, "fewer than 3 nodes inside the verification window");
    }

    // Slice samples along u at v = v[j0].
    std::vector<double> u = prof.u_nodes, alpha(n), g(n), log_abs_mu(n), abs_a2(n), y2(n), log_mu2c(n);
    std::vector<cplx> a(n), mu(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = grid.at(i, j0);
        alpha[i] = cell.alpha;
        g[i] = cell.g;
        a[i] = cell.a;
        mu[i] = cell.mu;
        c[i] = cell.c;
        log_abs_mu[i] = std::log(std::abs(cell.mu));
        abs_a2[i] = std::norm(cell.a);
        y2[i] = cell.tau.imag() * cell.tau.imag();
        log_mu2c[i] = std::log(std::norm(cell.mu) * std::abs(cell.c));
    }

    // Exact v-independence of every field across slices.
    double slice_spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ref = grid.at(i, j0);
        for (std::size_t j = 0; j < nv; ++j) {
            const auto& cell = grid.at(i, j);
            fold(slice_spread, std::abs(cell.alpha - ref.alpha));
            fold(slice_spread, std::abs(cell.mu - ref.mu));
            if (ref.valid) fold(slice_spread, std::abs(cell.c - ref.c));
        }
    }

    const double v_step = nv >= 2 ? grid.v_nodes[1] - grid.v_nodes[0] : 0.0;

    ResidualReport report;
    auto add = [&](const char* name, double value, std::string note = {}, bool applicable = true) {
        const ResidualDef& s = def_for(name);
        ResidualEntry e;
        e.name = s.name;
        e.identity = s.identity;
        e.kind = s.kind;
        e.max_abs = std::isnan(value) ? kInf : value;
        e.tolerance = options.tolerances.for_entry(s.name, h);
        e.applicable = applicable;
        e.pass = !applicable || e.max_abs <= e.tolerance;
        e.note = std::move(note);
        report.entries.push_back(std::move(e));
    };

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto cot = [](double x) { return std::cos(x) / std::sin(x); };

    // 1. dalpha: alpha_u = 2 Re((a+b) mu), alpha_v = -2 Im((a+b) mu).
    {
        double r = 0.0;
        for (auto i : window) {
            const cplx amu = (a[i] + b) * mu[i];
            fold(r, std::abs(derivative(u, alpha, i) - 2.0 * amu.real()));
            if (nv >= 2) {
                for (std::size_t j = 0; j < nv; ++j) {
                    double dv = 0.0;
                    if (nv == 2) {
                        dv = (grid.at(i, 1).alpha - grid.at(i, 0).alpha) / v_step;
                    } else {
                        std::vector<double> vs(nv), al(nv);
                        for (std::size_t k = 0; k < nv; ++k) {
                            vs[k] = grid.v_nodes[k];
                            al[k] = grid.at(i, k).alpha;
                        }
                        dv = derivative(vs, al, j);
                    }
                    fold(r, std::abs(dv + 2.0 * amu.imag()));
                }
            }
        }
        add("dalpha_structure", r, nv >= 2 ? "" : "alpha_v not evaluated: single v node");
    }

    // 2. dphi: mu_u / |mu|^2 + 2 (conj(a) - b) cot(alpha) = 0.
    {
        double r = 0.0;
        for (auto i : window) {
            const cplx lhs = derivative(u, mu, i) / std::norm(mu[i]);
            fold(r, std::abs(lhs + 2.0 * (std::conj(a[i]) - b) * cot(alpha[i])) / b);
        }
        add("dphi_structure", r);
    }

    // 3. Codazzi for a: a_u mu / |mu|^2 = 2 (2a(conj(a)-b) cot + 3/2 rho sin cos).
    {
        double r = 0.0;
        for (auto i : window) {
            const double al = alpha[i];
            const cplx lhs = derivative(u, a, i) * mu[i] / std::norm(mu[i]);
            const cplx rhs =
                2.0 * (2.0 * a[i] * (std::conj(a[i]) - b) * cot(al) + 1.5 * rho * std::sin(al) * std::cos(al));
            fold(r, std::abs(lhs - rhs) / b2);
        }
        add("codazzi_a", r);
    }

    // 4. Codazzi for c: c_u conj(mu) / |mu|^2 = 4 c (a - b) cot.
    {
        double r = grid.valid() ? slice_spread : nan;
        for (auto i : window) {
            const cplx lhs = derivative(u, c, i) * std::conj(mu[i]) / std::norm(mu[i]);
            fold(r, std::abs(lhs - 4.0 * c[i] * (a[i] - b) * cot(alpha[i])) / b2);
        }
        add("codazzi_c", r, grid.valid() ? "" : "c undefined on part of the grid");
    }

    // 5. Gauss: K of the conformal metric |mu|^2 |dw|^2.
    {
        double r = 0.0;
        for (auto i : window) {
            for (std::size_t j = 0; j < nv; ++j) {
                double lap = second_derivative(log_abs_mu, i, h);
                if (nv >= 3 && j > 0 && j + 1 < nv) {
                    const auto f = [&](std::size_t k) { return std::log(std::abs(grid.at(i, k).mu)); };
                    lap += (f(j + 1) - 2.0 * f(j) + f(j - 1)) / (v_step * v_step);
                }
                const double k_metric = -lap / std::norm(grid.at(i, j).mu);
                fold(r, std::abs(k_metric - grid.at(i, j).K_gauss) / b2);
            }
        }
        add("gauss_consistency", r);
    }

    // 6. Ricci: radicand > 0 at every node.
    {
        double min_rad = kInf;
        for (std::size_t i = 0; i < n; ++i) min_rad = std::min(min_rad, grid.at(i, j0).radicand);
        std::string note;
        if (!grid.valid()) {
            note = std::to_string(grid.invalid_u.size()) + " of " + std::to_string(n) + " nodes have |c|^2 < 0";
        }
        add("ricci_radicand", -min_rad / b2, note);
    }

    // 7. Hopf: relative deviation of both coefficients from their window means.
    {
        double r = grid.valid() ? 0.0 : nan;
        if (grid.valid()) {
            std::vector<cplx> p1(n), p2(n);
            for (std::size_t i = 0; i < n; ++i) {
                p1[i] = grid.at(i, j0).hopf.phi1_coeff;
                p2[i] = grid.at(i, j0).hopf.phi2_coeff;
            }
            const cplx m1 = mean_of(p1, window);
            const cplx m2 = mean_of(p2, window);
            for (auto i : window) {
                fold(r, std::abs(p1[i] - m1) / std::abs(m1));
                fold(r, std::abs(p2[i] - m2) / std::abs(m2));
            }
        }
        add("hopf_constancy", r, grid.valid() ? "" : "c undefined on part of the grid");
    }

    // 8-11. Derivatives in alpha, on the nonuniform alpha lattice. Each side
    // grows without bound toward the endpoints, so these are relative to the
    // size of the terms, floored at the natural unit.
    {
        double r_mu = 0.0, r_a = 0.0, r_y = 0.0, r_33 = 0.0;
        for (auto i : window) {
            const double al = alpha[i];
            const cplx dmu = core::dlogmu_dalpha(al, a[i], b);
            fold(r_mu, std::abs(derivative(alpha, mu, i) / mu[i] - dmu) / (std::abs(dmu) + 1.0));
            const cplx da = core::da_dalpha(al, a[i], b, rho);
            fold(r_a, std::abs(derivative(alpha, a, i) - da) / (std::abs(da) + b));
            const double dy2 = derivative(alpha, y2, i);
            const double y_scale = std::abs(dy2) + std::abs(dy2 - core::y_ode_residual(al, y2[i], dy2)) + 1.0;
            fold(r_y, std::abs(core::y_ode_residual(al, y2[i], dy2)) / y_scale);
            const double d33 = core::d_abs_a_sq_dalpha(al, a[i], b, rho);
            fold(r_33, std::abs(derivative(alpha, abs_a2, i) - d33) / (std::abs(d33) + b2));
        }
        add("mu_ode", r_mu);
        add("a_ode", r_a);
        add("y_ode_36", r_y);
        add("eq_33", r_33);
    }

    // 12. k1 = 0.
    {
        double r = 0.0;
        // k1 is 0/0 at the endpoints where a + b and |c| vanish together.
        for (auto i : window) {
            fold(r, std::abs(core::k1_expression(alpha[i], a[i], mu[i], b, rho)) / (b * std::abs(mu[i])));
        }
        for (std::size_t i = 0; i < n; ++i) fold(r, std::abs(core::identity_31_residual(alpha[i], a[i], b)) / b2);
        add("k1_zero", grid.valid() ? r : nan);
    }

    // 13. log(|mu|^2 |c|) is constant along u.
    {
        double r = grid.valid() ? 0.0 : nan;
        if (grid.valid()) {
            for (auto i : window) fold(r, std::abs(derivative(u, log_mu2c, i)));
        }
        add("log_mu2c_const", r);
    }

    // 14. gamma constant with the predicted modulus.
    {
        double r = grid.valid() ? 0.0 : nan;
        if (grid.valid()) {
            std::vector<cplx> gam(n);
            for (std::size_t i = 0; i < n; ++i) gam[i] = grid.at(i, j0).hopf.gamma;
            // gamma is 0/0 at the 8/9 endpoint, so only the window counts.
            const cplx gm = mean_of(gam, window);
            const double predicted = 2.0 * (8.0 - 9.0 * prm.c3);
            for (auto i : window) {
                fold(r, std::abs(std::norm(gam[i]) - predicted));
                fold(r, std::abs(gam[i] - gm));
            }
        }
        add("gamma_lemma42", r);
    }

    // 15. K <= -2b^2 (only claimed for 8 - 9 c3 > 0).
    {
        const bool applicable = 8.0 - 9.0 * prm.c3 > 0.0;
        double kmax = -kInf;
        for (std::size_t i = 0; i < n; ++i) kmax = std::max(kmax, grid.at(i, j0).K_closed);
        add("curvature_bound", (kmax + 2.0 * b2) / b2, applicable ? "" : "not applicable: 8 - 9 c3 < 0",
            applicable);
    }

    // 16. Gauss equation vs closed-form curvature.
    {
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            fold(r, std::abs(grid.at(i, j0).K_gauss - grid.at(i, j0).K_closed) / b2);
        }
        add("closed_form_K", r);
    }

    report.verdict = std::all_of(report.entries.begin(), report.entries.end(), [](const auto& e) { return e.pass; });
    auto& pv = report.provenance;
    pv.params = prm;
    pv.u_count = n;
    pv.v_count = nv;
    pv.window_count = window.size();
    pv.h = h;
    pv.v_step = v_step;
    pv.delta = prof.delta;
    pv.window = options.window;
    pv.u_min = prof.u_nodes.front();
    pv.u_max = prof.u_nodes.back();
    pv.stop_reason = prof.stop_reason;
    pv.invalid_nodes = grid.invalid_u.size();
    return report;
}

family::SurfaceGrid build_family_grid(const ModelParams& params, const FamilySetup& setup) {
    const double alpha0 = std::isnan(setup.alpha0) ? family::default_alpha0(params) : setup.alpha0;
    const auto profile = family::integrate_profile(params, alpha0, setup.u_span, setup.h, setup.integrator);
    const double v_step = setup.v_step > 0.0 ? setup.v_step : setup.h;
    return family::build_grid(profile, family::make_v_nodes(setup.v_count, v_step));
}

ResidualReport verify_family(const ModelParams& params, const FamilySetup& setup) {
    return run_residual_suite(build_family_grid(params, setup), setup.h, setup.suite);
}

ResidualReport negative_control(const ModelParams& params, double rho_scale, const FamilySetup& setup) {
    if (!std::isfinite(rho_scale)) throw PmcError(ErrorKind::InvalidArgument, "rho_scale must be finite");
    ModelParams perturbed = params;
    perturbed.rho = -3.0 * params.b * params.b * rho_scale;
    return verify_family(perturbed, setup);
}

void attach_orders(ResidualReport& coarse, const ResidualReport& fine) {
    const double ratio = coarse.provenance.h / fine.provenance.h;
    for (auto& e : coarse.entries) {
        if (e.kind == ResidualKind::Analytic || !e.applicable) continue;
        const double rf = fine.entry(e.name).max_abs;
        if (e.max_abs > 0.0 && rf > 0.0 && std::isfinite(e.max_abs) && std::isfinite(rf)) {
            e.order = std::log(e.max_abs / rf) / std::log(ratio);
        }
    }
}

const ConvergenceRow& ConvergenceTable::row(std::string_view name) const {
    for (const auto& r : rows) {
        if (r.name == name) return r;
    }
    throw PmcError(ErrorKind::InvalidArgument, "no convergence row '" + std::string(name) + "'");
}

ConvergenceTable convergence_study(const ModelParams& params, const FamilySetup& setup,
                                   const std::vector<double>& h_list) {
    if (h_list.size() < 3) throw PmcError(ErrorKind::InvalidArgument, "convergence study needs >= 3 steps");
    for (std::size_t k = 1; k < h_list.size(); ++k) {
        const double q = h_list[k - 1] / h_list[k];
        const double q0 = h_list[0] / h_list[1];
        if (!(q > 1.0) || std::abs(q - std::round(q)) > 1e-9 * q || std::abs(q - q0) > 1e-9 * q0) {
            throw PmcError(ErrorKind::InvalidArgument,
                           "steps must decrease geometrically with an integer ratio");
        }
    }

    std::vector<ResidualReport> reports;
    std::vector<family::SurfaceGrid> grids;
    for (const double h : h_list) {
        FamilySetup s = setup;
        s.h = h;
        grids.push_back(build_family_grid(params, s));
        reports.push_back(run_residual_suite(grids.back(), h, s.suite));
    }

    ConvergenceTable table;
    table.h_list = h_list;
    for (const auto& name : residual_names()) {
        ConvergenceRow row;
        row.name = name;
        row.kind = residual_kind(name);
        for (const auto& r : reports) row.values.push_back(r.entry(name).max_abs);
        if (row.kind != ResidualKind::Analytic) {
            for (std::size_t k = 1; k < row.values.size(); ++k) {
                row.orders.push_back(std::log(row.values[k - 1] / row.values[k]) /
                                     std::log(h_list[k - 1] / h_list[k]));
            }
        }
        table.rows.push_back(std::move(row));
    }

    // Terminal alpha: last forward node of the coarsest run inside the
    // verification window, which every finer lattice also contains.
    const auto& coarse = grids.front().profile;
    const SinSqInterval iv = core::branch_interval(params);
    const double margin = setup.suite.window * iv.width();
    std::size_t last = coarse.origin;
    for (std::size_t i = coarse.origin; i < coarse.size(); ++i) {
        const double s = core::sin_sq(coarse.alpha[i]);
        const bool inside = s >= iv.lo + margin && (iv.hi_closed ? s <= iv.hi : s <= iv.hi - margin);
        if (!inside) break;
        last = i;
    }
    const long steps = static_cast<long>(last - coarse.origin);
    if (steps == 0) throw PmcError(ErrorKind::GridTooSmall, "no forward node inside the verification window");
    table.terminal_u = coarse.u_nodes[last];

    ConvergenceRow term;
    term.name = std::string(kTerminalAlphaRow);
    term.kind = ResidualKind::Integrator;
    std::vector<double> vals;
    for (std::size_t k = 0; k < grids.size(); ++k) {
        const auto& p = grids[k].profile;
        const long factor = std::lround(h_list[0] / h_list[k]);
        const std::size_t idx = p.origin + static_cast<std::size_t>(steps * factor);
        if (idx >= p.size()) throw PmcError(ErrorKind::GridTooSmall, "finer run stops before the terminal node");
        vals.push_back(p.alpha[idx]);
    }
    term.values = vals;
    for (std::size_t k = 2; k < vals.size(); ++k) {
        const double d1 = std::abs(vals[k - 2] - vals[k - 1]);
        const double d2 = std::abs(vals[k - 1] - vals[k]);
        term.orders.push_back(std::log(d1 / d2) / std::log(h_list[k - 1] / h_list[k]));
    }
    table.rows.push_back(std::move(term));
    return table;
}

} // namespace pmclab::verify
