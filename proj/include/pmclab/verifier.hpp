#pragma once

// Residual suite for a constructed SurfaceGrid. Each entry checks one local
// identity of the surface (structure equations, Codazzi and Gauss equations,
// Hopf differentials, closed forms) either analytically at the nodes or with
// second-order finite differences along the grid.
//
// Conventions shared by all entries:
//  * two-form identities are reduced to coordinates with
//    dw ^ dw_bar = -2i du ^ dv and divided by the area coefficient |mu|^2;
//  * every residual is made dimensionless by the power of b that the
//    residual scales with;
//  * max-norms run over the verification window: the nodes whose sin^2 lies
//    at least `window` * (interval width) away from each singular endpoint,
//    boundary nodes excluded.

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmclab/family_integrator.hpp"
#include "pmclab/params.hpp"

namespace pmclab::verify {

/// FiniteDifference entries carry truncation error O(h^2); Integrator
/// entries only see the RK4 error O(h^4); Analytic entries are
/// h-independent identities.
enum class ResidualKind { FiniteDifference, Integrator, Analytic };

[[nodiscard]] std::string_view to_string(ResidualKind k) noexcept;

struct ResidualEntry {
    std::string name;
    std::string identity;
    ResidualKind kind = ResidualKind::Analytic;
    double max_abs = 0.0;
    double tolerance = 0.0;
    std::optional<double> order;
    bool applicable = true;
    bool pass = false;
    std::string note;
};

struct ReportProvenance {
    ModelParams params;
    std::size_t u_count = 0;
    std::size_t v_count = 0;
    std::size_t window_count = 0;
    double h = 0.0;
    double v_step = 0.0;
    double delta = 0.0;
    double window = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    family::StopReason stop_reason = family::StopReason::SpanExhausted;
    std::size_t invalid_nodes = 0;
};

struct ResidualReport {
    std::vector<ResidualEntry> entries;
    bool verdict = false;
    ReportProvenance provenance;

    [[nodiscard]] const ResidualEntry& entry(std::string_view name) const;
    [[nodiscard]] std::vector<std::string> failing() const;
};

/// Names of the sixteen residuals, in report order.
[[nodiscard]] const std::vector<std::string>& residual_names();

[[nodiscard]] ResidualKind residual_kind(std::string_view name);

/// Default tolerances. FiniteDifference entries scale as coefficient * h^2,
/// log_mu2c_const as coefficient * h^4, the rest are fixed. Explicit
/// overrides are absolute.
class Tolerances {
public:
    /// Throws InvalidArgument for an unknown residual name or a negative
    /// value.
    void set(const std::string& name, double value);
    [[nodiscard]] double for_entry(std::string_view name, double h) const;
    [[nodiscard]] const std::map<std::string, double>& overrides() const noexcept { return overrides_; }

private:
    std::map<std::string, double> overrides_;
};

struct SuiteOptions {
    double window = 0.05;
    bool include_boundary = false;
    Tolerances tolerances;
};

/// Throws GridTooSmall (fewer than 5 u-nodes, or fewer than 3 in the
/// window) and NonUniformGrid (u spacing differs from h).
[[nodiscard]] ResidualReport run_residual_suite(const family::SurfaceGrid& grid, double h,
                                                const SuiteOptions& options = {});

/// Everything needed to build a grid and verify it.
struct FamilySetup {
    /// NaN selects family::default_alpha0.
    double alpha0 = std::numeric_limits<double>::quiet_NaN();
    double u_span = 0.5;
    double h = 1e-3;
    int v_count = 5;
    /// 0 means "same as h".
    double v_step = 0.0;
    family::IntegratorOptions integrator;
    SuiteOptions suite;
};

[[nodiscard]] family::SurfaceGrid build_family_grid(const ModelParams& params, const FamilySetup& setup);

[[nodiscard]] ResidualReport verify_family(const ModelParams& params, const FamilySetup& setup);

/// Rebuilds the family with rho = -3 b^2 * rho_scale while a(alpha) keeps its
/// closed form, then runs the suite.
[[nodiscard]] ResidualReport negative_control(const ModelParams& params, double rho_scale,
                                              const FamilySetup& setup = {});

/// Fills `order` in `coarse` from the same suite run at a finer step:
/// log(r_coarse / r_fine) / log(h_coarse / h_fine). Analytic entries stay
/// empty.
void attach_orders(ResidualReport& coarse, const ResidualReport& fine);

struct ConvergenceRow {
    std::string name;
    ResidualKind kind = ResidualKind::Analytic;
    std::vector<double> values;
    /// One per consecutive pair of steps; empty for Analytic rows.
    std::vector<double> orders;
};

struct ConvergenceTable {
    std::vector<double> h_list;
    std::vector<ConvergenceRow> rows;
    /// u of the node used for the terminal-alpha row.
    double terminal_u = 0.0;

    [[nodiscard]] const ConvergenceRow& row(std::string_view name) const;
};

inline constexpr std::string_view kTerminalAlphaRow = "integrator_terminal_alpha";

/// Needs at least three steps forming a decreasing geometric sequence with
/// integer ratio. Adds a terminal-alpha row whose orders come from
/// successive differences at a common lattice node.
[[nodiscard]] ConvergenceTable convergence_study(const ModelParams& params, const FamilySetup& setup,
                                                 const std::vector<double>& h_list);

} // namespace pmclab::verify
