#pragma once

// Front end: configuration, serialization of grids and reports, the c3 sweep
// and the subcommand dispatcher. The executable in tools/ only forwards argv
// to run_cli, so everything here can be driven in-process by tests.

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmclab/errors.hpp"
#include "pmclab/family_integrator.hpp"
#include "pmclab/params.hpp"
#include "pmclab/verifier.hpp"

namespace pmclab::cli {

enum class OutputFormat { CSV, JSON };

/// Process exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitVerifyFail = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitIntegration = 3;
inline constexpr int kExitUsage = 64;

/// Bad flags, config lines or values.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ModelParams params;
    verify::FamilySetup setup;
    double rho_scale = 1.0;
    std::string out;
    OutputFormat format = OutputFormat::CSV;
};

/// Flat `key = value` file; '#' starts a comment. Throws UsageError on a line
/// without '=' or on a repeated key.
[[nodiscard]] std::map<std::string, std::string> parse_config_text(const std::string& text);
[[nodiscard]] std::map<std::string, std::string> load_config_file(const std::string& path);

/// Builds a RunConfig from flag-named settings ("c3", "u-span", "tol.codazzi_a", ...).
/// Unknown keys, unparsable numbers and out-of-range values throw UsageError;
/// `default_format` applies when "format" is absent.
[[nodiscard]] RunConfig config_from_settings(const std::map<std::string, std::string>& settings,
                                             OutputFormat default_format);

/// Round-trip formatting: %.17g, with nan/inf spelled out.
[[nodiscard]] std::string format_double(double x);

inline constexpr const char* kGridCsvHeader =
    "u,v,alpha,re_a,im_a,re_mu,im_mu,re_c,im_c,g,K_closed,K_gauss,re_phi1,im_phi1,re_phi2,im_phi2,re_gamma,im_gamma";

void write_grid_csv(const family::SurfaceGrid& grid, std::ostream& os);
[[nodiscard]] nlohmann::ordered_json grid_to_json(const family::SurfaceGrid& grid);

[[nodiscard]] nlohmann::ordered_json params_to_json(const ModelParams& params);
[[nodiscard]] nlohmann::ordered_json report_to_json(const verify::ResidualReport& report);
void write_report_csv(const verify::ResidualReport& report, std::ostream& os);

struct SweepRow {
    double c3 = 0.0;
    Branch branch = Branch::LowPos;
    double sin2alpha = 0.0;
    double alpha = 0.0;
    double K_closed = 0.0;
    double K_gauss = 0.0;
    /// Supremum of K_closed over the whole interval (attained at an end).
    double K_sup = 0.0;
    /// K_closed at sin^2 = 8/9.
    double K_limit_8_9 = 0.0;
    double ricci_radicand = 0.0;
    /// Signed |gamma|^2 minus 2(8 - 9c3).
    double gamma_sq_defect = 0.0;
    /// K <= -2b^2 + 1e-9 b^2; not claimed (std::nullopt) when 8 - 9c3 < 0.
    std::optional<bool> bound_ok;
    bool gamma_ok = false;
};

struct SweepOptions {
    double b = 1.0;
    double c3_min = 0.1;
    double c3_max = 0.8;
    int steps = 8;
    int samples = 1000;
};

inline constexpr double kSweepBoundTol = 1e-9;
inline constexpr double kSweepGammaTol = 1e-8;

/// c3 runs over `steps` evenly spaced values in [c3_min, c3_max]; each
/// admissible interval gets `samples` interior points (the closed end of the
/// Neg interval is included). Throws DegenerateConstant when the range
/// touches 0 or 8/9.
[[nodiscard]] std::vector<SweepRow> sweep(const SweepOptions& options);

inline constexpr const char* kSweepCsvHeader =
    "c3,branch,sin2alpha,alpha,K_closed,K_gauss,K_sup,K_limit_8_9,ricci_radicand,gamma_sq_defect,bound_ok,gamma_ok";

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

void write_convergence_csv(const verify::ConvergenceTable& table, std::ostream& os);

/// "sin²α ∈ (0.5, 0.888889)" style description of one interval.
[[nodiscard]] std::string describe_interval(const SinSqInterval& interval);

/// Exit code for a library error.
[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

/// args excludes the program name. Subcommands: interval, family, verify,
/// sweep, convergence.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pmclab::cli
