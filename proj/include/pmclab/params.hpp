#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pmclab {

inline constexpr double kEightNinths = 8.0 / 9.0;

/// Distance in sin^2(alpha) below which points count as sitting on an
/// interval endpoint.
inline constexpr double kDefaultEndpointGuard = 1e-6;

/// Which admissible interval of sin^2(alpha) a family lives on.
///   LowPos  : c3 > 0, (c3, 8/9)
///   HighPos : c3 > 8/9, (8/9, min(c3, 1))
///   Neg     : c3 < 0, (8/9, 1]
enum class Branch { LowPos, HighPos, Neg };
enum class ImSign { Plus, Minus };
enum class AlphaSide { AcuteSide, ObtuseSide };

[[nodiscard]] std::string_view to_string(Branch b) noexcept;
[[nodiscard]] std::string_view to_string(ImSign s) noexcept;
[[nodiscard]] std::string_view to_string(AlphaSide s) noexcept;
[[nodiscard]] std::optional<Branch> parse_branch(std::string_view text);
[[nodiscard]] std::optional<ImSign> parse_im_sign(std::string_view text);
[[nodiscard]] std::optional<AlphaSide> parse_alpha_side(std::string_view text);

/// Open interval (lo, hi) of sin^2(alpha); `hi_closed` marks the Neg branch
/// whose upper end sin^2 = 1 is attained (alpha = pi/2) and is not singular.
struct SinSqInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool hi_closed = false;

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] double midpoint() const noexcept { return 0.5 * (lo + hi); }

    /// True when s lies inside the interval and at least `guard` away from
    /// every singular endpoint. A closed upper end is never singular.
    [[nodiscard]] bool contains(double s, double guard = 0.0) const noexcept;

    [[nodiscard]] bool operator==(const SinSqInterval&) const = default;
};

/// Defining constants of one member of the family. `rho` is kept as a field
/// so negative controls can perturb it; the constructed family always has
/// rho = -3 b^2.
struct ModelParams {
    double b = 1.0;
    double c3 = 0.5;
    double rho = -3.0;
    Branch branch = Branch::LowPos;
    ImSign im_sign = ImSign::Plus;
    AlphaSide alpha_side = AlphaSide::AcuteSide;

    /// -c3 for the Neg branch, 0 otherwise.
    [[nodiscard]] double c4() const noexcept { return c3 < 0.0 ? -c3 : 0.0; }
    [[nodiscard]] double im_sign_factor() const noexcept { return im_sign == ImSign::Plus ? 1.0 : -1.0; }

    /// Throws PmcError(DegenerateConstant) for c3 in {0, 8/9} and
    /// PmcError(InvalidArgument) for b <= 0 or a branch that does not match
    /// the sign of c3. rho is not checked.
    void validate() const;

    /// Family member with rho = -3 b^2 and a branch chosen from c3 unless
    /// given explicitly.
    [[nodiscard]] static ModelParams family(double b, double c3,
                                            std::optional<Branch> branch = std::nullopt,
                                            ImSign sign = ImSign::Plus,
                                            AlphaSide side = AlphaSide::AcuteSide);
};

/// LowPos for 0 < c3 < 8/9, HighPos for c3 > 8/9, Neg for c3 < 0.
/// Throws DegenerateConstant for the two excluded constants.
[[nodiscard]] Branch default_branch(double c3);

/// Returns true when c3 is one of the excluded constants (0 or 8/9), within a
/// relative tolerance of a few ulps.
[[nodiscard]] bool is_degenerate_c3(double c3) noexcept;

} // namespace pmclab
