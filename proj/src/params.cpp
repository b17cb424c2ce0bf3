#include "pmclab/params.hpp"

#include <cmath>

#include "pmclab/errors.hpp"

namespace pmclab {

std::string_view to_string(Branch b) noexcept {
    switch (b) {
    case Branch::LowPos: return "LowPos";
    case Branch::HighPos: return "HighPos";
    case Branch::Neg: return "Neg";
    }
    return "?";
}

std::string_view to_string(ImSign s) noexcept { return s == ImSign::Plus ? "Plus" : "Minus"; }

std::string_view to_string(AlphaSide s) noexcept {
    return s == AlphaSide::AcuteSide ? "AcuteSide" : "ObtuseSide";
}

std::optional<Branch> parse_branch(std::string_view text) {
    if (text == "LowPos" || text == "lowpos" || text == "low") return Branch::LowPos;
    if (text == "HighPos" || text == "highpos" || text == "high") return Branch::HighPos;
    if (text == "Neg" || text == "neg") return Branch::Neg;
    return std::nullopt;
}

std::optional<ImSign> parse_im_sign(std::string_view text) {
    if (text == "Plus" || text == "plus" || text == "+") return ImSign::Plus;
    if (text == "Minus" || text == "minus" || text == "-") return ImSign::Minus;
    return std::nullopt;
}

std::optional<AlphaSide> parse_alpha_side(std::string_view text) {
    if (text == "AcuteSide" || text == "acute") return AlphaSide::AcuteSide;
    if (text == "ObtuseSide" || text == "obtuse") return AlphaSide::ObtuseSide;
    return std::nullopt;
}

bool SinSqInterval::contains(double s, double guard) const noexcept {
    if (!(s > lo + guard)) return false;
    return hi_closed ? s <= hi : s < hi - guard;
}

bool is_degenerate_c3(double c3) noexcept {
    return c3 == 0.0 || std::abs(c3 - kEightNinths) <= 1e-14;
}

Branch default_branch(double c3) {
    if (is_degenerate_c3(c3)) {
        throw PmcError(ErrorKind::DegenerateConstant, "c3 must differ from 0 and 8/9");
    }
    if (c3 < 0.0) return Branch::Neg;
    return c3 < kEightNinths ? Branch::LowPos : Branch::HighPos;
}

void ModelParams::validate() const {
    if (!std::isfinite(b) || !(b > 0.0)) {
        throw PmcError(ErrorKind::InvalidArgument, "b must be positive and finite");
    }
    if (!std::isfinite(c3) || !std::isfinite(rho)) {
        throw PmcError(ErrorKind::InvalidArgument, "c3 and rho must be finite");
    }
    if (default_branch(c3) != branch) {
        throw PmcError(ErrorKind::InvalidArgument,
                       "branch " + std::string(to_string(branch)) + " does not exist for c3 = " +
                           std::to_string(c3));
    }
}

ModelParams ModelParams::family(double b, double c3, std::optional<Branch> branch, ImSign sign,
                                AlphaSide side) {
    ModelParams p;
    p.b = b;
    p.c3 = c3;
    p.rho = -3.0 * b * b;
    p.branch = branch ? *branch : default_branch(c3);
    p.im_sign = sign;
    p.alpha_side = side;
    p.validate();
    return p;
}

} // namespace pmclab
