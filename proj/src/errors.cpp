#include "pmclab/errors.hpp"

namespace pmclab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DegenerateConstant: return "DegenerateConstant";
    case ErrorKind::OutsideAdmissibleRegion: return "OutsideAdmissibleRegion";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::SingularAngle: return "SingularAngle";
    case ErrorKind::NegativeRadicand: return "NegativeRadicand";
    case ErrorKind::ZeroC: return "ZeroC";
    case ErrorKind::InadmissibleStart: return "InadmissibleStart";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::NonUniformGrid: return "NonUniformGrid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace pmclab
