#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmclab {

enum class ErrorKind {
    DegenerateConstant,
    OutsideAdmissibleRegion,
    SingularDenominator,
    SingularAngle,
    NegativeRadicand,
    ZeroC,
    InadmissibleStart,
    NonFiniteState,
    GridTooSmall,
    NonUniformGrid,
    InvalidArgument,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code without parsing messages.
class PmcError : public std::runtime_error {
public:
    PmcError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace pmclab
