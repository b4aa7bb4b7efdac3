#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sclbf {

enum class ErrorCode {
    InvalidArgument,
    NotSpd,
    NotHurwitz,
    SingularSystem,
    InvalidUnsafeSet,
    LevelTooSmall,
    MarginInfeasible,
    EmptyCOmega,
    GridTooCoarse,
    RankDeficient,
    SingularInputMatrix,
    NearSingular,
    NonFiniteState,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// command layer can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sclbf
