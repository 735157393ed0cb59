#pragma once

#include <stdexcept>
#include <string>

namespace ellreg {

/// Base of every error raised by the library. `kind()` is a stable tag used in
/// structured error records emitted by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define ELLREG_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

ELLREG_DEFINE_ERROR(InvalidArgument);
ELLREG_DEFINE_ERROR(ChannelMismatch);
ELLREG_DEFINE_ERROR(GridMismatch);
ELLREG_DEFINE_ERROR(FormatError);
ELLREG_DEFINE_ERROR(SingularMultiplier);
ELLREG_DEFINE_ERROR(EpsilonOutOfRange);
ELLREG_DEFINE_ERROR(SingularSymbol);
ELLREG_DEFINE_ERROR(NotContracting);
ELLREG_DEFINE_ERROR(SupportViolation);
ELLREG_DEFINE_ERROR(ZeroRHS);
ELLREG_DEFINE_ERROR(IncommensurableDelta);

#undef ELLREG_DEFINE_ERROR

} // namespace ellreg
