#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lochs {

// Base of the library's error taxonomy. `code()` is a stable machine-readable
// tag used by the CLI report writer; `what()` carries the human diagnostic,
// including any witness data.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define LOCHS_DEFINE_ERROR(NAME)                                     \
    struct NAME : Error {                                            \
        explicit NAME(const std::string& w) : Error(#NAME, w) {}     \
    }

// linalg
LOCHS_DEFINE_ERROR(NonHermitian);
LOCHS_DEFINE_ERROR(DidNotConverge);
LOCHS_DEFINE_ERROR(NotCommuting);
LOCHS_DEFINE_ERROR(NotNormal);
LOCHS_DEFINE_ERROR(InvalidArgument);

// measure limits
LOCHS_DEFINE_ERROR(InvalidChain);
LOCHS_DEFINE_ERROR(IncompatibleFamily);
LOCHS_DEFINE_ERROR(NotMeasurable);

// locally bounded operators
LOCHS_DEFINE_ERROR(NotLocallyBounded);
LOCHS_DEFINE_ERROR(ChainMismatch);

// direct integrals
LOCHS_DEFINE_ERROR(InvalidFibers);
LOCHS_DEFINE_ERROR(SpaceMismatch);
LOCHS_DEFINE_ERROR(UnsupportedFamily);
LOCHS_DEFINE_ERROR(NotInFiber);

// disintegration
LOCHS_DEFINE_ERROR(NotAbelian);
LOCHS_DEFINE_ERROR(SpectrumMismatch);
LOCHS_DEFINE_ERROR(ZeroWeightPoint);
LOCHS_DEFINE_ERROR(IsometryDefect);
LOCHS_DEFINE_ERROR(SurjectivityDefect);

// io / cli
LOCHS_DEFINE_ERROR(ParseError);
LOCHS_DEFINE_ERROR(UnknownName);

#undef LOCHS_DEFINE_ERROR

} // namespace lochs
