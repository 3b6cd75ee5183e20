#pragma once

#include <stdexcept>
#include <string>

namespace stormgrid {

enum class ErrorKind {
    ParseError,
    InvalidArgument,
    MissingBus,
    DuplicateId,
    NonPositiveReactance,
    NonPositiveLimit,
    DisconnectedBaseGraph,
    InsufficientGeneration,
    ZeroLengthCorridor,
    ZeroMassBin,
    NondegenerateRangeRequired,
    SingleClassDataset,
    EmptyOutOfBag,
    AllColumnsConstant,
    DegenerateImportance,
    NonReciprocalMatrix,
    DimensionMismatch,
    UnknownFeature,
    UnknownCorridor,
    NumericFailure,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    bool numeric() const noexcept { return kind_ == ErrorKind::NumericFailure; }

private:
    ErrorKind kind_;
};

}  // namespace stormgrid
