#include "stormgrid/error.hpp"

namespace stormgrid {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MissingBus: return "MissingBus";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::NonPositiveReactance: return "NonPositiveReactance";
    case ErrorKind::NonPositiveLimit: return "NonPositiveLimit";
    case ErrorKind::DisconnectedBaseGraph: return "DisconnectedBaseGraph";
    case ErrorKind::InsufficientGeneration: return "InsufficientGeneration";
    case ErrorKind::ZeroLengthCorridor: return "ZeroLengthCorridor";
    case ErrorKind::ZeroMassBin: return "ZeroMassBin";
    case ErrorKind::NondegenerateRangeRequired: return "NondegenerateRangeRequired";
    case ErrorKind::SingleClassDataset: return "SingleClassDataset";
    case ErrorKind::EmptyOutOfBag: return "EmptyOutOfBag";
    case ErrorKind::AllColumnsConstant: return "AllColumnsConstant";
    case ErrorKind::DegenerateImportance: return "DegenerateImportance";
    case ErrorKind::NonReciprocalMatrix: return "NonReciprocalMatrix";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownFeature: return "UnknownFeature";
    case ErrorKind::UnknownCorridor: return "UnknownCorridor";
    case ErrorKind::NumericFailure: return "NumericFailure";
    }
    return "Error";
}

}  // namespace stormgrid
