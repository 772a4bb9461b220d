#include "rhull/common.hpp"

namespace rhull {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::duplicate_points: return "DuplicatePoints";
        case ErrorCode::all_collinear: return "AllCollinear";
        case ErrorCode::empty_input: return "EmptyInput";
        case ErrorCode::empty_region: return "EmptyRegion";
        case ErrorCode::nonpositive_bandwidth: return "NonpositiveBandwidth";
        case ErrorCode::alpha_out_of_range: return "AlphaOutOfRange";
        case ErrorCode::sample_too_small: return "SampleTooSmall";
        case ErrorCode::degenerate_support: return "DegenerateSupport";
        case ErrorCode::invalid_endpoints: return "InvalidEndpoints";
        case ErrorCode::parse_error: return "ParseError";
        case ErrorCode::empty_after_filter: return "EmptyAfterFilter";
        case ErrorCode::io_error: return "IoError";
    }
    return "Unknown";
}

}  // namespace rhull
