#include "articalign/error.hpp"

namespace articalign {

ErrorCategory error_category(ErrorCode code) {
    switch (code) {
        case ErrorCode::malformed_line:
        case ErrorCode::malformed_header:
        case ErrorCode::overlapping_intervals:
        case ErrorCode::non_monotone_times:
        case ErrorCode::empty_corpus:
        case ErrorCode::non_finite_value:
        case ErrorCode::io_error:
            return ErrorCategory::parse;
        case ErrorCode::dimension_mismatch:
        case ErrorCode::shape_mismatch:
        case ErrorCode::units_not_mm:
        case ErrorCode::missing_stats:
        case ErrorCode::missing_features:
        case ErrorCode::zero_duration_sentence:
        case ErrorCode::invalid_clock:
        case ErrorCode::audio_too_short:
        case ErrorCode::sample_too_small:
        case ErrorCode::singular:
            return ErrorCategory::contract;
        case ErrorCode::band_infeasible:
        case ErrorCode::empty_selection:
            return ErrorCategory::infeasible;
    }
    return ErrorCategory::contract;
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::malformed_line: return "MALFORMED_LINE";
        case ErrorCode::malformed_header: return "MALFORMED_HEADER";
        case ErrorCode::overlapping_intervals: return "OVERLAPPING_INTERVALS";
        case ErrorCode::non_monotone_times: return "NON_MONOTONE_TIMES";
        case ErrorCode::empty_corpus: return "EMPTY_CORPUS";
        case ErrorCode::non_finite_value: return "NON_FINITE_VALUE";
        case ErrorCode::io_error: return "IO_ERROR";
        case ErrorCode::dimension_mismatch: return "DIMENSION_MISMATCH";
        case ErrorCode::shape_mismatch: return "SHAPE_MISMATCH";
        case ErrorCode::units_not_mm: return "UNITS_NOT_MM";
        case ErrorCode::missing_stats: return "MISSING_STATS";
        case ErrorCode::missing_features: return "MISSING_FEATURES";
        case ErrorCode::zero_duration_sentence: return "ZERO_DURATION_SENTENCE";
        case ErrorCode::invalid_clock: return "INVALID_CLOCK";
        case ErrorCode::audio_too_short: return "AUDIO_TOO_SHORT";
        case ErrorCode::sample_too_small: return "SAMPLE_TOO_SMALL";
        case ErrorCode::singular: return "SINGULAR";
        case ErrorCode::band_infeasible: return "BAND_INFEASIBLE";
        case ErrorCode::empty_selection: return "EMPTY_SELECTION";
    }
    return "UNKNOWN";
}

int exit_code_for(ErrorCode code) {
    switch (error_category(code)) {
        case ErrorCategory::parse: return 2;
        case ErrorCategory::contract: return 3;
        case ErrorCategory::infeasible: return 4;
    }
    return 1;
}

}  // namespace articalign
