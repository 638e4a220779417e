#pragma once

#include <stdexcept>
#include <string>

namespace articalign {

// Error kinds raised across the library. Each kind belongs to one of three
// categories that the CLI maps onto process exit codes:
//   parse (2), contract (3), infeasible (4).
enum class ErrorCode {
    // parse
    malformed_line,
    malformed_header,
    overlapping_intervals,
    non_monotone_times,
    empty_corpus,
    non_finite_value,
    io_error,
    // contract
    dimension_mismatch,
    shape_mismatch,
    units_not_mm,
    missing_stats,
    missing_features,
    zero_duration_sentence,
    invalid_clock,
    audio_too_short,
    sample_too_small,
    singular,
    // infeasible
    band_infeasible,
    empty_selection,
};

enum class ErrorCategory { parse, contract, infeasible };

ErrorCategory error_category(ErrorCode code);
const char* error_code_name(ErrorCode code);

// CLI exit code for a category: parse=2, contract=3, infeasible=4.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace articalign
