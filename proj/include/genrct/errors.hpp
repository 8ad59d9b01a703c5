#ifndef GENRCT_ERRORS_HPP
#define GENRCT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace genrct {

// Failure conditions surfaced by the library. Validation failures map to CLI
// exit code 1, numeric failures to exit code 2.
enum class errc {
  missing_column,
  non_numeric_cell,
  binary_out_of_range,
  missing_value,
  degenerate_sample,
  empty_after_trim,
  separation,
  rank_deficient,
  non_finite_weight,
  replicate_failure,
  zero_denominator,
  r2_out_of_range,
  inconsistent_bounds,
  refit_failure,
  invalid_config,
  invalid_argument,
  io_error,
};

enum class ErrorKind { validation, numeric };

constexpr ErrorKind error_kind(errc code) {
  switch (code) {
    case errc::separation:
    case errc::rank_deficient:
    case errc::non_finite_weight:
    case errc::replicate_failure:
    case errc::zero_denominator:
      return ErrorKind::numeric;
    default:
      return ErrorKind::validation;
  }
}

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const { return code_; }
  ErrorKind kind() const { return error_kind(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, std::string message) {
  throw Error(code, std::move(message));
}

inline void require(bool condition, errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace genrct

#endif  // GENRCT_ERRORS_HPP
