#include "genrct/errors.hpp"

namespace genrct {

const char* errc_name(errc code) {
  switch (code) {
    case errc::missing_column: return "MissingColumn";
    case errc::non_numeric_cell: return "NonNumericCell";
    case errc::binary_out_of_range: return "BinaryOutOfRange";
    case errc::missing_value: return "MissingValue";
    case errc::degenerate_sample: return "DegenerateSample";
    case errc::empty_after_trim: return "EmptyAfterTrim";
    case errc::separation: return "Separation";
    case errc::rank_deficient: return "RankDeficient";
    case errc::non_finite_weight: return "NonFiniteWeight";
    case errc::replicate_failure: return "ReplicateFailure";
    case errc::zero_denominator: return "ZeroDenominator";
    case errc::r2_out_of_range: return "R2OutOfRange";
    case errc::inconsistent_bounds: return "InconsistentBounds";
    case errc::refit_failure: return "RefitFailure";
    case errc::invalid_config: return "InvalidConfig";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::io_error: return "IoError";
  }
  return "Error";
}

}  // namespace genrct
