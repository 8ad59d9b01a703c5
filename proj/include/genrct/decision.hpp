#ifndef GENRCT_DECISION_HPP
#define GENRCT_DECISION_HPP

#include <string>

namespace genrct {

enum class Sign { negative, positive };

struct BoundStatus {
  Sign sign = Sign::negative;
  bool robust = false;
};

enum class Conclusion {
  Inferiority,
  InferiorityOrNoDifference,
  NoDifference,
  Superiority,
  SuperiorityOrNoDifference,
  Indeterminate,
};

const char* conclusion_name(Conclusion c);

// Maps the sign/robustness of the generalized CI bounds to the comparative
// conclusion. Positive effects read as "treatment worse than comparator".
// Throws InconsistentBounds when lower is positive but upper negative.
Conclusion conclude(BoundStatus lower, BoundStatus upper);

// Narrative sentence for reports; `treatment`/`comparator` name the arms.
std::string conclusion_sentence(Conclusion c, const std::string& treatment,
                                const std::string& comparator);

}  // namespace genrct

#endif  // GENRCT_DECISION_HPP
