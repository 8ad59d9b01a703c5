#include "genrct/decision.hpp"

#include "genrct/errors.hpp"

namespace genrct {

const char* conclusion_name(Conclusion c) {
  switch (c) {
    case Conclusion::Inferiority: return "Inferiority";
    case Conclusion::InferiorityOrNoDifference:
      return "InferiorityOrNoDifference";
    case Conclusion::NoDifference: return "NoDifference";
    case Conclusion::Superiority: return "Superiority";
    case Conclusion::SuperiorityOrNoDifference:
      return "SuperiorityOrNoDifference";
    case Conclusion::Indeterminate: return "Indeterminate";
  }
  return "?";
}

Conclusion conclude(BoundStatus lower, BoundStatus upper) {
  require(!(lower.sign == Sign::positive && upper.sign == Sign::negative),
          errc::inconsistent_bounds,
          "lower bound positive while upper bound negative");

  if (lower.sign == Sign::positive) {
    // CI entirely positive: inferiority unless the lower bound can be
    // pushed across zero.
    if (lower.robust) return Conclusion::Inferiority;
    return upper.robust ? Conclusion::InferiorityOrNoDifference
                        : Conclusion::Indeterminate;
  }
  if (upper.sign == Sign::positive) {
    // CI straddles zero.
    if (lower.robust && upper.robust) return Conclusion::NoDifference;
    if (upper.robust) return Conclusion::InferiorityOrNoDifference;
    if (lower.robust) return Conclusion::SuperiorityOrNoDifference;
    return Conclusion::Indeterminate;
  }
  // CI entirely negative: superiority unless the upper bound can be pushed
  // across zero.
  if (upper.robust) return Conclusion::Superiority;
  return lower.robust ? Conclusion::SuperiorityOrNoDifference
                      : Conclusion::Indeterminate;
}

std::string conclusion_sentence(Conclusion c, const std::string& treatment,
                                const std::string& comparator) {
  switch (c) {
    case Conclusion::Inferiority:
      return treatment + " is less effective than " + comparator +
             " in the trial-eligible population, and the finding is robust "
             "to unmeasured confounding at the benchmarked strength.";
    case Conclusion::InferiorityOrNoDifference:
      return treatment + " is at best comparable to " + comparator +
             "; unmeasured confounding no stronger than the observed "
             "covariates could reduce the difference to zero.";
    case Conclusion::NoDifference:
      return "no statistically significant difference between " + treatment +
             " and " + comparator +
             " in the trial-eligible population, and the conclusion is "
             "robust to unmeasured confounding at the benchmarked strength.";
    case Conclusion::Superiority:
      return treatment + " is more effective than " + comparator +
             " in the trial-eligible population, and the finding is robust "
             "to unmeasured confounding at the benchmarked strength.";
    case Conclusion::SuperiorityOrNoDifference:
      return treatment + " is at least comparable to " + comparator +
             "; unmeasured confounding no stronger than the observed "
             "covariates could reduce the difference to zero.";
    case Conclusion::Indeterminate:
      return "the comparison between " + treatment + " and " + comparator +
             " is indeterminate: plausible unmeasured confounding could "
             "move both confidence bounds across zero.";
  }
  return "";
}

}  // namespace genrct
