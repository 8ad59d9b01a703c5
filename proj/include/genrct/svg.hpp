#ifndef GENRCT_SVG_HPP
#define GENRCT_SVG_HPP

#include <string>
#include <vector>

#include "genrct/sensitivity.hpp"

namespace genrct {

// All emitters return the complete SVG document as text. Output is a pure
// function of the inputs (fixed-precision coordinates, no timestamps), so
// repeated runs are byte-identical.

struct ForestEntry {
  std::string label;  // row label, e.g. "dsbp_8w"
  std::string group;  // series name, e.g. "rct-diff" or "aipsw"
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

std::string forest_svg(const std::vector<ForestEntry>& entries,
                       const std::string& title);
std::string forest_csv(const std::vector<ForestEntry>& entries);

struct BoxStats {
  std::string covariate;
  std::string group;  // "trial" or "target"
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

std::string boxplot_svg(const std::vector<BoxStats>& stats,
                        const std::string& title);
std::string boxplot_csv(const std::vector<BoxStats>& stats);

// Bias contour figure: shaded killer region, |bias| = |bound| boundary and
// labeled benchmark points. The ContourGrid's long CSV is its sidecar.
std::string contour_svg(const ContourGrid& grid,
                        const std::vector<CovariateStrength>& benchmarks,
                        const std::string& title);

}  // namespace genrct

#endif  // GENRCT_SVG_HPP
