#ifndef GENRCT_JSONIO_HPP
#define GENRCT_JSONIO_HPP

#include <cmath>
#include <string>

#include "json.hpp"

namespace genrct {

// Insertion-ordered documents keep report layout stable across runs.
using json = nlohmann::ordered_json;

// JSON has no inf/nan literals; sentinel strengths (e.g. an unreachable
// k_sigma_min) serialize as string tokens instead of null.
inline json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace genrct

#endif  // GENRCT_JSONIO_HPP
