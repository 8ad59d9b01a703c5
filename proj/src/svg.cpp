#include "genrct/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "genrct/errors.hpp"

namespace genrct {

namespace {

std::string num(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

std::string data_num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Canvas {
  std::ostringstream body;
  double width, height;

  Canvas(double w, double h) : width(w), height(h) {}

  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double sw = 1.0,
            const std::string& extra = "") {
    body << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\""
         << num(x2) << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke
         << "\" stroke-width=\"" << num(sw, 1) << "\"" << extra << "/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& extra = "") {
    body << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
         << num(w) << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\""
         << extra << "/>\n";
  }
  void circle(double cx, double cy, double r, const std::string& fill) {
    body << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\""
         << num(r) << "\" fill=\"" << fill << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, int size = 11,
            const std::string& anchor = "start",
            const std::string& fill = "#000") {
    body << "<text x=\"" << num(x) << "\" y=\"" << num(y)
         << "\" font-family=\"sans-serif\" font-size=\"" << size
         << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill << "\">"
         << esc(s) << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double sw = 1.5) {
    body << "<polyline fill=\"none\" stroke=\"" << stroke
         << "\" stroke-width=\"" << num(sw, 1) << "\" points=\"";
    for (const auto& [x, y] : pts) body << num(x) << ',' << num(y) << ' ';
    body << "\"/>\n";
  }
  void polygon(const std::vector<std::pair<double, double>>& pts,
               const std::string& fill, double opacity) {
    body << "<polygon fill=\"" << fill << "\" fill-opacity=\""
         << num(opacity, 2) << "\" points=\"";
    for (const auto& [x, y] : pts) body << num(x) << ',' << num(y) << ' ';
    body << "\"/>\n";
  }

  std::string finish() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width, 0)
        << "\" height=\"" << num(height, 0) << "\" viewBox=\"0 0 "
        << num(width, 0) << ' ' << num(height, 0) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
    return out.str();
  }
};

// Maps a data interval to pixel coordinates.
struct Axis {
  double d0, d1, p0, p1;
  double operator()(double v) const {
    return p0 + (v - d0) / (d1 - d0) * (p1 - p0);
  }
};

std::vector<double> nice_ticks(double lo, double hi, int n = 5) {
  if (hi <= lo) return {lo};
  double raw = (hi - lo) / n;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-12 * step; t += step) ticks.push_back(t);
  return ticks;
}

const char* kSeriesColors[] = {"#1f6fb4", "#d1495b", "#3d8a5f", "#8a5fb0"};

}  // namespace

std::string forest_csv(const std::vector<ForestEntry>& entries) {
  std::ostringstream out;
  out << "outcome,method,point,ci_low,ci_high\n";
  for (const auto& e : entries)
    out << e.label << ',' << e.group << ',' << data_num(e.point) << ','
        << data_num(e.lo) << ',' << data_num(e.hi) << '\n';
  return out.str();
}

std::string forest_svg(const std::vector<ForestEntry>& entries,
                       const std::string& title) {
  require(!entries.empty(), errc::invalid_argument, "forest plot needs rows");

  std::vector<std::string> labels;
  std::vector<std::string> groups;
  for (const auto& e : entries) {
    if (std::find(labels.begin(), labels.end(), e.label) == labels.end())
      labels.push_back(e.label);
    if (std::find(groups.begin(), groups.end(), e.group) == groups.end())
      groups.push_back(e.group);
  }

  double lo = 0.0, hi = 0.0;
  for (const auto& e : entries) {
    lo = std::min({lo, e.lo});
    hi = std::max({hi, e.hi});
  }
  double pad = 0.08 * (hi - lo + 1e-12);
  lo -= pad;
  hi += pad;

  const double row_h = 26.0;
  const double left = 120.0, right = 40.0, top = 48.0, bottom = 46.0;
  double plot_h = row_h * static_cast<double>(labels.size()) *
                  static_cast<double>(groups.size());
  Canvas svg(640.0, top + plot_h + bottom);
  Axis ax{lo, hi, left, 640.0 - right};

  svg.text(320.0, 22.0, title, 13, "middle");
  svg.line(ax(0.0), top, ax(0.0), top + plot_h, "#999", 1.0,
           " stroke-dasharray=\"4,3\"");

  for (double t : nice_ticks(lo, hi)) {
    svg.line(ax(t), top + plot_h, ax(t), top + plot_h + 4.0, "#333");
    svg.text(ax(t), top + plot_h + 18.0, num(t, 2), 10, "middle");
  }
  svg.text((left + 640.0 - right) / 2.0, top + plot_h + 36.0,
           "effect (treatment - comparator)", 11, "middle");

  double y = top;
  for (const auto& label : labels) {
    svg.text(left - 10.0, y + row_h * groups.size() / 2.0 + 4.0, label, 11,
             "end");
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (const auto& e : entries) {
        if (e.label != label || e.group != groups[g]) continue;
        const char* color = kSeriesColors[g % 4];
        double cy = y + row_h / 2.0;
        svg.line(ax(e.lo), cy, ax(e.hi), cy, color, 2.0);
        svg.line(ax(e.lo), cy - 4.0, ax(e.lo), cy + 4.0, color, 2.0);
        svg.line(ax(e.hi), cy - 4.0, ax(e.hi), cy + 4.0, color, 2.0);
        svg.circle(ax(e.point), cy, 3.2, color);
      }
      y += row_h;
    }
  }

  double lx = left;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    svg.circle(lx, 36.0, 3.2, kSeriesColors[g % 4]);
    svg.text(lx + 8.0, 40.0, groups[g], 10);
    lx += 16.0 + 7.0 * static_cast<double>(groups[g].size()) + 20.0;
  }
  return svg.finish();
}

std::string boxplot_csv(const std::vector<BoxStats>& stats) {
  std::ostringstream out;
  out << "covariate,group,min,q1,median,q3,max\n";
  for (const auto& b : stats)
    out << b.covariate << ',' << b.group << ',' << data_num(b.min) << ','
        << data_num(b.q1) << ',' << data_num(b.median) << ','
        << data_num(b.q3) << ',' << data_num(b.max) << '\n';
  return out.str();
}

std::string boxplot_svg(const std::vector<BoxStats>& stats,
                        const std::string& title) {
  require(!stats.empty(), errc::invalid_argument, "box plot needs rows");

  std::vector<std::string> covs;
  for (const auto& b : stats)
    if (std::find(covs.begin(), covs.end(), b.covariate) == covs.end())
      covs.push_back(b.covariate);

  const double panel_w = 160.0, panel_h = 190.0, top = 44.0;
  int cols = std::min<int>(4, static_cast<int>(covs.size()));
  int rows = (static_cast<int>(covs.size()) + cols - 1) / cols;
  Canvas svg(40.0 + panel_w * cols, top + panel_h * rows + 16.0);
  svg.text((40.0 + panel_w * cols) / 2.0, 22.0, title, 13, "middle");

  for (std::size_t k = 0; k < covs.size(); ++k) {
    double px = 40.0 + panel_w * static_cast<double>(k % cols);
    double py = top + panel_h * static_cast<double>(k / cols);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& b : stats) {
      if (b.covariate != covs[k]) continue;
      lo = first ? b.min : std::min(lo, b.min);
      hi = first ? b.max : std::max(hi, b.max);
      first = false;
    }
    double pad = 0.06 * (hi - lo + 1e-12);
    Axis ay{lo - pad, hi + pad, py + panel_h - 30.0, py + 18.0};

    svg.text(px + panel_w / 2.0 - 20.0, py + 12.0, covs[k], 11, "middle");
    svg.line(px + 26.0, ay.p1, px + 26.0, ay.p0, "#333");
    for (double t : nice_ticks(lo - pad, hi + pad, 4)) {
      svg.line(px + 22.0, ay(t), px + 26.0, ay(t), "#333");
      svg.text(px + 20.0, ay(t) + 3.0, num(t, 1), 8, "end");
    }

    int slot = 0;
    for (const auto& b : stats) {
      if (b.covariate != covs[k]) continue;
      const char* color = slot == 0 ? kSeriesColors[0] : kSeriesColors[1];
      double cx = px + 60.0 + 46.0 * slot;
      double bw = 26.0;
      svg.line(cx, ay(b.min), cx, ay(b.q1), color);
      svg.line(cx, ay(b.q3), cx, ay(b.max), color);
      svg.line(cx - bw / 3.0, ay(b.min), cx + bw / 3.0, ay(b.min), color);
      svg.line(cx - bw / 3.0, ay(b.max), cx + bw / 3.0, ay(b.max), color);
      svg.rect(cx - bw / 2.0, ay(b.q3), bw, ay(b.q1) - ay(b.q3), "none",
               std::string(" stroke=\"") + color + "\"");
      svg.line(cx - bw / 2.0, ay(b.median), cx + bw / 2.0, ay(b.median), color,
               2.0);
      svg.text(cx, py + panel_h - 14.0, b.group, 9, "middle");
      ++slot;
    }
  }
  return svg.finish();
}

std::string contour_svg(const ContourGrid& grid,
                        const std::vector<CovariateStrength>& benchmarks,
                        const std::string& title) {
  const double left = 64.0, right = 24.0, top = 48.0, bottom = 52.0;
  const double w = 560.0, h = 520.0;
  Canvas svg(w, h);
  double r2_max = grid.r2_axis.back();
  Axis ax{0.0, r2_max, left, w - right};
  Axis ay{0.0, 1.0, h - bottom, top};

  svg.text(w / 2.0, 22.0, title, 13, "middle");

  // killer region: for each r2 the smallest rho^2 whose bias reaches the
  // bound; bias is monotone along both axes so the region is everything
  // above that boundary.
  if (!grid.degenerate_target && grid.killer_level > 0.0) {
    std::vector<std::pair<double, double>> boundary;
    for (std::size_t i = 0; i < grid.r2_axis.size(); ++i) {
      double r2 = grid.r2_axis[i];
      double radial_sq = grid.bias(static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(
                                       grid.rho2_axis.size() - 1));
      if (std::abs(radial_sq) < grid.killer_level) continue;  // never killer
      // |bias| = |rho| * radial  =>  rho2* = (level/radial)^2
      double radial = std::abs(radial_sq);
      double rho2_star = (grid.killer_level / radial) *
                         (grid.killer_level / radial);
      boundary.emplace_back(r2, std::min(rho2_star, 1.0));
    }
    if (!boundary.empty()) {
      std::vector<std::pair<double, double>> poly;
      for (const auto& [r2, rho2] : boundary)
        poly.emplace_back(ax(r2), ay(rho2));
      poly.emplace_back(ax(r2_max), ay(1.0));
      poly.emplace_back(ax(boundary.front().first), ay(1.0));
      const char* fill = grid.rho_sign > 0 ? "#d1495b" : "#3d8a5f";
      svg.polygon(poly, fill, 0.25);
      std::vector<std::pair<double, double>> curve;
      for (const auto& [r2, rho2] : boundary)
        curve.emplace_back(ax(r2), ay(rho2));
      svg.polyline(curve, fill, 2.0);
    }
  }

  // axes
  svg.line(left, ay.p0, w - right, ay.p0, "#333");
  svg.line(left, ay.p0, left, ay.p1, "#333");
  for (double t : nice_ticks(0.0, r2_max)) {
    svg.line(ax(t), ay.p0, ax(t), ay.p0 + 4.0, "#333");
    svg.text(ax(t), ay.p0 + 17.0, num(t, 2), 10, "middle");
  }
  for (double t : nice_ticks(0.0, 1.0)) {
    svg.line(left - 4.0, ay(t), left, ay(t), "#333");
    svg.text(left - 7.0, ay(t) + 3.0, num(t, 2), 10, "end");
  }
  svg.text((left + w - right) / 2.0, h - 14.0,
           "R2 (share of weight variance from the confounder)", 11, "middle");
  svg.text(16.0, top - 10.0, "rho2", 11);

  std::size_t li = 0;
  for (const auto& b : benchmarks) {
    if (b.failed) continue;
    double x = ax(std::min(b.r2, r2_max));
    double y = ay(std::min(b.rho * b.rho, 1.0));
    svg.circle(x, y, 3.5, "#222");
    svg.text(x + 6.0, y - 5.0 + 11.0 * static_cast<double>(li % 2), b.covariate,
             10);
    ++li;
  }
  svg.text(w - right, top - 10.0,
           std::string("|bound| = ") + num(grid.killer_level, 3), 10, "end");
  return svg.finish();
}

}  // namespace genrct
