#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace houdini::cli {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::string render_svg(const PathExport& path) {
  if (path.breakpoints.empty()) throw LinalgError("plot: path has no breakpoints");
  const auto& bps = path.breakpoints;
  const double d0 = bps.front().delta, d1 = bps.back().delta;
  const double dspan = d0 > d1 ? d0 - d1 : 1.0;
  double lo = 0.0, hi = 0.0;
  for (const auto& r : bps)
    if (r.x.size()) {
      lo = std::min(lo, r.x.minCoeff());
      hi = std::max(hi, r.x.maxCoeff());
    }
  if (hi - lo <= 0.0) lo = -1.0, hi = 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double delta) { return kLeft + (d0 - delta) / dspan * pw; };
  auto py = [&](double v) { return kTop + (hi - v) / (hi - lo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" "
       "viewBox=\"0 0 800 480\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"480\" fill=\"white\"/>\n";
  s += "<rect x=\"" + fmt("%.3f", kLeft) + "\" y=\"" + fmt("%.3f", kTop) + "\" width=\"" +
       fmt("%.3f", pw) + "\" height=\"" + fmt("%.3f", ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt("%.3f", kLeft) + "\" y1=\"" + fmt("%.3f", py(0.0)) + "\" x2=\"" +
       fmt("%.3f", kLeft + pw) + "\" y2=\"" + fmt("%.3f", py(0.0)) +
       "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";

  double last_label = -1e9;
  for (const auto& r : bps) {
    const double x = px(r.delta);
    s += "<line x1=\"" + fmt("%.3f", x) + "\" y1=\"" + fmt("%.3f", kTop) + "\" x2=\"" +
         fmt("%.3f", x) + "\" y2=\"" + fmt("%.3f", kTop + ph) +
         "\" stroke=\"#ddd\"/>\n";
    if (x - last_label >= 36.0 || &r == &bps.back()) {
      s += "<text x=\"" + fmt("%.3f", x) + "\" y=\"" + fmt("%.3f", kTop + ph + 16) +
           "\" text-anchor=\"middle\">" + fmt("%.3g", r.delta) + "</text>\n";
      last_label = x;
    }
  }
  for (double v : {lo, 0.0, hi})
    s += "<text x=\"" + fmt("%.3f", kLeft - 6) + "\" y=\"" + fmt("%.3f", py(v) + 4) +
         "\" text-anchor=\"end\">" + fmt("%.3g", v) + "</text>\n";
  s += "<text x=\"" + fmt("%.3f", kLeft + pw / 2) + "\" y=\"" +
       fmt("%.3f", kHeight - 16) + "\" text-anchor=\"middle\">delta</text>\n";
  s += "<text x=\"" + fmt("%.3f", kLeft) + "\" y=\"18\">x along the path (" +
       std::to_string(bps.size()) + " breakpoints)</text>\n";

  for (Index j = 0; j < path.n; ++j) {
    s += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"";
    s += kPalette[j % 10];
    s += "\" points=\"";
    for (std::size_t k = 0; k < bps.size(); ++k) {
      if (k) s += ' ';
      s += fmt("%.3f", px(bps[k].delta)) + "," + fmt("%.3f", py(bps[k].x(j)));
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace houdini::cli
