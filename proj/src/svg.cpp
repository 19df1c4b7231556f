#include "gaussex/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace gaussex {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string ratio_plot_svg(const ResultRecord& record, int width, int height) {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  double umin = 0.0, umax = 1.0, rmin = 1.0, rmax = 1.0;
  if (!record.rows.empty()) {
    umin = record.rows.front().u;
    umax = record.rows.back().u;
    for (const auto& r : record.rows) {
      if (std::isfinite(r.ratio_lo)) rmin = std::min(rmin, r.ratio_lo);
      if (std::isfinite(r.ratio_hi)) rmax = std::max(rmax, r.ratio_hi);
    }
  }
  if (umax - umin < 1e-12) {
    umin -= 0.5;
    umax += 0.5;
  } else {
    const double pad = 0.08 * (umax - umin);
    umin -= pad;
    umax += pad;
  }
  const double rpad = 0.1 * std::max(rmax - rmin, 0.1);
  rmin = std::max(0.0, rmin - rpad);
  rmax += rpad;

  auto x = [&](double u) { return left + (u - umin) / (umax - umin) * pw; };
  auto y = [&](double r) { return top + (rmax - r) / (rmax - rmin) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(left) + "\" y=\"22\" font-size=\"14\">" + escape(record.model) + "</text>\n";
  s += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double r = rmin + (rmax - rmin) * i / 4.0;
    s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(y(r) + 4) + "\" text-anchor=\"end\">" + label(r) + "</text>\n";
  }
  for (const auto& r : record.rows) {
    s += "<text x=\"" + fmt(x(r.u)) + "\" y=\"" + fmt(top + ph + 18) + "\" text-anchor=\"middle\">" + label(r.u) +
         "</text>\n";
  }
  s += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(height - 10.0) + "\" text-anchor=\"middle\">u</text>\n";
  s += "<text x=\"16\" y=\"" + fmt(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       fmt(top + ph / 2) + ")\">p_hat / asymptotic</text>\n";

  if (rmin <= 1.0 && 1.0 <= rmax) {
    s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y(1.0)) + "\" x2=\"" + fmt(left + pw) + "\" y2=\"" +
         fmt(y(1.0)) + "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  }

  std::string path;
  for (const auto& r : record.rows) {
    if (!std::isfinite(r.ratio)) continue;
    const double cx = x(r.u);
    s += "<line x1=\"" + fmt(cx) + "\" y1=\"" + fmt(y(r.ratio_lo)) + "\" x2=\"" + fmt(cx) + "\" y2=\"" +
         fmt(y(r.ratio_hi)) + "\" stroke=\"steelblue\"/>\n";
    for (double edge : {r.ratio_lo, r.ratio_hi}) {
      s += "<line x1=\"" + fmt(cx - 5) + "\" y1=\"" + fmt(y(edge)) + "\" x2=\"" + fmt(cx + 5) + "\" y2=\"" +
           fmt(y(edge)) + "\" stroke=\"steelblue\"/>\n";
    }
    s += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(y(r.ratio)) + "\" r=\"4\" fill=\"" +
         (r.mismatch ? "firebrick" : "steelblue") + "\"/>\n";
    path += (path.empty() ? "M" : " L") + fmt(cx) + " " + fmt(y(r.ratio));
  }
  if (!path.empty()) s += "<path d=\"" + path + "\" fill=\"none\" stroke=\"steelblue\" stroke-opacity=\"0.5\"/>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace gaussex
