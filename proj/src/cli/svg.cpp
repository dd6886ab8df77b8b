#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "ltqkd/cli/io.hpp"

namespace ltqkd::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_rate_svg(const std::vector<SweepPoint>& points, const std::string& title) {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = 0.0;
  if (!points.empty()) {
    x_lo = points.front().l_km;
    x_hi = points.back().l_km;
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  for (const SweepPoint& p : points) {
    for (double r : {p.analytical.skr, p.sdp.skr}) {
      if (r > 0.0) {
        y_min = std::min(y_min, r);
        y_max = std::max(y_max, r);
      }
    }
  }
  int dec_lo = -8;
  int dec_hi = 0;
  if (y_max > 0.0) {
    dec_lo = static_cast<int>(std::floor(std::log10(y_min)));
    dec_hi = static_cast<int>(std::ceil(std::log10(y_max)));
    if (dec_hi == dec_lo) ++dec_hi;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return kTop + (dec_hi - std::log10(y)) / (dec_hi - dec_lo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
       "</text>\n";

  for (int d = dec_lo; d <= dec_hi; ++d) {
    double y = sy(std::pow(10.0, d));
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" + num(y) +
         "\" stroke=\"#dddddd\"/>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">1e" + std::to_string(d) +
         "</text>\n";
  }
  const int xticks = 5;
  for (int k = 0; k <= xticks; ++k) {
    double xv = x_lo + (x_hi - x_lo) * k / xticks;
    double x = sx(xv);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(x) + "\" y2=\"" + num(kTop + ph + 5) +
         "\" stroke=\"black\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%g", xv);
    s += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + ph + 20) + "\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) +
       "\" text-anchor=\"middle\">distance (km)</text>\n";
  s += "<text transform=\"translate(18," + num(kTop + ph / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">secret key rate per pulse</text>\n";

  struct Series {
    const char* label;
    const char* color;
    const char* dash;
    bool sdp;
  };
  const Series series[] = {{"analytical bounds", "#1f77b4", "", false}, {"SDP bounds", "#d62728", "6,4", true}};
  for (const Series& ser : series) {
    // Zero rates have no place on a log axis, so they split the line.
    std::string pts;
    auto flush = [&]() {
      if (!pts.empty()) {
        s += "<polyline fill=\"none\" stroke=\"" + std::string(ser.color) + "\" stroke-width=\"2\"" +
             (*ser.dash ? " stroke-dasharray=\"" + std::string(ser.dash) + "\"" : std::string()) + " points=\"" + pts +
             "\"/>\n";
        pts.clear();
      }
    };
    for (const SweepPoint& p : points) {
      double r = ser.sdp ? p.sdp.skr : p.analytical.skr;
      if (r > 0.0) {
        pts += (pts.empty() ? "" : " ") + num(sx(p.l_km)) + "," + num(sy(r));
      } else {
        flush();
      }
    }
    flush();
  }
  double ly = kTop + 16;
  for (const Series& ser : series) {
    double lx = kLeft + pw - 170;
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 30) + "\" y2=\"" + num(ly - 4) +
         "\" stroke=\"" + ser.color + "\" stroke-width=\"2\"" +
         (*ser.dash ? " stroke-dasharray=\"" + std::string(ser.dash) + "\"" : std::string()) + "/>\n";
    s += "<text x=\"" + num(lx + 38) + "\" y=\"" + num(ly) + "\">" + ser.label + "</text>\n";
    ly += 18;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace ltqkd::cli
