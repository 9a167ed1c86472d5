#include "pivchol/bench/svg.hpp"

#include "pivchol/bench/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace pivchol::bench {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fixed(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  return std::string(buf.data(), r.ptr);
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

std::string tick_label(double v) {
  if (v == 0.0) return "0";
  const double mag = std::abs(v);
  std::array<char, 32> buf{};
  std::to_chars_result r;
  if (mag >= 1e5 || mag < 1e-3) {
    r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 1);
  } else {
    r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 4);
  }
  return std::string(buf.data(), r.ptr);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::string render_band_plot(const PlotSpec& spec, const std::vector<BandSeries>& series) {
  auto tx = [&](double x) { return spec.log2_x ? std::log2(x) : x; };

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.center[i])) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      for (double y : {s.center[i], s.lower[i], s.upper[i]}) {
        if (std::isfinite(y)) {
          ymin = std::min(ymin, y);
          ymax = std::max(ymax, y);
        }
      }
    }
  }
  if (spec.reference) {
    ymin = std::min(ymin, *spec.reference);
    ymax = std::max(ymax, *spec.reference);
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (!std::isfinite(ymin)) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) + "\" height=\"" +
         fixed(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fixed(kLeft) + "\" y=\"20\" font-size=\"14\">" + escape(spec.title) +
         "</text>\n";
  svg += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(plot_w) +
         "\" height=\"" + fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks.
  for (int t = 0; t <= 5; ++t) {
    const double y = ymin + (ymax - ymin) * t / 5.0;
    svg += "<line x1=\"" + fixed(kLeft - 4) + "\" x2=\"" + fixed(kLeft) + "\" y1=\"" +
           fixed(py(y)) + "\" y2=\"" + fixed(py(y)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(py(y) + 4) +
           "\" text-anchor=\"end\">" + tick_label(y) + "</text>\n";
  }
  std::vector<double> xticks;
  if (!series.empty()) xticks = series.front().x;
  for (double x : xticks) {
    svg += "<line x1=\"" + fixed(px(x)) + "\" x2=\"" + fixed(px(x)) + "\" y1=\"" +
           fixed(kTop + plot_h) + "\" y2=\"" + fixed(kTop + plot_h + 4) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed(px(x)) + "\" y=\"" + fixed(kTop + plot_h + 16) +
           "\" text-anchor=\"middle\">" + tick_label(x) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"" + fixed(kHeight - 10) +
         "\" text-anchor=\"middle\">" + escape(spec.x_label) + "</text>\n";
  svg += "<text transform=\"translate(16," + fixed(kTop + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(spec.y_label) + "</text>\n";

  if (spec.reference) {
    svg += "<line x1=\"" + fixed(kLeft) + "\" x2=\"" + fixed(kLeft + plot_w) + "\" y1=\"" +
           fixed(py(*spec.reference)) + "\" y2=\"" + fixed(py(*spec.reference)) +
           "\" stroke=\"black\" stroke-dasharray=\"5,4\"/>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::string band;
    std::string line;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.upper[i])) continue;
      band += fixed(px(s.x[i])) + "," + fixed(py(s.upper[i])) + " ";
    }
    for (std::size_t i = s.x.size(); i-- > 0;) {
      if (!std::isfinite(s.lower[i])) continue;
      band += fixed(px(s.x[i])) + "," + fixed(py(s.lower[i])) + " ";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.center[i])) continue;
      line += fixed(px(s.x[i])) + "," + fixed(py(s.center[i])) + " ";
    }
    svg += "<polygon points=\"" + band + "\" fill=\"" + color +
           "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(k) + 8.0;
    svg += "<line x1=\"" + fixed(kLeft + plot_w + 10) + "\" x2=\"" + fixed(kLeft + plot_w + 30) +
           "\" y1=\"" + fixed(ly) + "\" y2=\"" + fixed(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed(kLeft + plot_w + 34) + "\" y=\"" + fixed(ly + 4) + "\">" +
           escape(s.name) + "</text>\n";
  }
  if (spec.reference && !spec.reference_label.empty()) {
    const double ly = kTop + 14.0 * static_cast<double>(series.size()) + 8.0;
    svg += "<line x1=\"" + fixed(kLeft + plot_w + 10) + "\" x2=\"" + fixed(kLeft + plot_w + 30) +
           "\" y1=\"" + fixed(ly) + "\" y2=\"" + fixed(ly) +
           "\" stroke=\"black\" stroke-dasharray=\"5,4\"/>\n";
    svg += "<text x=\"" + fixed(kLeft + plot_w + 34) + "\" y=\"" + fixed(ly + 4) + "\">" +
           escape(spec.reference_label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

}  // namespace pivchol::bench
