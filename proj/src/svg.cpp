#include "mcrn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace mcrn {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

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

void write_svg_chart(std::ostream& out, const std::vector<Series>& series, const ChartOptions& opt) {
  const double left = 70, right = 170, top = 40, bottom = 50;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;
  auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (opt.log_y && !(s.y[i] > 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (opt.log_y) y0 = std::floor(y0), y1 = std::ceil(y1);
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)",
                     opt.width, opt.height)
      << '\n';
  out << fmt::format(R"(<rect x="{:.1f}" y="{:.1f}" width="{:.1f}" height="{:.1f}" fill="none" stroke="#333"/>)", left,
                     top, pw, ph)
      << '\n';
  out << fmt::format(R"(<text x="{:.1f}" y="20" text-anchor="middle" font-size="14">{}</text>)", left + pw / 2,
                     escape(opt.title))
      << '\n';
  out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="middle">{}</text>)", left + pw / 2,
                     opt.height - 12.0, escape(opt.x_label))
      << '\n';
  out << fmt::format(R"svg(<text x="16" y="{:.1f}" text-anchor="middle" transform="rotate(-90 16 {:.1f})">{}</text>)svg",
                     top + ph / 2, top + ph / 2, escape(opt.y_label))
      << '\n';

  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="middle">{:.4g}</text>)", px(xv), top + ph + 16,
                       xv)
        << '\n';
    const double yt = y0 + (y1 - y0) * k / 4.0;
    const double ypos = top + ph - ph * k / 4.0;
    const std::string ylabel = opt.log_y ? fmt::format("1e{:.3g}", yt) : fmt::format("{:.4g}", yt);
    out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="end">{}</text>)", left - 6, ypos + 4, ylabel)
        << '\n';
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5"{} points=")", color,
                       s.dashed ? R"( stroke-dasharray="6 4")" : "");
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (opt.log_y && !(s.y[i] > 0.0)) continue;
      out << fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    }
    out << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    out << fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="{}" stroke-width="2"{}/>)",
                       left + pw + 10, ly, left + pw + 34, ly, color, s.dashed ? R"( stroke-dasharray="6 4")" : "")
        << '\n';
    out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}">{}</text>)", left + pw + 40, ly + 4, escape(s.label)) << '\n';
  }
  out << "</svg>\n";
}

}  // namespace mcrn
