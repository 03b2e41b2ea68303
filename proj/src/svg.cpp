#include "uavcov/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "uavcov/errors.hpp"

namespace uavcov::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;
constexpr const char* kPalette[] = {"#1b6ca8", "#d1495b", "#edae49", "#00798c", "#6a4c93", "#3d3d3d"};

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
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

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string px(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << v;
  return os.str();
}

struct Scale {
  double lo, hi;
  bool log;
  double a, b;  // pixel range
  double operator()(double v) const {
    if (log) {
      v = std::log10(std::max(v, 1e-300));
      const double l = std::log10(lo), h = std::log10(hi);
      return a + (v - l) / (h - l) * (b - a);
    }
    return a + (v - lo) / (hi - lo) * (b - a);
  }
};

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10 * mag;
}

std::vector<double> ticks(const Scale& s) {
  std::vector<double> out;
  if (s.log) {
    for (double p = std::floor(std::log10(s.lo)); p <= std::ceil(std::log10(s.hi)); ++p) {
      const double v = std::pow(10.0, p);
      if (v >= s.lo * 0.999 && v <= s.hi * 1.001) out.push_back(v);
    }
    return out;
  }
  const double step = nice_step(s.hi - s.lo, 6);
  for (double v = std::ceil(s.lo / step) * step; v <= s.hi + step * 1e-9; v += step) out.push_back(v);
  return out;
}

void padded_range(double& lo, double& hi, bool log) {
  if (!(lo <= hi)) lo = 0, hi = 1;
  if (log) {
    lo = std::pow(10.0, std::floor(std::log10(std::max(lo, 1e-12))));
    hi = std::pow(10.0, std::ceil(std::log10(std::max(hi, lo * 10))));
    return;
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double step = nice_step(hi - lo, 6);
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;
}

void frame(std::ostringstream& os, const Axes& axes, const Scale& ys) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << px(kLeft) << "\" y=\"24\" font-size=\"15\">" << escape(axes.title) << "</text>\n";
  for (double t : ticks(ys)) {
    const double y = ys(t);
    os << "<line x1=\"" << px(kLeft) << "\" x2=\"" << px(kWidth - kRight) << "\" y1=\"" << px(y) << "\" y2=\""
       << px(y) << "\" stroke=\"#e5e5e5\"/>\n"
       << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">" << fmt(t)
       << "</text>\n";
  }
  os << "<line x1=\"" << px(kLeft) << "\" x2=\"" << px(kLeft) << "\" y1=\"" << px(kTop) << "\" y2=\""
     << px(kHeight - kBottom) << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << px(kLeft) << "\" x2=\"" << px(kWidth - kRight) << "\" y1=\"" << px(kHeight - kBottom)
     << "\" y2=\"" << px(kHeight - kBottom) << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << px((kLeft + kWidth - kRight) / 2) << "\" y=\"" << px(kHeight - 14)
     << "\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n"
     << "<text transform=\"translate(16," << px((kTop + kHeight - kBottom) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(axes.y_label) << "</text>\n";
}

void legend(std::ostringstream& os, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 10 + 20.0 * i;
    os << "<rect x=\"" << px(kWidth - kRight + 12) << "\" y=\"" << px(y - 9) << "\" width=\"12\" height=\"12\" fill=\""
       << kPalette[i % std::size(kPalette)] << "\"/>\n"
       << "<text x=\"" << px(kWidth - kRight + 30) << "\" y=\"" << px(y + 1) << "\">" << escape(names[i])
       << "</text>\n";
  }
}

}  // namespace

CsvTable CsvTable::parse(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (line.empty()) continue;
    auto fields = split(line);
    if (header) {
      for (std::size_t i = 0; i < fields.size(); ++i) t.columns_[fields[i]] = i;
      header = false;
    } else {
      if (fields.size() != t.columns_.size()) throw InvalidConfiguration("ragged CSV row: " + std::string(line));
      t.cells_.push_back(std::move(fields));
    }
  }
  return t;
}

const std::string& CsvTable::at(std::size_t row, const std::string& column) const {
  auto it = columns_.find(column);
  if (it == columns_.end()) throw InvalidConfiguration("CSV has no column '" + column + "'");
  return cells_.at(row)[it->second];
}

double CsvTable::number(std::size_t row, const std::string& column) const {
  const std::string& s = at(row, column);
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

std::string line_chart(const Axes& axes, const std::vector<Series>& series) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i] - e);
      yhi = std::max(yhi, s.y[i] + e);
    }
  if (!(xlo < xhi)) xlo = 0, xhi = std::max(1.0, xhi);
  padded_range(ylo, yhi, axes.log_y);
  const Scale xs{xlo, xhi, false, kLeft, kWidth - kRight};
  const Scale ys{ylo, yhi, axes.log_y, kHeight - kBottom, kTop};

  std::ostringstream os;
  frame(os, axes, ys);
  for (double t : ticks(xs))
    os << "<text x=\"" << px(xs(t)) << "\" y=\"" << px(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">"
       << fmt(t) << "</text>\n";
  std::vector<std::string> names;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    names.push_back(s.name);
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << px(xs(s.x[i])) << ',' << px(ys(s.y[i]));
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.err.size() && i < s.x.size(); ++i)
      os << "<line x1=\"" << px(xs(s.x[i])) << "\" x2=\"" << px(xs(s.x[i])) << "\" y1=\""
         << px(ys(s.y[i] - s.err[i])) << "\" y2=\"" << px(ys(s.y[i] + s.err[i])) << "\" stroke=\"" << color
         << "\"/>\n";
  }
  legend(os, names);
  os << "</svg>\n";
  return os.str();
}

std::string grouped_bar_chart(const Axes& axes, const std::vector<std::string>& groups,
                              const std::vector<std::string>& series_names,
                              const std::vector<std::vector<double>>& values) {
  double ylo = axes.log_y ? std::numeric_limits<double>::infinity() : 0.0, yhi = 0.0;
  for (const auto& g : values)
    for (double v : g)
      if (std::isfinite(v)) {
        yhi = std::max(yhi, v);
        if (axes.log_y && v > 0) ylo = std::min(ylo, v);
      }
  padded_range(ylo, yhi, axes.log_y);
  const Scale ys{ylo, yhi, axes.log_y, kHeight - kBottom, kTop};

  std::ostringstream os;
  frame(os, axes, ys);
  const double group_w = (kWidth - kRight - kLeft) / std::max<std::size_t>(1, groups.size());
  const double bar_w = group_w * 0.8 / std::max<std::size_t>(1, series_names.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double x0 = kLeft + g * group_w + group_w * 0.1;
    os << "<text x=\"" << px(kLeft + (g + 0.5) * group_w) << "\" y=\"" << px(kHeight - kBottom + 16)
       << "\" text-anchor=\"middle\">" << escape(groups[g]) << "</text>\n";
    for (std::size_t s = 0; s < series_names.size() && s < values[g].size(); ++s) {
      const double v = values[g][s];
      if (!std::isfinite(v) || (axes.log_y && v <= 0)) continue;
      const double top = ys(v);
      os << "<rect x=\"" << px(x0 + s * bar_w) << "\" y=\"" << px(top) << "\" width=\"" << px(bar_w * 0.95)
         << "\" height=\"" << px(kHeight - kBottom - top) << "\" fill=\"" << kPalette[s % std::size(kPalette)]
         << "\"/>\n";
    }
  }
  legend(os, series_names);
  os << "</svg>\n";
  return os.str();
}

}  // namespace uavcov::svg
