#include "smtm/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "smtm/diagnostics.hpp"
#include "smtm/error.hpp"

namespace smtm {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(line) + ": '" + std::string(field) + "' is not a number");
  return v;
}

// Rounds the span to 1, 2 or 5 times a power of ten per tick.
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return out;
}

}  // namespace

std::vector<SeriesPoint> parse_series_csv(std::string_view csv) {
  std::vector<SeriesPoint> out;
  std::size_t pos = 0;
  std::size_t line = 0;
  bool header = true;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    std::string_view row = csv.substr(pos, eol - pos);
    pos = eol + 1;
    ++line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (header) {
      if (row != "series,x,y") throw Error(ErrorCode::SchemaMismatch, "expected header 'series,x,y'");
      header = false;
      continue;
    }
    if (row.empty()) continue;
    const std::size_t c2 = row.rfind(',');
    const std::size_t c1 = c2 == std::string_view::npos || c2 == 0 ? std::string_view::npos : row.rfind(',', c2 - 1);
    if (c1 == std::string_view::npos) throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(line) + ": expected 3 fields");
    out.push_back({std::string(row.substr(0, c1)), parse_number(row.substr(c1 + 1, c2 - c1 - 1), line),
                   parse_number(row.substr(c2 + 1), line)});
  }
  if (header) throw Error(ErrorCode::SchemaMismatch, "missing header");
  return out;
}

std::string render_svg(const std::vector<SeriesPoint>& points, const PlotSpec& spec) {
  const double w = spec.width, h = spec.height;
  const double left = 70, right = 170, top = 40, bottom = 55;
  const double pw = w - left - right, ph = h - top - bottom;

  std::vector<std::string> order;
  for (const auto& s : spec.series_order) order.push_back(s);
  for (const auto& p : points)
    if (std::find(order.begin(), order.end(), p.series) == order.end()) order.push_back(p.series);
  std::map<std::string, std::vector<std::pair<double, double>>> by_series;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
    by_series[p.series].emplace_back(p.x, p.y);
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const bool empty = by_series.empty();
  if (empty) {
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  if (xmax == xmin) { xmin -= 0.5; xmax += 0.5; }
  if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
  const double ypad = 0.04 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
    << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
    << "</text>\n";
  o << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top + ph) << "\" x2=\""
    << fixed(left + pw) << "\" y2=\"" << fixed(top + ph) << "\"/><line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top)
    << "\" x2=\"" << fixed(left) << "\" y2=\"" << fixed(top + ph) << "\"/></g>\n";
  for (double t : ticks(xmin, xmax)) {
    o << "<line x1=\"" << fixed(sx(t)) << "\" y1=\"" << fixed(top + ph) << "\" x2=\"" << fixed(sx(t)) << "\" y2=\""
      << fixed(top + ph + 5) << "\" stroke=\"black\"/><text x=\"" << fixed(sx(t)) << "\" y=\"" << fixed(top + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(ymin, ymax)) {
    o << "<line x1=\"" << fixed(left - 5) << "\" y1=\"" << fixed(sy(t)) << "\" x2=\"" << fixed(left) << "\" y2=\""
      << fixed(sy(t)) << "\" stroke=\"black\"/><text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(sy(t) + 4)
      << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(h - 12) << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << fixed(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(spec.y_label) << "</text>\n";

  if (empty) {
    o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(top + ph / 2)
      << "\" text-anchor=\"middle\" fill=\"gray\" font-size=\"16\">no data</text>\n";
  }
  std::size_t k = 0;
  for (const auto& name : order) {
    const auto it = by_series.find(name);
    if (it == by_series.end()) continue;
    const char* color = kPalette[k % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& [x, y] : it->second) {
      o << (first ? "" : " ") << fixed(sx(x)) << ',' << fixed(sy(y));
      first = false;
    }
    o << "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << fixed(left + pw + 12) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(left + pw + 32)
      << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << fixed(left + pw + 38)
      << "\" y=\"" << fixed(ly + 4) << "\">" << escape(name) << "</text>\n";
    ++k;
  }
  o << "</svg>\n";
  return o.str();
}

std::string render_svg(std::string_view csv, const PlotSpec& spec) { return render_svg(parse_series_csv(csv), spec); }

void render_svg_file(std::string_view csv, const PlotSpec& spec, const std::filesystem::path& path) {
  const std::string svg = render_svg(csv, spec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IOFailure, "cannot open " + path.string());
  f << svg;
  if (!f) throw Error(ErrorCode::IOFailure, "failed writing " + path.string());
}

}  // namespace smtm
