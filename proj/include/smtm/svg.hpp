#pragma once

// Minimal static line plots. Input is long-format CSV with header
// `series,x,y`; one polyline per series.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace smtm {

struct PlotSpec {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  /// Legend order; series not listed follow in order of first appearance.
  std::vector<std::string> series_order;
  int width = 720;
  int height = 480;
};

struct SeriesPoint {
  std::string series;
  double x;
  double y;
};

/// Parses `series,x,y` CSV. Throws SchemaMismatch on a wrong header or row.
std::vector<SeriesPoint> parse_series_csv(std::string_view csv);

std::string render_svg(const std::vector<SeriesPoint>& points, const PlotSpec& spec);
std::string render_svg(std::string_view csv, const PlotSpec& spec);

/// Writes render_svg(csv, spec) to `path`. Throws IOFailure.
void render_svg_file(std::string_view csv, const PlotSpec& spec, const std::filesystem::path& path);

}  // namespace smtm
