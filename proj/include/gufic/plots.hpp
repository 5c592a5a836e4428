#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gufic/log_table.hpp"

namespace gufic {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Panel {
  std::string ylabel;
  std::vector<Series> series;
};

/// Panels share the x axis and are stacked top to bottom.
struct Figure {
  std::string title;
  std::string xlabel = "t [s]";
  std::vector<Panel> panels;
};

inline constexpr std::size_t kMaxPlotPoints = 2000;

/// Keeps every k-th sample (k chosen so at most max_points remain) plus the
/// last one.
std::vector<std::size_t> decimation_indices(std::size_t n, std::size_t max_points = kMaxPlotPoints);

/// Self-contained SVG 1.1 document.
std::string render_svg(const Figure& figure);

/// Figures for one run: tracking_xyz, force_z, tanks, psi.
std::vector<Figure> run_figures(const LogTable& log);

/// Overlay of two runs: force_z and tracking_xyz, both labelled.
std::vector<Figure> compare_figures(const LogTable& a, const std::string& label_a,
                                    const LogTable& b, const std::string& label_b);

/// Writes run_figures(log) into outdir as <name>.svg. Returns the files
/// written; an empty log writes nothing.
std::vector<std::filesystem::path> render_plots(const LogTable& log,
                                                const std::filesystem::path& outdir);

std::vector<std::filesystem::path> render_compare_plots(const LogTable& a, const std::string& label_a,
                                                        const LogTable& b, const std::string& label_b,
                                                        const std::filesystem::path& outdir);

}  // namespace gufic
