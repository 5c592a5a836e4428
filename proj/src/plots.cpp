#include "gufic/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gufic/errors.hpp"

namespace gufic {

namespace {

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 220.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;  // legend column
constexpr double kTop = 40.0;
constexpr double kGap = 30.0;
constexpr double kBottom = 50.0;

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) { lo = 0.0; hi = 1.0; return; }
    const double span = hi - lo;
    const double m = span > 0.0 ? 0.05 * span : std::max(1e-12, 0.05 * std::abs(hi));
    lo -= m;
    hi += m;
    if (hi == lo) hi = lo + 1.0;
  }
};

// Roughly five ticks at 1/2/5 multiples.
std::vector<double> ticks(const Range& r) {
  const double raw = (r.hi - r.lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * step; v += step) {
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return out;
}

std::vector<double> col(const LogTable& log, const std::string& name, double scale = 1.0) {
  std::vector<double> v = log.column(name);
  if (scale != 1.0) for (double& x : v) x *= scale;
  return v;
}

}  // namespace

std::vector<std::size_t> decimation_indices(std::size_t n, std::size_t max_points) {
  std::vector<std::size_t> idx;
  if (n == 0) return idx;
  const std::size_t stride = max_points < 2 ? n : std::max<std::size_t>(1, (n + max_points - 2) / (max_points - 1));
  for (std::size_t k = 0; k < n; k += stride) idx.push_back(k);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

std::string render_svg(const Figure& figure) {
  const std::size_t np = std::max<std::size_t>(1, figure.panels.size());
  const double height = kTop + np * kPanelHeight + (np - 1) * kGap + kBottom;
  const double plot_w = kWidth - kLeft - kRight;

  Range xr;
  for (const Panel& p : figure.panels)
    for (const Series& s : p.series)
      for (double x : s.x) xr.add(x);
  if (!std::isfinite(xr.lo)) { xr.lo = 0.0; xr.hi = 1.0; }
  if (xr.hi == xr.lo) xr.hi = xr.lo + 1.0;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(kWidth)
     << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(kWidth) << ' ' << fmt(height)
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(figure.title) << "</text>\n";

  for (std::size_t pi = 0; pi < figure.panels.size(); ++pi) {
    const Panel& panel = figure.panels[pi];
    const double top = kTop + pi * (kPanelHeight + kGap);
    Range yr;
    for (const Series& s : panel.series)
      for (double y : s.y) yr.add(y);
    yr.pad();
    auto X = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto Y = [&](double y) { return top + kPanelHeight - (y - yr.lo) / (yr.hi - yr.lo) * kPanelHeight; };

    os << "<g>\n<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(plot_w)
       << "\" height=\"" << fmt(kPanelHeight) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (double v : ticks(yr)) {
      os << "<line x1=\"" << fmt(kLeft) << "\" x2=\"" << fmt(kLeft + plot_w) << "\" y1=\"" << fmt(Y(v))
         << "\" y2=\"" << fmt(Y(v)) << "\" stroke=\"#ddd\"/>\n"
         << "<text x=\"" << fmt(kLeft - 4) << "\" y=\"" << fmt(Y(v) + 4)
         << "\" text-anchor=\"end\">" << fmt(v, "%.4g") << "</text>\n";
    }
    if (pi + 1 == figure.panels.size()) {
      for (double v : ticks(xr)) {
        os << "<text x=\"" << fmt(X(v)) << "\" y=\"" << fmt(top + kPanelHeight + 14)
           << "\" text-anchor=\"middle\">" << fmt(v, "%.4g") << "</text>\n";
      }
      os << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(top + kPanelHeight + 34)
         << "\" text-anchor=\"middle\">" << escape(figure.xlabel) << "</text>\n";
    }
    os << "<text transform=\"translate(16," << fmt(top + kPanelHeight / 2)
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.ylabel) << "</text>\n";

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const Series& s = panel.series[si];
      const std::size_t n = std::min(s.x.size(), s.y.size());
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\"";
      if (s.dashed) os << " stroke-dasharray=\"6 4\"";
      os << " points=\"";
      for (std::size_t k : decimation_indices(n)) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        os << fmt(X(s.x[k]), "%.2f") << ',' << fmt(Y(s.y[k]), "%.2f") << ' ';
      }
      os << "\"/>\n";
      const double ly = top + 14 + 16.0 * si;
      const double lx = kLeft + plot_w + 10;
      os << "<line x1=\"" << fmt(lx) << "\" x2=\"" << fmt(lx + 22) << "\" y1=\"" << fmt(ly - 4)
         << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.4\""
         << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
         << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly) << "\">" << escape(s.label) << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<Figure> run_figures(const LogTable& log) {
  if (log.empty()) return {};
  const std::vector<double> t = log.column("t");

  Figure xyz{"End-effector position vs reference", "t [s]", {}};
  for (const char* axis : {"x", "y", "z"}) {
    const std::string a(axis);
    xyz.panels.push_back({a + " [m]",
                          {{"actual", t, col(log, "g_p" + a), "#1f77b4", false},
                           {"reference", t, col(log, "ref_p" + a), "#d62728", true}}});
  }

  // The sensor reads the wrench on the robot; the tool exerts its negative.
  Figure force{"Normal force", "t [s]",
               {{"F_z [N]",
                 {{"exerted (filtered)", t, col(log, "Fes_fz", -1.0), "#1f77b4", false},
                  {"desired", t, col(log, "Fd_fz"), "#d62728", true}}}}};

  Figure tanks{"Energy tanks", "t [s]",
               {{"T [J]",
                 {{"T_f", t, col(log, "Tf"), "#2ca02c", false},
                  {"T_i", t, col(log, "Ti"), "#9467bd", false}}}}};

  Figure psi{"Error function", "t [s]", {{"Psi(g, g_d')", {{"Psi", t, col(log, "psi"), "#ff7f0e", false}}}}};

  return {xyz, force, tanks, psi};
}

std::vector<Figure> compare_figures(const LogTable& a, const std::string& label_a,
                                    const LogTable& b, const std::string& label_b) {
  if (a.empty() || b.empty()) return {};
  const std::vector<double> ta = a.column("t"), tb = b.column("t");
  Figure force{"Normal force, " + label_a + " vs " + label_b, "t [s]",
               {{"F_z [N]",
                 {{label_a, ta, col(a, "Fes_fz", -1.0), "#1f77b4", false},
                  {label_b, tb, col(b, "Fes_fz", -1.0), "#ff7f0e", false},
                  {"desired", ta, col(a, "Fd_fz"), "#d62728", true}}}}};
  Figure xyz{"End-effector position, " + label_a + " vs " + label_b, "t [s]", {}};
  for (const char* axis : {"x", "y", "z"}) {
    const std::string ax(axis);
    xyz.panels.push_back({ax + " [m]",
                          {{label_a, ta, col(a, "g_p" + ax), "#1f77b4", false},
                           {label_b, tb, col(b, "g_p" + ax), "#ff7f0e", false},
                           {"reference", ta, col(a, "ref_p" + ax), "#d62728", true}}});
  }
  return {force, xyz};
}

namespace {

std::vector<std::filesystem::path> write_figures(const std::vector<Figure>& figures,
                                                 const std::vector<std::string>& names,
                                                 const std::filesystem::path& outdir) {
  std::vector<std::filesystem::path> written;
  if (figures.empty()) return written;
  std::filesystem::create_directories(outdir);
  for (std::size_t i = 0; i < figures.size(); ++i) {
    const std::filesystem::path file = outdir / (names[i] + ".svg");
    std::ofstream out(file);
    if (!out) throw Error("cannot write " + file.string());
    out << render_svg(figures[i]);
    written.push_back(file);
  }
  return written;
}

}  // namespace

std::vector<std::filesystem::path> render_plots(const LogTable& log,
                                                const std::filesystem::path& outdir) {
  return write_figures(run_figures(log), {"tracking_xyz", "force_z", "tanks", "psi"}, outdir);
}

std::vector<std::filesystem::path> render_compare_plots(const LogTable& a, const std::string& label_a,
                                                        const LogTable& b, const std::string& label_b,
                                                        const std::filesystem::path& outdir) {
  return write_figures(compare_figures(a, label_a, b, label_b),
                       {"compare_force_z", "compare_tracking_xyz"}, outdir);
}

}  // namespace gufic
