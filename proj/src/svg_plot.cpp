#include "slipgrip/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace slipgrip {

namespace {

constexpr int kWidth = 900;
constexpr int kPanelHeight = 180;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kPanelGap = 40;

struct Panel {
  const char* label;
  const std::vector<double>* y;
  const char* color;
};

void polyline(std::ofstream& out, const std::vector<double>& t, const std::vector<double>& y,
              double t_max, double y_lo, double y_hi, int top, const char* color) {
  const double span = std::max(1e-12, y_hi - y_lo);
  const int plot_w = kWidth - kMarginLeft - kMarginRight;
  // Thin dense traces so the file stays small.
  const std::size_t stride = std::max<std::size_t>(1, t.size() / 2000);
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
  char pt[48];
  for (std::size_t i = 0; i < t.size(); i += stride) {
    const double x = kMarginLeft + plot_w * (t[i] / std::max(1e-12, t_max));
    const double yy = top + kPanelHeight * (1.0 - (y[i] - y_lo) / span);
    std::snprintf(pt, sizeof(pt), "%.1f,%.1f ", x, yy);
    out << pt;
  }
  out << "\"/>\n";
}

}  // namespace

void write_run_plot(const std::filesystem::path& path, const std::vector<double>& t,
                    const std::vector<double>& power, const std::vector<double>& duty,
                    const std::vector<double>& bend, const std::vector<SlipEvent>& events) {
  if (t.empty()) throw std::invalid_argument("write_run_plot: empty trace");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");

  const double t_max = t.back();
  const Panel panels[] = {{"power [V^2]", &power, "#1f77b4"},
                          {"duty", &duty, "#d62728"},
                          {"bend [deg]", &bend, "#2ca02c"}};
  const int total_h = 3 * (kPanelHeight + kPanelGap) + kPanelGap;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << total_h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  int top = kPanelGap;
  const int plot_w = kWidth - kMarginLeft - kMarginRight;
  for (const Panel& panel : panels) {
    double y_lo = *std::min_element(panel.y->begin(), panel.y->end());
    double y_hi = *std::max_element(panel.y->begin(), panel.y->end());
    if (y_hi - y_lo < 1e-9) {
      y_lo -= 1.0;
      y_hi += 1.0;
    }
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << kPanelHeight << "\" fill=\"none\" stroke=\"#888\"/>\n";
    if (panel.y == &power) {
      for (const SlipEvent& e : events) {
        const double x0 = kMarginLeft + plot_w * (e.onset_s / t_max);
        const double x1 = kMarginLeft + plot_w * (e.end_s / t_max);
        out << "<rect x=\"" << x0 << "\" y=\"" << top << "\" width=\""
            << std::max(1.0, x1 - x0) << "\" height=\"" << kPanelHeight
            << "\" fill=\"#ffcccc\" stroke=\"none\"/>\n";
      }
    }
    polyline(out, t, *panel.y, t_max, y_lo, y_hi, top, panel.color);
    char label[96];
    std::snprintf(label, sizeof(label), "%s  [%.3g, %.3g]", panel.label, y_lo, y_hi);
    out << "<text x=\"" << kMarginLeft << "\" y=\"" << top - 6 << "\">" << label << "</text>\n";
    top += kPanelHeight + kPanelGap;
  }
  char axis[64];
  std::snprintf(axis, sizeof(axis), "t [s], 0 to %.6g", t_max);
  out << "<text x=\"" << kMarginLeft << "\" y=\"" << total_h - 8 << "\">" << axis << "</text>\n";
  out << "</svg>\n";
}

}  // namespace slipgrip
