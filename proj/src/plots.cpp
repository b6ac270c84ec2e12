#include "freqbin/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "freqbin/beating.hpp"
#include "freqbin/constants.hpp"

namespace freqbin::plots {

namespace fs = std::filesystem;

namespace {

// Minimal static-SVG canvas; everything the report needs is lines, circles,
// rectangles and text.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height) : width_(width), height_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
          << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
          << height << "\">\n";
    body_ << "<rect width=\"" << width << "\" height=\"" << height
          << "\" fill=\"white\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double stroke = 1.0) {
    body_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2
          << "\" y2=\"" << y2 << "\" stroke=\"" << color << "\" stroke-width=\""
          << stroke << "\"/>\n";
  }

  void circle(double x, double y, double radius, const std::string& color) {
    body_ << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << radius
          << "\" fill=\"" << color << "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& color) {
    body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
          << "\" height=\"" << h << "\" fill=\"" << color
          << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
  }

  void text(double x, double y, const std::string& content, double size = 12.0,
            const std::string& anchor = "middle") {
    body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
          << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">"
          << content << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& points,
                const std::string& color, double stroke = 1.5) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
          << stroke << "\" points=\"";
    for (const auto& [x, y] : points) {
      body_ << x << ',' << y << ' ';
    }
    body_ << "\"/>\n";
  }

  std::string finish() {
    body_ << "</svg>\n";
    return body_.str();
  }

  double width() const { return width_; }
  double height() const { return height_; }

 private:
  double width_;
  double height_;
  std::ostringstream body_;
};

struct Axes {
  double x_min, x_max, y_min, y_max;
  double left = 60, right = 20, top = 30, bottom = 45;
  double width, height;

  double px(double x) const {
    return left + (x - x_min) / (x_max - x_min) * (width - left - right);
  }
  double py(double y) const {
    return height - bottom - (y - y_min) / (y_max - y_min) * (height - top - bottom);
  }
};

std::string format_tick(double value) {
  std::ostringstream out;
  out.precision(4);
  out << value;
  return out.str();
}

void draw_frame(SvgCanvas& canvas, const Axes& axes, const std::string& title,
                const std::string& x_label, const std::string& y_label) {
  canvas.line(axes.px(axes.x_min), axes.py(axes.y_min), axes.px(axes.x_max),
              axes.py(axes.y_min), "black");
  canvas.line(axes.px(axes.x_min), axes.py(axes.y_min), axes.px(axes.x_min),
              axes.py(axes.y_max), "black");
  for (int i = 0; i <= 4; ++i) {
    const double x = axes.x_min + (axes.x_max - axes.x_min) * i / 4.0;
    const double y = axes.y_min + (axes.y_max - axes.y_min) * i / 4.0;
    canvas.line(axes.px(x), axes.py(axes.y_min), axes.px(x), axes.py(axes.y_min) + 4, "black");
    canvas.text(axes.px(x), axes.py(axes.y_min) + 16, format_tick(x), 10);
    canvas.line(axes.px(axes.x_min) - 4, axes.py(y), axes.px(axes.x_min), axes.py(y), "black");
    canvas.text(axes.px(axes.x_min) - 8, axes.py(y) + 3, format_tick(y), 10, "end");
  }
  canvas.text(canvas.width() / 2.0, 18, title, 13);
  canvas.text(canvas.width() / 2.0, canvas.height() - 8, x_label, 11);
  canvas.text(16, canvas.height() / 2.0, y_label, 11);
}

void write_file(const fs::path& path, const std::string& content,
                RenderResult& result, bool is_plot) {
  io::write_text_file(path.string(), content);
  result.files.push_back(path.string());
  if (is_plot) {
    result.plots.push_back(path.string());
  }
}

void render_power_scan(const io::PowerScanSection& scan, const fs::path& dir,
                       RenderResult& result) {
  const auto& points = scan.points;
  double x_max = 0, y_max = 0;
  for (const auto& point : points) {
    x_max = std::max(x_max, point.power_mw);
    y_max = std::max(y_max, point.singles_hz + point.sigma_hz);
  }
  SvgCanvas canvas(520, 360);
  Axes axes{0.0, x_max * 1.05, 0.0, y_max * 1.1, 60, 20, 30, 45, 520, 360};
  draw_frame(canvas, axes, "Idler singles vs pump power", "pump power (mW)",
             "singles (Hz)");

  std::vector<std::pair<double, double>> curve, quad, lin;
  for (int i = 0; i <= 200; ++i) {
    const double p = axes.x_min + (axes.x_max - axes.x_min) * i / 200.0;
    curve.emplace_back(axes.px(p), axes.py(scan.fit.value(p)));
    quad.emplace_back(axes.px(p), axes.py(scan.fit.quadratic_component(p)));
    lin.emplace_back(axes.px(p), axes.py(scan.fit.linear_component(p)));
  }
  canvas.polyline(curve, "steelblue");
  canvas.polyline(quad, "crimson");
  canvas.polyline(lin, "darkviolet");
  for (const auto& point : points) {
    const double x = axes.px(point.power_mw);
    canvas.line(x, axes.py(point.singles_hz - point.sigma_hz), x,
                axes.py(point.singles_hz + point.sigma_hz), "black", 0.8);
    canvas.circle(x, axes.py(point.singles_hz), 3, "steelblue");
  }
  write_file(dir / "power_scan.svg", canvas.finish(), result, true);

  std::ostringstream sidecar;
  sidecar << "power_mw,singles_hz,sigma_hz,fit_hz\n";
  for (const auto& point : points) {
    sidecar << io::format_double(point.power_mw) << ','
            << io::format_double(point.singles_hz) << ','
            << io::format_double(point.sigma_hz) << ','
            << io::format_double(scan.fit.value(point.power_mw)) << '\n';
  }
  write_file(dir / "power_scan_plot.csv", sidecar.str(), result, false);
}

void render_beating(const io::ReportBundle& bundle, const fs::path& dir,
                    RenderResult& result) {
  const auto& data = bundle.beating_data;
  double y_max = 0;
  for (std::size_t i = 0; i < data.counts.size(); ++i) {
    y_max = std::max(y_max, static_cast<double>(data.counts[i]) + data.sigmas[i]);
  }
  SvgCanvas canvas(520, 360);
  Axes axes{data.delays_ps.front(), data.delays_ps.back(), 0.0, y_max * 1.1,
            60, 20, 30, 45, 520, 360};
  draw_frame(canvas, axes, "Spatial quantum beating", "relative delay (ps)",
             "coincidences");

  // Raw points exactly as recorded; only the model overlay is sampled densely.
  for (std::size_t i = 0; i < data.delays_ps.size(); ++i) {
    const double x = axes.px(data.delays_ps[i]);
    const double y = static_cast<double>(data.counts[i]);
    canvas.line(x, axes.py(std::max(0.0, y - data.sigmas[i])), x,
                axes.py(y + data.sigmas[i]), "gray", 0.6);
    canvas.circle(x, axes.py(y), 1.6, "steelblue");
  }
  std::vector<std::pair<double, double>> curve;
  for (int i = 0; i <= 1000; ++i) {
    const double t = axes.x_min + (axes.x_max - axes.x_min) * i / 1000.0;
    curve.emplace_back(axes.px(t), axes.py(beating::beating_curve(bundle.beating_fit.params, t)));
  }
  canvas.polyline(curve, "crimson");
  write_file(dir / "beating_fit.svg", canvas.finish(), result, true);

  std::ostringstream sidecar;
  sidecar << "delay_ps,counts,sigma,fit\n";
  for (std::size_t i = 0; i < data.delays_ps.size(); ++i) {
    sidecar << io::format_double(data.delays_ps[i]) << ',' << data.counts[i] << ','
            << io::format_double(data.sigmas[i]) << ','
            << io::format_double(
                   beating::beating_curve(bundle.beating_fit.params, data.delays_ps[i]))
            << '\n';
  }
  write_file(dir / "beating_fit_plot.csv", sidecar.str(), result, false);
}

void render_branches(const io::ReportBundle& bundle, const fs::path& dir,
                     RenderResult& result) {
  const auto& counts = bundle.branch_counts;
  const double values[4] = {static_cast<double>(counts.n_aa),
                            static_cast<double>(counts.n_bb),
                            static_cast<double>(counts.n_ab),
                            static_cast<double>(counts.n_ba)};
  const double sigmas[4] = {counts.sigma_aa, counts.sigma_bb, counts.sigma_ab,
                            counts.sigma_ba};
  static constexpr const char* kLabels[4] = {"aa", "bb", "ab", "ba"};
  double y_max = 1.0;
  for (int i = 0; i < 4; ++i) {
    y_max = std::max(y_max, values[i] + sigmas[i]);
  }
  SvgCanvas canvas(420, 360);
  Axes axes{-0.5, 3.5, 0.0, y_max * 1.1, 60, 20, 30, 45, 420, 360};
  draw_frame(canvas, axes, "Branch coincidence counts", "branch", "counts");
  for (int i = 0; i < 4; ++i) {
    const double x0 = axes.px(i - 0.3);
    const double x1 = axes.px(i + 0.3);
    canvas.rect(x0, axes.py(values[i]), x1 - x0, axes.py(0) - axes.py(values[i]),
                i < 2 ? "lightsteelblue" : "steelblue");
    canvas.line(axes.px(i), axes.py(std::max(0.0, values[i] - sigmas[i])), axes.px(i),
                axes.py(values[i] + sigmas[i]), "black", 0.8);
    canvas.text(axes.px(i), axes.py(0) + 28, kLabels[i], 11);
  }
  write_file(dir / "branch_counts.svg", canvas.finish(), result, true);

  std::ostringstream sidecar;
  sidecar << "branch,counts,sigma\n";
  for (int i = 0; i < 4; ++i) {
    sidecar << kLabels[i] << ',' << static_cast<std::int64_t>(values[i]) << ','
            << io::format_double(sigmas[i]) << '\n';
  }
  write_file(dir / "branch_counts_plot.csv", sidecar.str(), result, false);
}

void render_density(const io::ReportBundle& bundle, const fs::path& dir,
                    RenderResult& result) {
  static constexpr const char* kBasis[4] = {"ss", "si", "is", "ii"};
  SvgCanvas canvas(760, 360);
  const double panel_width = 360;
  for (int panel = 0; panel < 2; ++panel) {
    const double offset = 20 + panel * (panel_width + 20);
    const bool real_part = panel == 0;
    canvas.text(offset + panel_width / 2.0, 18,
                real_part ? "Re(rho)" : "Im(rho)", 13);
    // 16 bars, one per matrix element, grouped by row.
    const double base_y = 300;
    const double bar_span = (panel_width - 60) / 16.0;
    const double scale = 220;  // pixels per unit matrix element
    canvas.line(offset + 30, base_y, offset + panel_width - 30, base_y, "black");
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        const double value = real_part ? bundle.density.entries(r, c).real()
                                       : bundle.density.entries(r, c).imag();
        const double x = offset + 30 + (r * 4 + c) * bar_span;
        const double h = std::abs(value) * scale;
        const double y = value >= 0 ? base_y - h : base_y;
        canvas.rect(x + 1, y, bar_span - 2, h, value >= 0 ? "steelblue" : "indianred");
        if (c == 0) {
          canvas.text(x + 2 * bar_span, base_y + 16, kBasis[r], 9);
        }
      }
    }
    canvas.text(offset + panel_width / 2.0, base_y + 34,
                "element groups by row over {ss, si, is, ii}", 9);
  }
  write_file(dir / "density_matrix.svg", canvas.finish(), result, true);

  std::ostringstream sidecar;
  sidecar << "row,col,real,imag\n";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      sidecar << kBasis[r] << ',' << kBasis[c] << ','
              << io::format_double(bundle.density.entries(r, c).real()) << ','
              << io::format_double(bundle.density.entries(r, c).imag()) << '\n';
    }
  }
  write_file(dir / "density_matrix_plot.csv", sidecar.str(), result, false);
}

std::string summary_table(const io::ReportBundle& bundle) {
  std::ostringstream out;
  out << "summary\n=======\n";
  if (bundle.ratio_db.infinite) {
    out << "antibunch/bunch ratio : infinite (no bunching counts)\n";
  } else {
    out << "antibunch/bunch ratio : " << bundle.ratio_db.db << " dB\n";
  }
  out << "balance parameter p   : " << bundle.balance.mean << " +- "
      << bundle.balance.sigma << "\n";
  out << "visibility V          : " << bundle.beating_fit.params.visibility << " +- "
      << bundle.beating_fit.errors.visibility << "\n";
  out << "beating phase         : " << bundle.beating_fit.params.phase << " +- "
      << bundle.beating_fit.errors.phase << " rad\n";
  out << "delta omega           : " << bundle.beating_fit.params.delta_omega << " +- "
      << bundle.beating_fit.errors.delta_omega << " rad/ps\n";
  out << "reduced chi-square    : " << bundle.beating_fit.reduced_chi_square << "\n";
  out << "fidelity to |psi+>    : " << bundle.fidelity.mean << " +- "
      << bundle.fidelity.sigma << "\n";
  out << "physical state        : " << (bundle.density.physical ? "yes" : "no");
  if (bundle.projected) {
    out << " (projected)";
  }
  out << "\n";
  if (bundle.power_scan) {
    out << "power-scan pair coeff : " << bundle.power_scan->fit.quadratic << " +- "
        << bundle.power_scan->fit.sigma_quadratic << " Hz/mW^2\n";
  }
  out << "provenance            : " << bundle.provenance.config_hash << ", seed "
      << bundle.provenance.seed << ", v" << bundle.provenance.tool_version << "\n";
  return out.str();
}

}  // namespace

RenderResult render_report(const io::ReportBundle& bundle, const std::string& out_dir) {
  RenderResult result;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  if (bundle.power_scan) {
    render_power_scan(*bundle.power_scan, dir, result);
  } else {
    result.warnings.push_back("report has no power-scan section; skipping that plot");
  }
  render_beating(bundle, dir, result);
  render_branches(bundle, dir, result);
  render_density(bundle, dir, result);

  write_file(dir / "summary.txt", summary_table(bundle), result, false);
  return result;
}

}  // namespace freqbin::plots
