#pragma once

#include <string>
#include <vector>

#include "freqbin/io.hpp"

namespace freqbin::plots {

struct RenderResult {
  std::vector<std::string> files;     // every artifact written (plots, sidecars, summary)
  std::vector<std::string> plots;     // the SVG files only
  std::vector<std::string> warnings;  // sections that could not be rendered
};

// Renders a report bundle into static SVG plots (power scan when present,
// beating curve with fit overlay, branch bar chart, density-matrix bars),
// one sidecar CSV per plot carrying the plotted data verbatim, and a
// plain-text summary table. Missing sections are skipped with a warning.
RenderResult render_report(const io::ReportBundle& bundle, const std::string& out_dir);

}  // namespace freqbin::plots
