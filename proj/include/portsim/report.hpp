#pragma once

// CSV and SVG writers for the CLI output bundle. Numbers use six significant
// digits ("%.6g"), '.' decimals and '\n' line ends so files are byte-stable.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "portsim/engine.hpp"
#include "portsim/experiments.hpp"
#include "portsim/metrics.hpp"

namespace portsim::report {

std::string format_number(double value);

std::string trips_csv(std::span<const TripRecord> trips);
std::string bins_csv(const BinSeries& bins);
std::string summary_csv(std::span<const RunSummary> summaries);
std::string queue_csv(std::span<const QueueSample> samples);
std::string sweep_csv(const SweepResult& sweep);
std::string sweep_bins_csv(const SweepResult& sweep);
std::string fig2_csv(std::span<const Fig2Row> rows);
std::string fig3_csv(std::span<const Fig3Row> rows);
std::string fig4_csv(std::span<const Fig4Row> rows);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line chart: axes, min/max tick labels, one polyline per series.
std::string polyline_svg(std::string_view title, std::string_view x_label, std::string_view y_label,
                         std::span<const PlotSeries> series);

/// Writes to "<path>.tmp" and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace portsim::report
