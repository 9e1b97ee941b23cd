#include "portsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace portsim::report {

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

std::string row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  out += '\n';
  return out;
}

std::string n(double v) { return format_number(v); }
std::string n(std::size_t v) { return std::to_string(v); }

}  // namespace

std::string trips_csv(std::span<const TripRecord> trips) {
  std::string out = "vehicle_id,class,route,scheduled_arrival_s,exit_s,trip_time_s\n";
  for (const TripRecord& t : trips)
    out += row({std::to_string(t.vehicle_id), std::string(to_string(t.kind)), std::string(to_string(t.route)),
                n(t.scheduled_arrival_s), n(t.exit_s), n(t.trip_time_s())});
  return out;
}

std::string bins_csv(const BinSeries& bins) {
  std::string out = "bin_start_s,count,mean_trip_s\n";
  for (const BinRow& b : bins.bins) out += row({n(b.bin_start_s), n(b.count), n(b.mean_trip_s)});
  return out;
}

std::string summary_csv(std::span<const RunSummary> summaries) {
  std::string out = "scenario,seed,n_vehicles,mean_trip_s,p95_trip_s,max_queue_pce\n";
  for (const RunSummary& s : summaries)
    out += row({s.scenario, std::to_string(s.seed), n(s.n_vehicles), n(s.mean_trip_s), n(s.p95_trip_s),
                n(s.max_queue_pce)});
  return out;
}

std::string queue_csv(std::span<const QueueSample> samples) {
  std::string out = "time_s,occupancy_pce\n";
  for (const QueueSample& s : samples) out += row({n(s.time_s), n(s.occupancy_pce)});
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "scenario,fraction,seed_count,mean_of_means_s,sd_of_means_s,advantage_s\n";
  for (const SweepRow& r : sweep.rows)
    out += row({r.scenario, n(r.fraction), n(r.runs.stats.n_runs), n(r.runs.stats.mean_of_means_s),
                n(r.runs.stats.sd_of_means_s), n(r.advantage_s)});
  return out;
}

std::string sweep_bins_csv(const SweepResult& sweep) {
  std::string out = "fraction,bin_start_s,count,mean_trip_s\n";
  for (const SweepRow& r : sweep.rows)
    for (const BinRow& b : r.runs.bins.bins)
      out += row({n(r.fraction), n(b.bin_start_s), n(b.count), n(b.mean_trip_s)});
  return out;
}

std::string fig2_csv(std::span<const Fig2Row> rows) {
  std::string out = "fraction,bin_start_s,count,mean_trip_s\n";
  for (const Fig2Row& r : rows) out += row({n(r.fraction), n(r.bin_start_s), n(r.count), n(r.mean_trip_s)});
  return out;
}

std::string fig3_csv(std::span<const Fig3Row> rows) {
  std::string out = "fraction,seed,mean_trip_s\n";
  for (const Fig3Row& r : rows) out += row({n(r.fraction), std::to_string(r.seed), n(r.mean_trip_s)});
  return out;
}

std::string fig4_csv(std::span<const Fig4Row> rows) {
  std::string out = "scenario,n_runs,mean_of_means_s,sd_of_means_s,min_mean_s,max_mean_s,advantage_s\n";
  for (const Fig4Row& r : rows)
    out += row({r.scenario, n(r.stats.n_runs), n(r.stats.mean_of_means_s), n(r.stats.sd_of_means_s),
                n(r.stats.min_mean_s), n(r.stats.max_mean_s), n(r.advantage_s)});
  return out;
}

std::string polyline_svg(std::string_view title, std::string_view x_label, std::string_view y_label,
                         std::span<const PlotSeries> series) {
  constexpr double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
  static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  double x0 = kUnbounded, x1 = -kUnbounded, y0 = 0.0, y1 = -kUnbounded;
  for (const PlotSeries& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) x0 = 0, x1 = std::max(1.0, x1);
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" "
         "font-size=\"12\">\n";
  out += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<text x=\"" + n(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + std::string(title) +
         "</text>\n";
  out += "<line x1=\"" + n(L) + "\" y1=\"" + n(H - B) + "\" x2=\"" + n(W - R) + "\" y2=\"" + n(H - B) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + n(L) + "\" y1=\"" + n(T) + "\" x2=\"" + n(L) + "\" y2=\"" + n(H - B) +
         "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + n(L) + "\" y=\"" + n(H - B + 16) + "\" text-anchor=\"middle\">" + n(x0) + "</text>\n";
  out += "<text x=\"" + n(W - R) + "\" y=\"" + n(H - B + 16) + "\" text-anchor=\"middle\">" + n(x1) + "</text>\n";
  out += "<text x=\"" + n(L - 6) + "\" y=\"" + n(H - B) + "\" text-anchor=\"end\">" + n(y0) + "</text>\n";
  out += "<text x=\"" + n(L - 6) + "\" y=\"" + n(T + 4) + "\" text-anchor=\"end\">" + n(y1) + "</text>\n";
  out += "<text x=\"" + n((L + W - R) / 2) + "\" y=\"" + n(H - 12) + "\" text-anchor=\"middle\">" +
         std::string(x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + n((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         n((T + H - B) / 2) + ")\">" + std::string(y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const PlotSeries& s = series[k];
    const char* color = colors[k % std::size(colors)];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (i) out += ' ';
      out += n(px(s.x[i])) + "," + n(py(s.y[i]));
    }
    out += "\"/>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(k);
    out += "<line x1=\"" + n(W - R + 10) + "\" y1=\"" + n(ly) + "\" x2=\"" + n(W - R + 30) + "\" y2=\"" + n(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + n(W - R + 36) + "\" y=\"" + n(ly + 4) + "\">" + s.name + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace portsim::report
