#include "polarsim/io.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace polarsim {

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

std::uint64_t output_id(std::span<const std::uint64_t> original_ids, NodeId v) {
  return original_ids.empty() ? v : original_ids[v];
}

void write_samples_csv(std::ostream& out, const EnsembleRecord& record) {
  out << "realization,mode,r,n_minus,n_zero,status\n";
  for (std::size_t t = 0; t < record.realizations; ++t) {
    for (const ModeRecord& mode : record.modes) {
      const RunOutcome& run = mode.runs[t];
      out << t << ',' << mode_label(mode.mode) << ',' << format_double(run.sample.r) << ','
          << format_double(run.sample.n_minus) << ',' << format_double(run.sample.n_zero) << ','
          << status_label(run.sample.status, run.period) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const EnsembleRecord& record) {
  out << "mode,mean_r,stderr,n_included,n_fixed_point,n_cycle,n_max_iterations\n";
  for (const ModeRecord& mode : record.modes) {
    MeanStat s = mode.mean_r(record.include_cycles);
    out << mode_label(mode.mode) << ',' << format_double(s.mean) << ',' << format_double(s.std_error)
        << ',' << s.count << ',' << mode.fixed_points << ',' << mode.cycles << ','
        << mode.max_iterations << '\n';
  }
}

void write_edges_csv(std::ostream& out, const EdgeDifferenceTable& table,
                     std::span<const std::uint64_t> original_ids) {
  out << "i,j,delta,samples\n";
  for (std::size_t k = 0; k < table.edges.size(); ++k) {
    out << output_id(original_ids, table.edges[k].lo) << ',' << output_id(original_ids, table.edges[k].hi)
        << ',' << format_double(table.delta[k]) << ',' << table.sample_count << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_left,bin_right,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out << format_double(h.edges[k]) << ',' << format_double(h.edges[k + 1]) << ',' << h.counts[k] << '\n';
  }
}

void write_heatmap_csv(std::ostream& out, std::span<const HeatmapCell> cells) {
  out << "alpha,omega_out,mean_r,stderr,n_excluded\n";
  for (const HeatmapCell& c : cells) {
    out << format_double(c.alpha) << ',' << format_double(c.omega_out) << ','
        << format_double(c.mean_r.mean) << ',' << format_double(c.mean_r.std_error) << ',' << c.excluded
        << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SizePoint> points) {
  out << "size,mode,mean_r,stderr,n_excluded\n";
  for (const SizePoint& p : points) {
    for (std::size_t k = 0; k < p.modes.size(); ++k) {
      out << p.size << ',' << mode_label(p.modes[k]) << ',' << format_double(p.mean_r[k].mean) << ','
          << format_double(p.mean_r[k].std_error) << ',' << p.excluded[k] << '\n';
    }
  }
}

void write_stability_csv(std::ostream& out, std::span<const StabilityRow> rows) {
  out << "run_id,rho,residual,verdict,zeros_in_state\n";
  for (const StabilityRow& row : rows) {
    out << row.run_id << ',' << format_double(row.report.spectral_radius) << ','
        << format_double(row.report.residual) << ',' << verdict_label(row.report.verdict) << ','
        << row.report.zeros_in_state << '\n';
  }
}

}  // namespace polarsim
