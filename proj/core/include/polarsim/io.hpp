#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "polarsim/experiments.hpp"
#include "polarsim/metrics.hpp"
#include "polarsim/stability.hpp"

namespace polarsim {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Output id of dense node v: original_ids[v] when given, v otherwise.
std::uint64_t output_id(std::span<const std::uint64_t> original_ids, NodeId v);

/// realization,mode,r,n_minus,n_zero,status
void write_samples_csv(std::ostream& out, const EnsembleRecord& record);

/// mode,mean_r,stderr,n_included,n_fixed_point,n_cycle,n_max_iterations
void write_summary_csv(std::ostream& out, const EnsembleRecord& record);

/// i,j,delta,samples
void write_edges_csv(std::ostream& out, const EdgeDifferenceTable& table,
                     std::span<const std::uint64_t> original_ids = {});

/// bin_left,bin_right,count
void write_histogram_csv(std::ostream& out, const Histogram& h);

/// alpha,omega_out,mean_r,stderr,n_excluded
void write_heatmap_csv(std::ostream& out, std::span<const HeatmapCell> cells);

/// size,mode,mean_r,stderr,n_excluded
void write_sweep_csv(std::ostream& out, std::span<const SizePoint> points);

struct StabilityRow {
  std::string run_id;
  StabilityReport report;
};

/// run_id,rho,residual,verdict,zeros_in_state
void write_stability_csv(std::ostream& out, std::span<const StabilityRow> rows);

}  // namespace polarsim
