#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "polarsim/dynamics.hpp"
#include "polarsim/graph.hpp"

namespace polarsim {

/// Polarization of one state: r = 1 - 4 (n_minus - 1/2)^2, where n_minus is the
/// fraction of all nodes (zeros included) holding -1.
struct PolarizationSample {
  double r = 0.0;
  double n_minus = 0.0;
  double n_zero = 0.0;
  Convergence status = Convergence::FixedPoint;
};

double polarization_from_fraction(double n_minus);
PolarizationSample polarization_index(const StateVector& x);

/// Quantile with linear interpolation between order statistics
/// (position q * (n - 1) in the sorted sample).
double quantile(std::span<const double> samples, double q);

/// Freedman-Diaconis bin count: width 2 IQR n^(-1/3), ceil(range / width);
/// 1 when the IQR or the range is zero. Throws for fewer than 2 samples.
std::size_t fd_bin_count(std::span<const double> samples);

struct Histogram {
  std::vector<double> edges;  // bin_count + 1 entries
  std::vector<std::size_t> counts;
};

/// Equal-width histogram over [min, max] with the Freedman-Diaconis bin count.
/// The last bin is closed on the right.
Histogram fd_histogram(std::span<const double> samples);

/// Mean |x_i - x_j| per edge over a set of asymptotic states.
struct EdgeDifferenceTable {
  std::vector<EdgeId> edges;
  std::vector<double> delta;
  std::size_t sample_count = 0;

  double at(EdgeId e) const;
};

/// Integer accumulation of |x_i - x_j|, so partial accumulators merge exactly
/// in any order.
class EdgeDifferenceAccumulator {
 public:
  explicit EdgeDifferenceAccumulator(const Graph& g);

  void add(const StateVector& x);
  void merge(const EdgeDifferenceAccumulator& other);
  std::size_t samples() const { return samples_; }

  /// Throws std::logic_error when no state has been added.
  EdgeDifferenceTable table() const;

 private:
  const Graph* graph_;
  std::vector<std::uint64_t> sums_;
  std::size_t samples_ = 0;
};

/// Throws std::invalid_argument for an empty stream or mismatched lengths.
EdgeDifferenceTable edge_differences(const Graph& g, std::span<const StateVector> states);

/// Throws std::invalid_argument on length mismatch, fewer than 2 points, or
/// zero variance in either input.
double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

/// Pearson correlation of average ranks (ties share their mean rank).
double spearman_correlation(std::span<const double> xs, std::span<const double> ys);

struct MeanStat {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(count)
  std::size_t count = 0;
};

MeanStat mean_with_error(std::span<const double> values);

}  // namespace polarsim
