#include "polarsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polarsim {

double polarization_from_fraction(double n_minus) {
  double d = n_minus - 0.5;
  return 1.0 - 4.0 * d * d;
}

PolarizationSample polarization_index(const StateVector& x) {
  PolarizationSample s;
  if (x.size() == 0) return s;
  const double n = static_cast<double>(x.size());
  s.n_minus = static_cast<double>(x.count(-1)) / n;
  s.n_zero = static_cast<double>(x.count(0)) / n;
  s.r = polarization_from_fraction(s.n_minus);
  return s;
}

double quantile(std::span<const double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::size_t fd_bin_count(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("Freedman-Diaconis rule needs two samples");
  auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  double range = *mx - *mn;
  double iqr = quantile(samples, 0.75) - quantile(samples, 0.25);
  if (iqr <= 0.0 || range <= 0.0) return 1;
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(samples.size()));
  // Relative slack keeps exact multiples (range == k * width) from rounding up.
  double bins = std::ceil(range / width * (1.0 - 1e-12));
  return std::max<std::size_t>(1, static_cast<std::size_t>(bins));
}

Histogram fd_histogram(std::span<const double> samples) {
  std::size_t bins = fd_bin_count(samples);
  auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  double lo = *mn;
  double hi = *mx;
  Histogram h;
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + width * static_cast<double>(k);
  h.edges.back() = hi;
  for (double v : samples) {
    std::size_t k = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    ++h.counts[std::min(k, bins - 1)];
  }
  return h;
}

double EdgeDifferenceTable::at(EdgeId e) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) throw std::out_of_range("edge not in difference table");
  return delta[static_cast<std::size_t>(it - edges.begin())];
}

EdgeDifferenceAccumulator::EdgeDifferenceAccumulator(const Graph& g)
    : graph_(&g), sums_(g.edge_count(), 0) {}

void EdgeDifferenceAccumulator::add(const StateVector& x) {
  if (x.size() != graph_->node_count()) {
    throw std::invalid_argument("state length does not match graph");
  }
  auto edges = graph_->edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    sums_[k] += static_cast<std::uint64_t>(std::abs(x[edges[k].lo] - x[edges[k].hi]));
  }
  ++samples_;
}

void EdgeDifferenceAccumulator::merge(const EdgeDifferenceAccumulator& other) {
  if (other.graph_ != graph_) throw std::invalid_argument("cannot merge tables of different graphs");
  for (std::size_t k = 0; k < sums_.size(); ++k) sums_[k] += other.sums_[k];
  samples_ += other.samples_;
}

EdgeDifferenceTable EdgeDifferenceAccumulator::table() const {
  if (samples_ == 0) throw std::logic_error("edge difference table has no samples");
  EdgeDifferenceTable t;
  auto edges = graph_->edges();
  t.edges.assign(edges.begin(), edges.end());
  t.delta.resize(sums_.size());
  for (std::size_t k = 0; k < sums_.size(); ++k) {
    t.delta[k] = static_cast<double>(sums_[k]) / static_cast<double>(samples_);
  }
  t.sample_count = samples_;
  return t;
}

EdgeDifferenceTable edge_differences(const Graph& g, std::span<const StateVector> states) {
  if (states.empty()) throw std::invalid_argument("edge differences need at least one state");
  EdgeDifferenceAccumulator acc(g);
  for (const StateVector& x : states) acc.add(x);
  return acc.table();
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("correlation inputs differ in length");
  if (xs.size() < 2) throw std::invalid_argument("correlation needs at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double dx = xs[k] - mx;
    double dy = ys[k] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw std::invalid_argument("degenerate scatter: zero variance in correlation input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    while (end + 1 < order.size() && values[order[end + 1]] == values[order[start]]) ++end;
    double rank = 0.5 * static_cast<double>(start + end) + 1.0;
    for (std::size_t k = start; k <= end; ++k) ranks[order[k]] = rank;
    start = end + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("correlation inputs differ in length");
  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  return pearson_correlation(rx, ry);
}

MeanStat mean_with_error(std::span<const double> values) {
  MeanStat s;
  s.count = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

}  // namespace polarsim
