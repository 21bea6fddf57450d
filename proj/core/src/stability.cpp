#include "polarsim/stability.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace polarsim {

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

double smoothed_sign(double field, double steepness) {
  return kTwoOverPi * std::atan(steepness * field);
}

double row_factor(double field, double steepness) {
  double bh = steepness * field;
  return kTwoOverPi * steepness / (1.0 + bh * bh);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Newton solve of the neutral-node block given fixed values elsewhere. It works
// on h_i - tan(pi x_i / 2) / B = 0, which is close to linear near x_i = 0; the
// atan form saturates there and Newton steps can jump to a root of another
// sign pattern.
class NeutralBlockSolver {
 public:
  NeutralBlockSolver(const Graph& g, const StateVector& start, double steepness)
      : g_(g), steepness_(steepness), local_(g.node_count(), -1) {
    for (std::size_t v = 0; v < start.size(); ++v) {
      if (start[v] == 0) {
        local_[v] = static_cast<long>(nodes_.size());
        nodes_.push_back(static_cast<NodeId>(v));
      }
    }
  }

  bool empty() const { return nodes_.empty(); }
  bool is_neutral(NodeId v) const { return local_[v] >= 0; }

  // Updates x on the neutral nodes in place.
  void solve(std::vector<double>& x, double tol) {
    const auto m = static_cast<Eigen::Index>(nodes_.size());
    const double half_pi = 0.5 * std::numbers::pi;
    Eigen::VectorXd defect(m);
    for (int newton = 0; newton < 50; ++newton) {
      std::vector<Eigen::Triplet<double>> entries;
      entries.reserve(nodes_.size() * 3);
      for (Eigen::Index k = 0; k < m; ++k) {
        NodeId v = nodes_[static_cast<std::size_t>(k)];
        double field = x[v];
        for (NodeId w : g_.neighbors(v)) field += x[w];
        double c = std::cos(half_pi * x[v]);
        defect[k] = field - std::tan(half_pi * x[v]) / steepness_;
        entries.emplace_back(k, k, 1.0 - half_pi / (steepness_ * c * c));
        for (NodeId w : g_.neighbors(v)) {
          if (local_[w] >= 0) entries.emplace_back(k, local_[w], 1.0);
        }
      }
      if (defect.lpNorm<Eigen::Infinity>() == 0.0) return;
      Eigen::SparseMatrix<double> jac(m, m);
      jac.setFromTriplets(entries.begin(), entries.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(jac);
      if (lu.info() != Eigen::Success) {
        throw RelaxationError("singular Jacobian on the neutral-node block", defect.lpNorm<Eigen::Infinity>());
      }
      Eigen::VectorXd delta = lu.solve(defect);
      double largest = 0.0;
      for (Eigen::Index k = 0; k < m; ++k) {
        double& value = x[nodes_[static_cast<std::size_t>(k)]];
        value = std::clamp(value - delta[k], -1.0 + 1e-15, 1.0 - 1e-15);
        largest = std::max(largest, std::abs(delta[k]));
      }
      if (largest < tol * 1e-3) return;
    }
  }

 private:
  const Graph& g_;
  double steepness_;
  std::vector<long> local_;
  std::vector<NodeId> nodes_;
};

// Newton refinement of a converged relaxation on h_i - tan(pi x_i / 2) / B = 0
// for every node. Its Jacobian (A + I) - diag((pi / 2B) sec^2(pi x_i / 2)) is
// symmetric. Steps are kept only while the residual drops.
double defect_norm(const Graph& g, const std::vector<double>& x, double steepness) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double field = x[i];
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) field += x[j];
    worst = std::max(worst, std::abs(field - std::tan(0.5 * std::numbers::pi * x[i]) / steepness));
  }
  return worst;
}

void polish(const Graph& g, std::vector<double>& x, double steepness) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const double half_pi = 0.5 * std::numbers::pi;
  double residual = defect_norm(g, x, steepness);
  for (int newton = 0; newton < 8 && residual > 0.0; ++newton) {
    Eigen::VectorXd defect(n);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(x.size() + 2 * g.edge_count());
    for (Eigen::Index k = 0; k < n; ++k) {
      auto i = static_cast<NodeId>(k);
      double field = x[i];
      for (NodeId j : g.neighbors(i)) {
        field += x[j];
        entries.emplace_back(k, j, 1.0);
      }
      double c = std::cos(half_pi * x[i]);
      defect[k] = field - std::tan(half_pi * x[i]) / steepness;
      entries.emplace_back(k, k, 1.0 - half_pi / (steepness * c * c));
    }
    Eigen::SparseMatrix<double> jac(n, n);
    jac.setFromTriplets(entries.begin(), entries.end());
    Eigen::VectorXd delta;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(jac);
    if (ldlt.info() == Eigen::Success) {
      delta = ldlt.solve(defect);
    } else {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(jac);
      if (lu.info() != Eigen::Success) return;
      delta = lu.solve(defect);
    }
    std::vector<double> trial = x;
    for (Eigen::Index k = 0; k < n; ++k) {
      auto& v = trial[static_cast<std::size_t>(k)];
      v = std::clamp(v - delta[k], -1.0 + 1e-15, 1.0 - 1e-15);
    }
    double next = defect_norm(g, trial, steepness);
    if (!(next < residual)) return;
    x = std::move(trial);
    residual = next;
  }
}

}  // namespace

std::string verdict_label(Verdict v) { return v == Verdict::Stable ? "Stable" : "Unstable"; }

std::vector<double> local_fields(const Graph& g, std::span<const double> x) {
  std::vector<double> h(g.node_count());
  for (std::size_t i = 0; i < h.size(); ++i) {
    double field = x[i];
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) field += x[j];
    h[i] = field;
  }
  return h;
}

SmoothedState smoothed_step(const Graph& g, const SmoothedState& x) {
  if (x.values.size() != g.node_count()) throw std::invalid_argument("state length does not match graph");
  if (!(x.steepness > 0.0)) throw std::invalid_argument("steepness must be positive");
  SmoothedState out{local_fields(g, x.values), x.steepness};
  for (double& v : out.values) v = smoothed_sign(v, x.steepness);
  return out;
}

double fixed_point_residual(const Graph& g, const SmoothedState& x) {
  auto h = local_fields(g, x.values);
  double worst = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    double rhs = std::tan(0.5 * std::numbers::pi * x.values[i]) / x.steepness;
    worst = std::max(worst, std::abs(h[i] - rhs));
  }
  return worst;
}

SmoothedState relax_to_fixed_point(const Graph& g, const StateVector& start, double steepness,
                                   double tol, std::size_t max_iter, std::size_t* iterations) {
  if (start.size() != g.node_count()) throw std::invalid_argument("state length does not match graph");
  if (!(steepness > 0.0)) throw std::invalid_argument("steepness must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("relaxation tolerance must be positive");

  SmoothedState x;
  x.steepness = steepness;
  x.values.assign(start.values().begin(), start.values().end());
  NeutralBlockSolver neutral(g, start, steepness);

  double change = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    SmoothedState next = smoothed_step(g, x);
    if (!neutral.empty()) {
      for (std::size_t v = 0; v < next.values.size(); ++v) {
        if (neutral.is_neutral(static_cast<NodeId>(v))) next.values[v] = x.values[v];
      }
      neutral.solve(next.values, tol);
    }
    change = max_abs_diff(next.values, x.values);
    x = std::move(next);
    if (change < tol) {
      polish(g, x.values, steepness);
      if (iterations) *iterations = it;
      return x;
    }
  }
  throw RelaxationError("smoothed relaxation did not converge in " + std::to_string(max_iter) +
                            " iterations (last change " + std::to_string(change) + ")",
                        fixed_point_residual(g, x));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
  auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
  auto it = std::lower_bound(first, last, static_cast<NodeId>(j));
  if (it == last || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> jacobian_row_scaling(const Graph& g, const SmoothedState& x) {
  if (x.values.size() != g.node_count()) throw std::invalid_argument("state length does not match graph");
  auto d = local_fields(g, x.values);
  for (double& v : d) v = row_factor(v, x.steepness);
  return d;
}

SparseMatrix jacobian(const Graph& g, const SmoothedState& x) {
  auto d = jacobian_row_scaling(g, x);
  SparseMatrix j;
  j.rows = g.node_count();
  j.cols.reserve(g.node_count() + 2 * g.edge_count());
  j.values.reserve(j.cols.capacity());
  for (std::size_t i = 0; i < j.rows; ++i) {
    auto row = g.neighbors(static_cast<NodeId>(i));
    bool diagonal_done = false;
    for (NodeId c : row) {
      if (!diagonal_done && c > i) {
        j.cols.push_back(static_cast<NodeId>(i));
        j.values.push_back(d[i]);
        diagonal_done = true;
      }
      j.cols.push_back(c);
      j.values.push_back(d[i]);
    }
    if (!diagonal_done) {
      j.cols.push_back(static_cast<NodeId>(i));
      j.values.push_back(d[i]);
    }
    j.row_offsets.push_back(j.cols.size());
  }
  return j;
}

double spectral_radius(const Graph& g, std::span<const double> row_scaling, double tol,
                       std::size_t max_iter) {
  if (row_scaling.size() != g.node_count()) throw std::invalid_argument("scaling length does not match graph");
  if (!(tol > 0.0)) throw std::invalid_argument("eigenvalue tolerance must be positive");
  const std::size_t n = g.node_count();
  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (row_scaling[i] < 0.0) throw std::invalid_argument("row scaling must be non-negative");
    root[i] = std::sqrt(row_scaling[i]);
  }
  if (std::all_of(root.begin(), root.end(), [](double r) { return r == 0.0; })) return 0.0;

  // M = S (A + I) S is symmetric and non-negative. For a unit vector v >= 0,
  // ||M v|| <= rho <= max_i (M v)_i / v_i, so the gap between the two bounds is
  // a certified error. Plain iteration stalls when the leading eigenvalues are
  // nearly equal; it then switches to inverse iteration with a shift above the
  // upper bound, where (shift - M)^-1 is again non-negative and its dominant
  // eigenvector is that of rho.
  auto multiply = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = root[i] * in[i];
      for (NodeId j : g.neighbors(static_cast<NodeId>(i))) acc += root[j] * in[j];
      out[i] = root[i] * acc;
    }
  };
  auto normalize = [](std::vector<double>& v) {
    double norm = 0.0;
    for (double value : v) norm += value * value;
    norm = std::sqrt(norm);
    for (double& value : v) value /= norm;
  };
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> w(n);
  double lower = 0.0, upper = 0.0;
  auto bounds = [&]() {
    multiply(v, w);
    double norm = 0.0, vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      norm += w[i] * w[i];
      vmax = std::max(vmax, v[i]);
    }
    lower = std::sqrt(norm);
    upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (root[i] > 0.0 && v[i] > 1e-200 * vmax) upper = std::max(upper, w[i] / v[i]);
    }
    return upper - lower <= tol * lower;
  };

  const std::size_t plain_steps = std::min<std::size_t>(max_iter, 200);
  std::size_t it = 0;
  for (; it < plain_steps; ++it) {
    if (bounds()) return lower;
    v = w;
    normalize(v);
  }

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(n + 2 * g.edge_count());
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) {
      entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), -root[i] * root[j]);
    }
  }
  const auto size = static_cast<Eigen::Index>(n);
  double factored_shift = -1.0;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  for (; it < max_iter; ++it) {
    if (bounds()) return lower;
    double shift = upper * (1.0 + 1e-9) + 1e-300;
    if (factored_shift < 0.0 || shift < factored_shift - 0.5 * (factored_shift - lower)) {
      std::vector<Eigen::Triplet<double>> all = entries;
      for (std::size_t i = 0; i < n; ++i) {
        auto k = static_cast<Eigen::Index>(i);
        all.emplace_back(k, k, shift - root[i] * root[i]);
      }
      Eigen::SparseMatrix<double> a(size, size);
      a.setFromTriplets(all.begin(), all.end());
      llt.compute(a);
      if (llt.info() != Eigen::Success) break;
      factored_shift = shift;
    }
    Eigen::Map<const Eigen::VectorXd> rhs(v.data(), size);
    Eigen::VectorXd x = llt.solve(rhs);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::max(0.0, x[static_cast<Eigen::Index>(i)]);
    normalize(v);
  }
  throw EigenvalueError("power iteration did not converge in " + std::to_string(max_iter) +
                        " iterations (bounds " + std::to_string(lower) + ", " + std::to_string(upper) + ")");
}

double spectral_radius(const Graph& g, const SmoothedState& x, double tol, std::size_t max_iter) {
  auto d = jacobian_row_scaling(g, x);
  return spectral_radius(g, d, tol, max_iter);
}

StabilityReport classify_stability(const Graph& g, const SteadyStateResult& steady,
                                   const StabilityOptions& options) {
  if (steady.status != Convergence::FixedPoint) {
    throw std::invalid_argument("stability classification needs a fixed point, got " +
                                status_label(steady.status, steady.period));
  }
  StabilityReport report;
  report.zeros_in_state = steady.final_state.count(0);
  report.fixed_point = relax_to_fixed_point(g, steady.final_state, options.steepness,
                                            options.relax_tol, options.relax_max_iter,
                                            &report.relax_iterations);
  report.residual = fixed_point_residual(g, report.fixed_point);
  report.spectral_radius =
      spectral_radius(g, report.fixed_point, options.power_tol, options.power_max_iter);
  report.verdict = report.spectral_radius < 1.0 ? Verdict::Stable : Verdict::Unstable;
  return report;
}

}  // namespace polarsim
