#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarsim/dynamics.hpp"
#include "polarsim/graph.hpp"

namespace polarsim {

inline constexpr double kDefaultSteepness = 100.0;

/// State of the smoothed map x_i <- (2/pi) atan(B (x_i + sum_j A_ij x_j)).
/// `steepness` is B; every value lies strictly inside (-1, 1).
struct SmoothedState {
  std::vector<double> values;
  double steepness = kDefaultSteepness;
};

struct StabilityOptions {
  double steepness = kDefaultSteepness;
  double relax_tol = 1e-10;
  std::size_t relax_max_iter = 100000;
  double power_tol = 1e-10;
  std::size_t power_max_iter = 100000;
};

enum class Verdict { Stable, Unstable };

std::string verdict_label(Verdict v);

struct StabilityReport {
  SmoothedState fixed_point;
  double spectral_radius = 0.0;
  double residual = 0.0;
  Verdict verdict = Verdict::Unstable;
  std::size_t zeros_in_state = 0;
  std::size_t relax_iterations = 0;
};

class RelaxationError : public std::runtime_error {
 public:
  RelaxationError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class EigenvalueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SmoothedState smoothed_step(const Graph& g, const SmoothedState& x);

/// Local field h_i = x_i + sum_j A_ij x_j.
std::vector<double> local_fields(const Graph& g, std::span<const double> x);

/// max_i |h_i - tan(pi x_i / 2) / B|, the defect of the smoothed fixed-point equation.
double fixed_point_residual(const Graph& g, const SmoothedState& x);

/// Relaxes the smoothed map from the real embedding of a discrete fixed point
/// until successive iterates differ by less than `tol` in max-norm.
///
/// Nodes that are nonzero in `start` follow the smoothed map. Neutral nodes sit
/// on a repelling branch, so their block is solved by Newton's method against
/// the current values of the other nodes; without this they would be pushed to
/// +-1 and the relaxed point would no longer correspond to `start`.
/// Throws RelaxationError when max_iter is exhausted.
SmoothedState relax_to_fixed_point(const Graph& g, const StateVector& start, double steepness,
                                   double tol, std::size_t max_iter,
                                   std::size_t* iterations = nullptr);

/// Row-compressed sparse matrix; the pattern of a Jacobian is that of A + I.
struct SparseMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<NodeId> cols;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const;
};

/// Row factor d_i = (2B/pi) / (1 + B^2 h_i^2), so that J = diag(d) (A + I).
std::vector<double> jacobian_row_scaling(const Graph& g, const SmoothedState& x);

/// J_ij = (2B/pi) (A_ij + delta_ij) / (1 + B^2 h_i^2).
SparseMatrix jacobian(const Graph& g, const SmoothedState& x);

/// Largest |eigenvalue| of diag(d) (A + I), computed by power iteration on the
/// similar symmetric matrix diag(sqrt d) (A + I) diag(sqrt d), with shifted
/// inverse iteration when plain iteration is slow. Stops once the lower bound
/// ||M v|| and the upper bound max_i (M v)_i / v_i agree within relative `tol`
/// and returns the lower bound. Returns 0 when d vanishes; throws
/// EigenvalueError when `max_iter` iterations are not enough.
double spectral_radius(const Graph& g, std::span<const double> row_scaling, double tol,
                       std::size_t max_iter = 100000);
double spectral_radius(const Graph& g, const SmoothedState& x, double tol,
                       std::size_t max_iter = 100000);

/// Requires steady.status == FixedPoint (std::invalid_argument otherwise).
StabilityReport classify_stability(const Graph& g, const SteadyStateResult& steady,
                                   const StabilityOptions& options = {});

}  // namespace polarsim
