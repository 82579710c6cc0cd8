#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "specden/core.hpp"

namespace specden {

/// Finite-state chain with row-stochastic transitions P (m x m) and
/// observation map G (m x n): state x emits the row G(x, :).
class MarkovModel {
 public:
  /// Validates P (nonnegative, rows sum to 1 within 1e-12, some power strictly
  /// positive) and the shape of G.
  MarkovModel(Eigen::MatrixXd P, Eigen::MatrixXd G);

  /// Observation g(x) = x on states {0, ..., m-1}.
  static MarkovModel identity_observed(Eigen::MatrixXd P);
  /// P = [[0.3, 0.7], [0.5, 0.5]] observed through g(x) = x.
  static MarkovModel two_state_reference();

  std::size_t states() const noexcept { return static_cast<std::size_t>(P_.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(G_.cols()); }
  const Eigen::MatrixXd& transition() const noexcept { return P_; }
  const Eigen::MatrixXd& observation() const noexcept { return G_; }

  /// max_x ||g(x)||_2.
  double g_max() const;

 private:
  Eigen::MatrixXd P_;
  Eigen::MatrixXd G_;
};

/// Unique pi with pi P = pi, sum pi = 1. Throws DegeneracyError otherwise.
RealVector stationary_dist(const Eigen::MatrixXd& P);

/// sum_j min_i P(i, j).
double doeblin_coefficient(const Eigen::MatrixXd& P);

/// 64-bit Mersenne Twister, raw output mapped to [0,1) with 53 bits. The
/// generator and the mapping are both fixed by the C++ standard / this code,
/// so a seed reproduces the same series on every platform.
inline constexpr std::string_view kRngIdentity = "std::mt19937_64; uniform = (x >> 11) * 2^-53; trial seed = splitmix64(master + trial)";

/// Seed for trial `trial` derived from `master` by one splitmix64 round.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

struct SimulateOptions {
  /// Steps discarded before recording; 0 starts from the stationary distribution.
  std::size_t burn_in = 0;
};

TimeSeries simulate(const MarkovModel& model, std::size_t N, std::uint64_t seed, const SimulateOptions& options = {});

/// Exact R[lag] = E[(y[i+lag] - mu)(y[i] - mu)^T]; R[-lag] = R[lag]^T.
Eigen::MatrixXd autocovariance(const MarkovModel& model, long lag);

/// True mean sum_x pi(x) g(x).
RealVector true_mean(const MarkovModel& model);

/// Phi(s) = sum_k e^{-j 2 pi s k} R[k], summed in closed form through the
/// resolvent of P - 1 pi. Throws DivergenceError for periodic chains.
ComplexMatrix true_psd(const MarkovModel& model, double s);

/// Phi_bar(s) = sum_{a,b} w_a(s) conj(w_b(s)) R[a - b].
ComplexMatrix windowed_expectation(const MarkovModel& model, const SegmentationPlan& plan, double s);

}  // namespace specden
