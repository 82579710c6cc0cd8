#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "specden/core.hpp"

namespace specden {

/// Per-frequency n x n Hermitian PSD estimates after consuming k segments.
struct SpectralEstimate {
  FrequencyGrid grid;
  std::vector<ComplexMatrix> matrices;
  std::size_t k = 0;

  const ComplexMatrix& at(std::size_t f) const { return matrices[f]; }
};

struct EstimatorOptions {
  /// Center with this mean instead of the estimated one (regression checks only).
  std::optional<RealVector> known_mean;
  /// Use at most this many leading segments.
  std::optional<std::size_t> max_segments;
};

struct BatchResult {
  SpectralEstimate estimate;
  RealVector mean;
};

/// Averaged periodogram centered with the sample mean of all k segment means.
///
/// Two passes: the mean over all k segments first, then the average of
/// (y_i(s) - h(s) mu)(y_i(s) - h(s) mu)^*. Throws InsufficientDataError when
/// the record is shorter than one segment.
BatchResult batch_estimate(const TimeSeries& series, const SegmentationPlan& plan, const FrequencyGrid& grid,
                           const EstimatorOptions& options = {});

/// Streaming estimator with step size 1/(k+1).
///
/// Each step centers the new segment transform with the mean estimated from
/// the segments before it, then folds both the outer product and the segment
/// mean into the running averages.
class OnlineState {
 public:
  OnlineState(SegmentationPlan plan, FrequencyGrid grid, std::size_t dimension);

  /// Freezes the centering mean; mu_hat is then never updated.
  void fix_mean(RealVector mean);

  /// Throws SequencingError unless seg.index == k().
  void step(const Segment& seg);

  std::size_t k() const noexcept { return k_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(mu_hat_.size()); }
  const RealVector& mu_hat() const noexcept { return mu_hat_; }
  const std::vector<ComplexMatrix>& estimates() const noexcept { return estimates_; }
  const SegmentationPlan& plan() const noexcept { return plan_; }
  const FrequencyGrid& grid() const noexcept { return grid_; }

  /// Deep copy of the current matrices.
  SpectralEstimate snapshot() const { return SpectralEstimate{grid_, estimates_, k_}; }

 private:
  SegmentationPlan plan_;
  FrequencyGrid grid_;
  WeightBank bank_;
  RealVector mu_hat_;
  std::vector<ComplexMatrix> estimates_;
  std::size_t k_ = 0;
  bool mean_fixed_ = false;
};

OnlineState online_init(const SegmentationPlan& plan, const FrequencyGrid& grid, std::size_t dimension);

/// Value-semantics wrapper around OnlineState::step.
OnlineState online_step(OnlineState state, const Segment& seg);

struct OnlineSnapshot {
  std::size_t k = 0;
  SpectralEstimate estimate;
  RealVector mean;
};

/// Steps through the series in order, recording a snapshot at each checkpoint.
///
/// Checkpoints must be strictly increasing and each must be <= the number of
/// available segments (RangeError otherwise). Only segments up to the last
/// checkpoint are consumed.
std::vector<OnlineSnapshot> online_run(const TimeSeries& series, const SegmentationPlan& plan,
                                       const FrequencyGrid& grid, const std::vector<std::size_t>& checkpoints,
                                       const EstimatorOptions& options = {});

}  // namespace specden
