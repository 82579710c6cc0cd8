#include "specden/estimators.hpp"

#include <string>

namespace specden {

namespace {

std::size_t segments_to_use(const TimeSeries& series, const SegmentationPlan& plan, const EstimatorOptions& options) {
  const std::size_t available = plan.segment_count(series.length());
  if (available == 0) {
    throw InsufficientDataError("record of " + std::to_string(series.length()) +
                                " samples is shorter than segment length " + std::to_string(plan.length()));
  }
  if (options.max_segments) {
    if (*options.max_segments == 0) throw RangeError("max_segments must be at least 1");
    if (*options.max_segments > available) {
      throw RangeError("requested " + std::to_string(*options.max_segments) + " segments, only " +
                       std::to_string(available) + " available");
    }
    return *options.max_segments;
  }
  return available;
}

void check_known_mean(const EstimatorOptions& options, std::size_t n) {
  if (options.known_mean && static_cast<std::size_t>(options.known_mean->size()) != n) {
    throw InvalidLengthError("known mean has dimension " + std::to_string(options.known_mean->size()) +
                             ", series has " + std::to_string(n));
  }
}

}  // namespace

BatchResult batch_estimate(const TimeSeries& series, const SegmentationPlan& plan, const FrequencyGrid& grid,
                           const EstimatorOptions& options) {
  const std::size_t k = segments_to_use(series, plan, options);
  const auto n = static_cast<Eigen::Index>(series.dimension());
  check_known_mean(options, series.dimension());
  const auto M = static_cast<Eigen::Index>(plan.length());
  const auto K = static_cast<Eigen::Index>(plan.hop());
  const Eigen::MatrixXd& y = series.samples();

  RealVector mean = RealVector::Zero(n);
  if (options.known_mean) {
    mean = *options.known_mean;
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      mean += y.middleCols(static_cast<Eigen::Index>(i) * K, M).rowwise().mean();
    }
    mean /= static_cast<double>(k);
  }

  const WeightBank bank(plan.window(), plan.length(), grid);
  const ComplexVector mean_c = mean.cast<Complex>();
  std::vector<ComplexMatrix> acc(grid.size(), ComplexMatrix::Zero(n, n));
  Eigen::MatrixXcd block(n, M);
  for (std::size_t i = 0; i < k; ++i) {
    block = y.middleCols(static_cast<Eigen::Index>(i) * K, M).cast<Complex>();
    for (std::size_t f = 0; f < grid.size(); ++f) {
      const ComplexVector centered = block * bank.weights(f) - bank.h(f) * mean_c;
      acc[f].noalias() += centered * centered.adjoint();
    }
  }
  for (auto& m : acc) m /= static_cast<double>(k);

  return BatchResult{SpectralEstimate{grid, std::move(acc), k}, std::move(mean)};
}

OnlineState::OnlineState(SegmentationPlan plan, FrequencyGrid grid, std::size_t dimension)
    : plan_(std::move(plan)),
      grid_(std::move(grid)),
      bank_(plan_.window(), plan_.length(), grid_),
      mu_hat_(RealVector::Zero(static_cast<Eigen::Index>(dimension))),
      estimates_(grid_.size(), ComplexMatrix::Zero(static_cast<Eigen::Index>(dimension),
                                                   static_cast<Eigen::Index>(dimension))) {
  if (dimension == 0) throw InvalidLengthError("dimension must be positive");
}

void OnlineState::fix_mean(RealVector mean) {
  if (mean.size() != mu_hat_.size()) throw InvalidLengthError("fixed mean has the wrong dimension");
  mu_hat_ = std::move(mean);
  mean_fixed_ = true;
}

void OnlineState::step(const Segment& seg) {
  if (seg.index != k_) {
    throw SequencingError("expected segment " + std::to_string(k_) + ", got segment " + std::to_string(seg.index));
  }
  if (seg.length() != plan_.length() || seg.samples.rows() != mu_hat_.size()) {
    throw InvalidLengthError("segment shape does not match the estimator");
  }
  const double alpha = 1.0 / static_cast<double>(k_ + 1);
  const Eigen::MatrixXcd block = seg.samples.cast<Complex>();
  // Centering uses the mean before this segment is folded in.
  const ComplexVector mean_c = mu_hat_.cast<Complex>();
  for (std::size_t f = 0; f < estimates_.size(); ++f) {
    const ComplexVector delta = block * bank_.weights(f) - bank_.h(f) * mean_c;
    estimates_[f] += alpha * (delta * delta.adjoint() - estimates_[f]);
  }
  if (!mean_fixed_) mu_hat_ += alpha * (segment_mean(seg) - mu_hat_);
  ++k_;
}

OnlineState online_init(const SegmentationPlan& plan, const FrequencyGrid& grid, std::size_t dimension) {
  return OnlineState(plan, grid, dimension);
}

OnlineState online_step(OnlineState state, const Segment& seg) {
  state.step(seg);
  return state;
}

std::vector<OnlineSnapshot> online_run(const TimeSeries& series, const SegmentationPlan& plan,
                                       const FrequencyGrid& grid, const std::vector<std::size_t>& checkpoints,
                                       const EstimatorOptions& options) {
  const std::size_t available = plan.segment_count(series.length());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    if (checkpoints[c] == 0) throw RangeError("checkpoint k must be at least 1");
    if (c > 0 && checkpoints[c] <= checkpoints[c - 1]) throw RangeError("checkpoints must be strictly increasing");
    if (checkpoints[c] > available) {
      throw RangeError("checkpoint k=" + std::to_string(checkpoints[c]) + " exceeds the " +
                       std::to_string(available) + " available segments");
    }
  }
  check_known_mean(options, series.dimension());

  OnlineState state(plan, grid, series.dimension());
  if (options.known_mean) state.fix_mean(*options.known_mean);

  std::vector<OnlineSnapshot> out;
  out.reserve(checkpoints.size());
  for (std::size_t target : checkpoints) {
    while (state.k() < target) state.step(extract_segment(series, plan, state.k()));
    out.push_back(OnlineSnapshot{state.k(), state.snapshot(), state.mu_hat()});
  }
  return out;
}

}  // namespace specden
