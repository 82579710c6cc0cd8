#include "specden/core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace specden {

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  - " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

TimeSeries::TimeSeries(Eigen::MatrixXd samples) : samples_(std::move(samples)) {
  if (samples_.rows() < 1) throw InvalidLengthError("time series dimension must be positive");
  if (samples_.cols() < 1) throw InsufficientDataError("time series must hold at least one sample");
}

TimeSeries TimeSeries::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InsufficientDataError("time series must hold at least one sample");
  const auto n = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != n) {
      throw InvalidLengthError("sample " + std::to_string(t) + " has dimension " +
                               std::to_string(rows[t].size()) + ", expected " + std::to_string(n));
    }
    for (std::size_t d = 0; d < n; ++d) m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) = rows[t][d];
  }
  return TimeSeries(std::move(m));
}

TimeSeries TimeSeries::scalar(const std::vector<double>& values) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(values.size()));
  for (std::size_t t = 0; t < values.size(); ++t) m(0, static_cast<Eigen::Index>(t)) = values[t];
  return TimeSeries(std::move(m));
}

WindowSpec WindowSpec::welch(std::vector<double> v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (v.empty() || !(norm2 > 0.0)) throw InvalidWindowError("welch window vector must be nonzero");
  return WindowSpec(WindowKind::welch, std::move(v));
}

void WindowSpec::check_length(std::size_t M) const {
  if (M == 0) throw InvalidLengthError("segment length must be positive");
  if (kind_ == WindowKind::welch && taper_.size() != M) {
    throw InvalidWindowError("welch window has length " + std::to_string(taper_.size()) +
                             ", segment length is " + std::to_string(M));
  }
}

SegmentationPlan::SegmentationPlan(std::size_t M, std::size_t K, WindowSpec window)
    : M_(M), K_(K), window_(std::move(window)) {
  if (K_ < 1 || K_ > M_) {
    throw InvalidPlanError("hop K=" + std::to_string(K_) + " must satisfy 1 <= K <= M=" + std::to_string(M_));
  }
  window_.check_length(M_);
}

std::size_t SegmentationPlan::segment_count(std::size_t N) const noexcept {
  return N < M_ ? 0 : (N - M_) / K_ + 1;
}

std::size_t SegmentationPlan::samples_used(std::size_t k) const noexcept {
  return k == 0 ? 0 : (k - 1) * K_ + M_;
}

FrequencyGrid::FrequencyGrid(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double s = values_[i];
    if (!(s >= -0.5 && s <= 0.5)) {
      throw RangeError("frequency " + std::to_string(s) + " outside [-1/2, 1/2]");
    }
    if (i > 0 && !(s > values_[i - 1])) throw RangeError("frequency grid must be strictly increasing");
  }
}

FrequencyGrid FrequencyGrid::uniform(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = lo;
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    v.back() = hi;
  }
  return FrequencyGrid(std::move(v));
}

Segment extract_segment(const TimeSeries& series, const SegmentationPlan& plan, std::size_t i) {
  const std::size_t available = plan.segment_count(series.length());
  if (i >= available) {
    const std::string max_valid = available == 0 ? "none (record shorter than M)" : std::to_string(available - 1);
    throw RangeError("segment index " + std::to_string(i) + " out of range; maximum valid index is " + max_valid);
  }
  const auto start = static_cast<Eigen::Index>(i * plan.hop());
  const auto M = static_cast<Eigen::Index>(plan.length());
  return Segment{series.samples().middleCols(start, M), i};
}

ComplexVector window_weights(const WindowSpec& spec, std::size_t M, double s) {
  spec.check_length(M);
  ComplexVector w(static_cast<Eigen::Index>(M));
  double scale = 0.0;
  if (spec.kind() == WindowKind::bartlett) {
    scale = 1.0 / std::sqrt(static_cast<double>(M));
  } else {
    double norm2 = 0.0;
    for (double x : spec.taper()) norm2 += x * x;
    if (!(norm2 > 0.0)) throw InvalidWindowError("welch window vector must be nonzero");
    scale = 1.0 / std::sqrt(norm2);
  }
  for (std::size_t k = 0; k < M; ++k) {
    const double amp = spec.kind() == WindowKind::bartlett ? scale : spec.taper()[k] * scale;
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * s;
    w[static_cast<Eigen::Index>(k)] = Complex(amp * std::cos(phase), amp * std::sin(phase));
  }
  return w;
}

Complex window_sum_h(const WindowSpec& spec, std::size_t M, double s) {
  return window_weights(spec, M, s).sum();
}

RealVector segment_mean(const Segment& seg) {
  return seg.samples.rowwise().mean();
}

ComplexVector segment_transform(const Segment& seg, const WindowSpec& spec, double s) {
  const ComplexVector w = window_weights(spec, seg.length(), s);
  return seg.samples.cast<Complex>() * w;
}

std::vector<double> hann_vector(std::size_t M) {
  if (M < 2) throw InvalidLengthError("hann window needs M >= 2, got " + std::to_string(M));
  std::vector<double> v(M);
  const double denom = static_cast<double>(M - 1);
  for (std::size_t k = 0; k < M; ++k) {
    v[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom));
  }
  return v;
}

WeightBank::WeightBank(const WindowSpec& spec, std::size_t M, const FrequencyGrid& grid) {
  weights_.reserve(grid.size());
  h_.reserve(grid.size());
  for (double s : grid) {
    weights_.push_back(window_weights(spec, M, s));
    h_.push_back(weights_.back().sum());
  }
}

}  // namespace specden
