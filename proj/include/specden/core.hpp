#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "specden/errors.hpp"

namespace specden {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Finite record of n-dimensional real samples y[0..N-1].
///
/// Samples are stored column-wise (n x N) so a segment is a contiguous block.
/// Immutable after construction.
class TimeSeries {
 public:
  /// `samples` is n x N: column t holds y[t].
  explicit TimeSeries(Eigen::MatrixXd samples);

  /// Each inner vector is one sample; all must share the same dimension.
  static TimeSeries from_rows(const std::vector<std::vector<double>>& rows);
  static TimeSeries scalar(const std::vector<double>& values);

  std::size_t length() const noexcept { return static_cast<std::size_t>(samples_.cols()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(samples_.rows()); }

  const Eigen::MatrixXd& samples() const noexcept { return samples_; }
  Eigen::VectorXd sample(std::size_t t) const { return samples_.col(static_cast<Eigen::Index>(t)); }

 private:
  Eigen::MatrixXd samples_;
};

enum class WindowKind { bartlett, welch };

/// Bartlett uses uniform 1/sqrt(M) weights; Welch uses v / ||v||_2.
class WindowSpec {
 public:
  static WindowSpec bartlett() { return WindowSpec(WindowKind::bartlett, {}); }
  /// Throws InvalidWindowError when v is empty or all zero.
  static WindowSpec welch(std::vector<double> v);

  WindowKind kind() const noexcept { return kind_; }
  const std::vector<double>& taper() const noexcept { return taper_; }

  /// Throws unless the spec can produce weights of length M.
  void check_length(std::size_t M) const;

 private:
  WindowSpec(WindowKind kind, std::vector<double> taper) : kind_(kind), taper_(std::move(taper)) {}

  WindowKind kind_;
  std::vector<double> taper_;
};

/// Segment length M, hop K and window. Requires 1 <= K <= M.
class SegmentationPlan {
 public:
  SegmentationPlan(std::size_t M, std::size_t K, WindowSpec window);

  static SegmentationPlan bartlett(std::size_t M) { return {M, M, WindowSpec::bartlett()}; }

  std::size_t length() const noexcept { return M_; }
  std::size_t hop() const noexcept { return K_; }
  const WindowSpec& window() const noexcept { return window_; }

  /// floor((N - M) / K) + 1, or 0 when N < M.
  std::size_t segment_count(std::size_t N) const noexcept;
  /// Samples covered by the first `k` segments: (k - 1) K + M.
  std::size_t samples_used(std::size_t k) const noexcept;
  /// floor((M - 1) / K) + 1: how many segments one sample can belong to.
  std::size_t overlap_factor() const noexcept { return (M_ - 1) / K_ + 1; }

 private:
  std::size_t M_;
  std::size_t K_;
  WindowSpec window_;
};

/// Strictly increasing frequencies in [-1/2, 1/2] (cycles per sample).
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<double> values);

  /// `count` evenly spaced points on [lo, hi], endpoints inclusive.
  static FrequencyGrid uniform(double lo, double hi, std::size_t count);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

 private:
  std::vector<double> values_;
};

/// M consecutive samples y[iK], ..., y[iK+M-1] (n x M).
struct Segment {
  Eigen::MatrixXd samples;
  std::size_t index = 0;

  std::size_t length() const noexcept { return static_cast<std::size_t>(samples.cols()); }
};

Segment extract_segment(const TimeSeries& series, const SegmentationPlan& plan, std::size_t i);

/// w_k(s) for k = 0..M-1; always a Euclidean unit vector.
ComplexVector window_weights(const WindowSpec& spec, std::size_t M, double s);

/// h(s) = sum_k w_k(s).
Complex window_sum_h(const WindowSpec& spec, std::size_t M, double s);

/// Segment sample mean (1/M) sum_k y[iK+k].
RealVector segment_mean(const Segment& seg);

/// sum_k w_k(s) y[iK+k].
ComplexVector segment_transform(const Segment& seg, const WindowSpec& spec, double s);

/// Symmetric Hann taper 0.5 (1 - cos(2 pi k / (M - 1))). Requires M >= 2.
std::vector<double> hann_vector(std::size_t M);

/// Window weights and h(s) for every grid frequency, computed once.
class WeightBank {
 public:
  WeightBank(const WindowSpec& spec, std::size_t M, const FrequencyGrid& grid);

  std::size_t size() const noexcept { return h_.size(); }
  const ComplexVector& weights(std::size_t f) const { return weights_[f]; }
  Complex h(std::size_t f) const { return h_[f]; }

 private:
  std::vector<ComplexVector> weights_;
  std::vector<Complex> h_;
};

}  // namespace specden
