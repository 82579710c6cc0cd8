#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "specden/core.hpp"

using namespace specden;

namespace {

TimeSeries ramp(std::size_t N) {
  std::vector<double> v(N);
  for (std::size_t t = 0; t < N; ++t) v[t] = static_cast<double>(t);
  return TimeSeries::scalar(v);
}

}  // namespace

TEST_CASE("time series rejects ragged or empty input") {
  CHECK_THROWS_AS(TimeSeries::from_rows({}), InsufficientDataError);
  CHECK_THROWS_AS(TimeSeries::from_rows({{1.0, 2.0}, {3.0}}), InvalidLengthError);
  const auto ts = TimeSeries::from_rows({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  CHECK(ts.length() == 3);
  CHECK(ts.dimension() == 2);
  CHECK(ts.sample(2)[1] == 6.0);
}

TEST_CASE("segmentation plan enforces 1 <= K <= M") {
  CHECK_THROWS_AS(SegmentationPlan(4, 5, WindowSpec::bartlett()), InvalidPlanError);
  CHECK_THROWS_AS(SegmentationPlan(4, 0, WindowSpec::bartlett()), InvalidPlanError);
  CHECK_THROWS_AS(SegmentationPlan(4, 2, WindowSpec::welch({1.0, 1.0})), InvalidWindowError);
  const SegmentationPlan p(16, 8, WindowSpec::bartlett());
  CHECK(p.segment_count(16) == 1);
  CHECK(p.segment_count(15) == 0);
  CHECK(p.segment_count(40) == 4);
  CHECK(p.samples_used(4) == 40);
  CHECK(p.overlap_factor() == 2);
}

TEST_CASE("extract_segment") {
  SUBCASE("length 10, M=K=5, i=1 gives y[5..9]") {
    const auto seg = extract_segment(ramp(10), SegmentationPlan::bartlett(5), 1);
    REQUIRE(seg.length() == 5);
    for (int k = 0; k < 5; ++k) CHECK(seg.samples(0, k) == 5.0 + k);
  }
  SUBCASE("length 16, M=16, K=8") {
    const SegmentationPlan plan(16, 8, WindowSpec::welch(hann_vector(16)));
    const auto seg = extract_segment(ramp(16), plan, 0);
    for (int k = 0; k < 16; ++k) CHECK(seg.samples(0, k) == k);
    try {
      extract_segment(ramp(16), plan, 1);
      FAIL("expected range error");
    } catch (const RangeError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("index 1") != std::string::npos);
      CHECK(msg.find("maximum valid index is 0") != std::string::npos);
    }
  }
  SUBCASE("succeeds exactly for i in [0, floor((N-M)/K)]") {
    for (std::size_t N = 3; N < 30; ++N) {
      for (std::size_t M = 1; M <= 6; ++M) {
        for (std::size_t K = 1; K <= M; ++K) {
          const SegmentationPlan plan(M, K, WindowSpec::bartlett());
          const auto ts = ramp(N);
          const std::size_t last = N >= M ? (N - M) / K : 0;
          for (std::size_t i = 0; i <= last + 2; ++i) {
            const bool valid = N >= M && i <= last;
            if (valid) {
              CHECK_NOTHROW(extract_segment(ts, plan, i));
            } else {
              CHECK_THROWS_AS(extract_segment(ts, plan, i), RangeError);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("window_weights") {
  SUBCASE("Bartlett M=4, s=0") {
    const auto w = window_weights(WindowSpec::bartlett(), 4, 0.0);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(w[k] - Complex(0.5, 0.0)) < 1e-15);
  }
  SUBCASE("Bartlett M=2, s=1/2") {
    const auto w = window_weights(WindowSpec::bartlett(), 2, 0.5);
    CHECK(std::abs(w[0] - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(w[1] - Complex(-1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
  }
  SUBCASE("rectangular Welch reproduces Bartlett") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> us(-0.5, 0.5);
    for (std::size_t M = 1; M <= 33; M += 4) {
      const auto welch = WindowSpec::welch(std::vector<double>(M, 1.0));
      for (int t = 0; t < 16; ++t) {
        const double s = us(gen);
        const auto a = window_weights(WindowSpec::bartlett(), M, s);
        const auto b = window_weights(welch, M, s);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-15);
      }
    }
  }
  SUBCASE("zero window vector is rejected") {
    CHECK_THROWS_AS(WindowSpec::welch({0.0, 0.0, 0.0}), InvalidWindowError);
    CHECK_THROWS_AS(WindowSpec::welch({}), InvalidWindowError);
  }
  SUBCASE("unit norm for 128 random frequencies") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> us(-0.5, 0.5);
    std::normal_distribution<double> nd;
    std::vector<double> random_taper(13);
    for (auto& v : random_taper) v = nd(gen);
    const WindowSpec specs[] = {WindowSpec::bartlett(), WindowSpec::welch(hann_vector(13)),
                                WindowSpec::welch(random_taper)};
    for (const auto& spec : specs) {
      for (int t = 0; t < 128; ++t) {
        const double energy = window_weights(spec, 13, us(gen)).squaredNorm();
        CHECK(std::abs(energy - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("window_sum_h") {
  CHECK(std::abs(window_sum_h(WindowSpec::bartlett(), 9, 0.0) - Complex(3.0, 0.0)) < 1e-14);
  CHECK(std::abs(window_sum_h(WindowSpec::bartlett(), 2, 0.5)) < 1e-15);

  const auto v = hann_vector(16);
  double l1 = 0.0, l2 = 0.0;
  for (double x : v) {
    l1 += std::abs(x);
    l2 += x * x;
  }
  const Complex h = window_sum_h(WindowSpec::welch(v), 16, 0.0);
  CHECK(std::abs(h - Complex(l1 / std::sqrt(l2), 0.0)) < 1e-13);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> us(-0.5, 0.5);
  for (int t = 0; t < 64; ++t) {
    CHECK(std::abs(window_sum_h(WindowSpec::welch(v), 16, us(gen))) <= 4.0 + 1e-12);
  }
}

TEST_CASE("segment_mean") {
  const SegmentationPlan plan = SegmentationPlan::bartlett(5);
  const auto constant = TimeSeries::from_rows(std::vector<std::vector<double>>(5, {2.5, -1.0}));
  const auto m = segment_mean(extract_segment(constant, plan, 0));
  CHECK(m[0] == 2.5);
  CHECK(m[1] == -1.0);

  const auto two = segment_mean(extract_segment(TimeSeries::scalar({0.0, 1.0}), SegmentationPlan::bartlett(2), 0));
  CHECK(two[0] == 0.5);

  std::mt19937_64 gen(5);
  const auto rows = oracle::random_series(gen, 5, 3);
  const auto ts = TimeSeries::from_rows(rows);
  const auto got = segment_mean(extract_segment(ts, plan, 0));
  const auto want = oracle::seg_mean(rows, 0, 5);
  for (int d = 0; d < 3; ++d) CHECK(std::abs(got[d] - want[d]) <= 1e-14);
}

TEST_CASE("segment_transform") {
  const SegmentationPlan plan = SegmentationPlan::bartlett(6);
  const auto zero = TimeSeries::from_rows(std::vector<std::vector<double>>(6, {0.0, 0.0}));
  CHECK(segment_transform(extract_segment(zero, plan, 0), plan.window(), 0.3).cwiseAbs().maxCoeff() == 0.0);

  const auto constant = TimeSeries::scalar(std::vector<double>(6, 1.5));
  const auto c = segment_transform(extract_segment(constant, plan, 0), plan.window(), 0.0);
  CHECK(std::abs(c[0] - Complex(std::sqrt(6.0) * 1.5, 0.0)) < 1e-14);

  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = oracle::random_series(gen, 7, 2);
    const auto ts = TimeSeries::from_rows(rows);
    const auto taper = hann_vector(7);
    const SegmentationPlan welch(7, 3, WindowSpec::welch(taper));
    const auto seg = extract_segment(ts, welch, 0);
    const auto got = segment_transform(seg, welch.window(), 0.25);
    const auto want = oracle::transform(rows, 0, oracle::weights(taper, 0.25));
    for (int d = 0; d < 2; ++d) CHECK(std::abs(got[d] - want[d]) <= 1e-13);

    // Real input: the transform at -s is the conjugate of the transform at s.
    const auto neg = segment_transform(seg, welch.window(), -0.25);
    CHECK((neg - got.conjugate()).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("hann_vector") {
  CHECK_THROWS_AS(hann_vector(1), InvalidLengthError);
  const auto two = hann_vector(2);
  CHECK(two[0] == 0.0);
  CHECK(std::abs(two[1]) < 1e-15);
  CHECK_THROWS_AS(WindowSpec::welch(hann_vector(2)), InvalidWindowError);

  const auto three = hann_vector(3);
  CHECK(three[0] == 0.0);
  CHECK(three[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(three[2]) < 1e-15);

  const auto five = hann_vector(5);
  const double want[] = {0.0, 0.5, 1.0, 0.5, 0.0};
  for (int k = 0; k < 5; ++k) CHECK(std::abs(five[k] - want[k]) < 1e-15);
}

TEST_CASE("frequency grid validation") {
  CHECK_THROWS_AS(FrequencyGrid({0.1, 0.1}), RangeError);
  CHECK_THROWS_AS(FrequencyGrid({0.2, 0.1}), RangeError);
  CHECK_THROWS_AS(FrequencyGrid({0.6}), RangeError);
  const auto g = FrequencyGrid::uniform(-0.5, 0.5, 32);
  CHECK(g.size() == 32);
  CHECK(g[0] == -0.5);
  CHECK(g[31] == 0.5);
}
