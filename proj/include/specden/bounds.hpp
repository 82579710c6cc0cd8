#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "specden/core.hpp"

namespace specden {

/// Bound on the order-2 dependence coefficients gamma_2(tau, y), tau >= 0.
///
/// When `geometric_ratio` is set the sequence is amplitude * ratio^tau and
/// infinite sums are taken in closed form; otherwise `at` is summed until the
/// terms fall below 1e-12 of the partial sum.
struct GammaSequence {
  std::function<double(std::size_t)> at;
  std::optional<double> geometric_ratio;
  double amplitude = 0.0;

  static GammaSequence geometric(double amplitude, double ratio);
  static GammaSequence generic(std::function<double(std::size_t)> at);

  double operator()(std::size_t tau) const { return at(tau); }
};

/// Mixing statistics of y at one moment order p:
/// `moment` bounds M_p(y), `dependence` bounds Gamma_{d,p}(y).
struct MixingStats {
  double order = 2.0;
  double moment = 0.0;
  double dependence = 0.0;
  std::optional<GammaSequence> gamma2;
};

/// Mixing statistics available at every order. Bound formulas pull the
/// orders they need from here, so callers only ever pass the base q.
struct MixingProfile {
  std::function<double(double)> moment;
  std::function<double(double)> dependence;
  std::optional<GammaSequence> gamma2;

  MixingStats at(double order) const;

  /// Same M_p and Gamma_{d,p} at every order.
  static MixingProfile constant(double moment, double dependence);
};

/// Bound on ||sum_k w_k y_k||_{L_2q} for zero-mean y, given stats at order 2q.
double theorem1_bound(const MixingStats& stats_2q, std::span<const Complex> weights);

struct Lemma1Constants {
  double c1;                 ///< bound on M_{2q}(y~)
  double c2;                 ///< bound on Gamma_{d,2q}(y~)
  double moment_outer;       ///< bound on M_{2q}(y~ y~^*) = c1(2q)^2
  double dependence_outer;   ///< bound on Gamma_{d,2q}(y~ y~^*) = 6 c1(2q) c2(2q)
};

/// c1 = 4 sqrt((2q-1) M_2q Gamma_2q); c2 = F (2 c1 + Gamma_2q), F = floor((M-1)/K) + 1.
/// The outer-product entries use the same formulas at order 2q, i.e. stats at 4q.
Lemma1Constants lemma1_constants(const MixingStats& stats_2q, const MixingStats& stats_4q, std::size_t M,
                                 std::size_t K);
Lemma1Constants lemma1_constants(const MixingProfile& profile, std::size_t M, std::size_t K, double q);

/// c_{1,q} alone; needs stats at order 2q.
double c1_constant(const MixingStats& stats_2q);
/// c_{2,q}; needs stats at order 2q.
double c2_constant(const MixingStats& stats_2q, std::size_t M, std::size_t K);

/// Mean-estimate constant c_q = c_{1,q} F.
double mean_error_constant(const MixingProfile& profile, std::size_t M, std::size_t K, double q);

/// c_q / sqrt(M k): bound on ||mu_hat_k - mu||_{L_2q}.
double lemma2_bound(const MixingProfile& profile, std::size_t M, std::size_t K, std::size_t k, double q);

/// Batch-estimator coefficient multiplying 1/sqrt(k).
double batch_coefficient(const MixingProfile& profile, std::size_t M, std::size_t K, double q);
/// b_q of the online estimator.
double online_coefficient(const MixingProfile& profile, std::size_t M, std::size_t K, double q);
/// M_{4q}^2 + 2 c_{1,2q} M_{4q}: online coefficient multiplying M/k.
double online_transient_coefficient(const MixingProfile& profile, double q);

/// Batch bound on ||Phi_hat_k(s) - Phi_bar(s)||_{L_q}. Requires k >= 1.
double theorem2_bound(const MixingProfile& profile, std::size_t M, std::size_t K, std::size_t k, double q);
/// Online bound on ||Phi_hat_k(s) - Phi_bar(s)||_{L_q}. Requires k >= 2.
double theorem3_bound(const MixingProfile& profile, std::size_t M, std::size_t K, std::size_t k, double q);

/// max{1, (ln 1/nu)^r / r^r} e^r: multiplier applied to f_k.
double highprob_multiplier(double r, double nu);
/// f_k e^r max{1, (ln 1/nu)^r / r^r}; the error exceeds it with probability <= nu.
double theorem4_threshold(double f_k, double r, double nu);

/// Proposition-style bias bound for the uniform 1/sqrt(M) window.
double bias_bartlett(const GammaSequence& gamma2, double moment, std::size_t M);
/// Bias bound for a Welch taper v (length M).
double bias_welch(const GammaSequence& gamma2, double moment, std::span<const double> v);

/// Stats for an observation of a Doeblin-minorized chain with ||g|| <= g_max.
///
/// M_p <= g_max and Gamma_{d,p} <= 4 g_max / (1 - (1-delta)^{1/p}) for every p;
/// gamma_2(tau) <= 4 g_max (1-delta)^{tau/2}.
MixingProfile markov_mixing_profile(double g_max, double delta);
/// The profile evaluated at order 4q.
MixingStats markov_mixing_stats(double g_max, double delta, double q);
/// The looser closed form (4 g_max / delta) 4q of Gamma_{d,4q}.
double markov_dependence_loose(double g_max, double delta, double q);

/// Smallest integer r >= 1 with a(q) <= a(1) q^r for q = 1..q_max and every
/// coefficient function a in `coefficients`.
int fit_growth_rate(const std::vector<std::function<double(double)>>& coefficients, int q_max = 8);

/// Every constant the harness reports, at base order q.
struct BoundReport {
  double q = 1.0;
  double c1q = 0.0;
  double c2q = 0.0;
  double c1_2q = 0.0;
  double c2_2q = 0.0;
  double moment_outer = 0.0;
  double dependence_outer = 0.0;
  double cq = 0.0;
  double c_2q = 0.0;
  double batch_coefficient = 0.0;
  double bq = 0.0;
  double transient_coefficient = 0.0;
  /// Envelope f_k = envelope_a1 / sqrt(k) + envelope_a2 M / k, taken at q = 1.
  double envelope_a1 = 0.0;
  double envelope_a2 = 0.0;
  int r = 1;
  double nu = 0.1;
  double multiplier = 0.0;
};

BoundReport bound_report(const MixingProfile& profile, std::size_t M, std::size_t K, double q, double nu,
                         bool online);

/// f_k: envelope_a1 / sqrt(k) + envelope_a2 M / k (a2 is zero for batch).
double bound_envelope(const BoundReport& report, std::size_t M, std::size_t k);
/// The theorem bound at the report's q, without the k >= 2 guard (k >= 1).
double expected_error_bound(const BoundReport& report, std::size_t M, std::size_t k, bool online);

}  // namespace specden
