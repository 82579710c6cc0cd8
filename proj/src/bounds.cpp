#include "specden/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace specden {

namespace {

void require_order(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw DomainError("moment order q must be >= 1, got " + std::to_string(q));
}

void require_stats(const MixingStats& s) {
  if (!(s.moment >= 0.0) || !(s.dependence >= 0.0)) throw DomainError("mixing statistics must be nonnegative");
}

double overlap_factor(std::size_t M, std::size_t K) {
  if (K < 1 || K > M) {
    throw InvalidPlanError("hop K=" + std::to_string(K) + " must satisfy 1 <= K <= M=" + std::to_string(M));
  }
  return static_cast<double>((M - 1) / K + 1);
}

constexpr double kRelativeCutoff = 1e-12;
constexpr std::size_t kMaxTerms = 50'000'000;

// sum_{tau >= from} gamma(tau)
double tail_sum(const GammaSequence& g, std::size_t from) {
  if (g.geometric_ratio) {
    const double rho = *g.geometric_ratio;
    if (!(rho >= 0.0 && rho < 1.0)) throw DivergenceError("geometric gamma ratio must lie in [0, 1)");
    return g.amplitude * std::pow(rho, static_cast<double>(from)) / (1.0 - rho);
  }
  double sum = 0.0;
  for (std::size_t tau = from; tau < from + kMaxTerms; ++tau) {
    const double term = g(tau);
    if (!(term >= 0.0) || !std::isfinite(term)) throw DivergenceError("gamma sequence must be finite and nonnegative");
    sum += term;
    if (term <= kRelativeCutoff * sum) return sum;
  }
  throw DivergenceError("gamma sequence tail did not converge within " + std::to_string(kMaxTerms) + " terms");
}

double gamma_at(const GammaSequence& g, std::size_t tau) {
  const double v = g(tau);
  if (!(v >= 0.0) || !std::isfinite(v)) throw DivergenceError("gamma sequence must be finite and nonnegative");
  return v;
}

}  // namespace

GammaSequence GammaSequence::geometric(double amplitude, double ratio) {
  GammaSequence g;
  g.amplitude = amplitude;
  g.geometric_ratio = ratio;
  g.at = [amplitude, ratio](std::size_t tau) { return amplitude * std::pow(ratio, static_cast<double>(tau)); };
  return g;
}

GammaSequence GammaSequence::generic(std::function<double(std::size_t)> at) {
  GammaSequence g;
  g.at = std::move(at);
  return g;
}

MixingStats MixingProfile::at(double order) const {
  return MixingStats{order, moment(order), dependence(order), gamma2};
}

MixingProfile MixingProfile::constant(double moment, double dependence) {
  return MixingProfile{[moment](double) { return moment; }, [dependence](double) { return dependence; }, std::nullopt};
}

double theorem1_bound(const MixingStats& stats_2q, std::span<const Complex> weights) {
  require_stats(stats_2q);
  const double q = stats_2q.order / 2.0;
  require_order(q);
  double energy = 0.0;
  for (const auto& w : weights) energy += std::norm(w);
  return 2.0 * std::sqrt(2.0 * (2.0 * q - 1.0) * stats_2q.moment * stats_2q.dependence * energy);
}

double c1_constant(const MixingStats& stats_2q) {
  require_stats(stats_2q);
  const double q = stats_2q.order / 2.0;
  require_order(q);
  return 4.0 * std::sqrt((2.0 * q - 1.0) * stats_2q.moment * stats_2q.dependence);
}

double c2_constant(const MixingStats& stats_2q, std::size_t M, std::size_t K) {
  const double F = overlap_factor(M, K);
  return 2.0 * F * c1_constant(stats_2q) + F * stats_2q.dependence;
}

Lemma1Constants lemma1_constants(const MixingStats& stats_2q, const MixingStats& stats_4q, std::size_t M,
                                 std::size_t K) {
  if (std::abs(stats_4q.order - 2.0 * stats_2q.order) > 1e-12) {
    throw DomainError("lemma 1 needs stats at orders 2q and 4q");
  }
  const double c1 = c1_constant(stats_2q);
  const double c2 = c2_constant(stats_2q, M, K);
  const double c1_next = c1_constant(stats_4q);
  const double c2_next = c2_constant(stats_4q, M, K);
  return Lemma1Constants{c1, c2, c1_next * c1_next, 6.0 * c1_next * c2_next};
}

Lemma1Constants lemma1_constants(const MixingProfile& profile, std::size_t M, std::size_t K, double q) {
  require_order(q);
  return lemma1_constants(profile.at(2.0 * q), profile.at(4.0 * q), M, K);
}

double mean_error_constant(const MixingProfile& profile, std::size_t M, std::size_t K, double q) {
  require_order(q);
  return c1_constant(profile.at(2.0 * q)) * overlap_factor(M, K);
}

double lemma2_bound(const MixingProfile& profile, std::size_t M, std::size_t K, std::size_t k, double q) {
  if (k < 1) throw DomainError("lemma 2 bound needs k >= 1");
  return mean_error_constant(profile, M, K, q) / std::sqrt(static_cast<double>(M) * static_cast<double>(k));
}

namespace {

struct OuterConstants {
  double c1_2q;
  double c2_2q;
  double c_2q;
  double leading;  // 4 sqrt(6 (2q-1) c1_2q^3 c2_2q)
};

OuterConstants outer_constants(const MixingProfile& profile, std::size_t M, std::size_t K, double q) {
  require_order(q);
  const MixingStats at4q = profile.at(4.0 * q);
  OuterConstants c{};
  c.c1_2q = c1_constant(at4q);
  c.c2_2q = c2_constant(at4q, M, K);
  c.c_2q = mean_error_constant(profile, M, K, 2.0 * q);
  c.leading = 4.0 * std::sqrt(6.0 * (2.0 * q - 1.0) * c.c1_2q * c.c1_2q * c.c1_2q * c.c2_2q);
  return c;
}

}  // namespace

double batch_coefficient(const MixingProfile& profile, std::size_t M, std::size_t K, double q) {
  const auto c = outer_constants(profile, M, K, q);
  return c.leading + 2.0 * c.c1_2q * c.c_2q + c.c_2q * c.c_2q;
}

double online_coefficient(const MixingProfile& profile, std::size_t M, std::size_t K, double q) {
  const auto c = outer_constants(profile, M, K, q);
  return c.leading + 6.0 * c.c1_2q * c.c_2q + 2.0 * c.c_2q * c.c_2q;
}

double online_transient_coefficient(const MixingProfile& profile, double q) {
  require_order(q);
  const MixingStats at4q = profile.at(4.0 * q);
  require_stats(at4q);
  return at4q.moment * at4q.moment + 2.0 * c1_constant(at4q) * at4q.moment;
}

double theorem2_bound(const MixingProfile& profile, std::size_t M, std::size_t K, std::size_t k, double q) {
  if (k < 1) throw DomainError("batch bound needs k >= 1");
  return batch_coefficient(profile, M, K, q) / std::sqrt(static_cast<double>(k));
}

double theorem3_bound(const MixingProfile& profile, std::size_t M, std::size_t K, std::size_t k, double q) {
  if (k < 2) throw DomainError("online bound needs k >= 2");
  const double kd = static_cast<double>(k);
  return online_coefficient(profile, M, K, q) / std::sqrt(kd) +
         online_transient_coefficient(profile, q) * static_cast<double>(M) / kd;
}

double highprob_multiplier(double r, double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("confidence nu must lie in (0, 1)");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("growth rate r must be positive");
  const double tail = std::pow(std::log(1.0 / nu) / r, r);
  return std::exp(r) * std::max(1.0, tail);
}

double theorem4_threshold(double f_k, double r, double nu) {
  if (!(f_k >= 0.0)) throw DomainError("f_k must be nonnegative");
  return f_k * highprob_multiplier(r, nu);
}

double bias_bartlett(const GammaSequence& gamma2, double moment, std::size_t M) {
  if (M < 1) throw InvalidLengthError("segment length must be positive");
  // Both signs of k contribute for k != 0; the k = 0 term carries weight |k| = 0.
  const double tail = 2.0 * tail_sum(gamma2, M);
  double weighted = 0.0;
  for (std::size_t k = 1; k < M; ++k) weighted += 2.0 * static_cast<double>(k) * gamma_at(gamma2, k);
  return 2.0 * moment * tail + 2.0 * moment / static_cast<double>(M) * weighted;
}

double bias_welch(const GammaSequence& gamma2, double moment, std::span<const double> v) {
  const std::size_t M = v.size();
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (M == 0 || !(norm2 > 0.0)) throw InvalidWindowError("welch window vector must be nonzero");

  const double tail = 2.0 * tail_sum(gamma2, M);
  double inner_total = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    double lag_product = 0.0;
    for (std::size_t i = k; i < M; ++i) lag_product += v[i - k] * v[i];
    const double multiplicity = k == 0 ? 1.0 : 2.0;
    inner_total += multiplicity * gamma_at(gamma2, k) * lag_product / norm2;
  }
  return 2.0 * moment * tail + 2.0 * moment * inner_total;
}

MixingProfile markov_mixing_profile(double g_max, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("Doeblin coefficient must lie in (0, 1]");
  if (!(g_max >= 0.0)) throw DomainError("g_max must be nonnegative");
  MixingProfile p;
  p.moment = [g_max](double) { return g_max; };
  p.dependence = [g_max, delta](double order) {
    return 4.0 * g_max / (1.0 - std::pow(1.0 - delta, 1.0 / order));
  };
  p.gamma2 = GammaSequence::geometric(4.0 * g_max, std::sqrt(1.0 - delta));
  return p;
}

MixingStats markov_mixing_stats(double g_max, double delta, double q) {
  require_order(q);
  return markov_mixing_profile(g_max, delta).at(4.0 * q);
}

double markov_dependence_loose(double g_max, double delta, double q) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("Doeblin coefficient must lie in (0, 1]");
  return 4.0 * g_max / delta * 4.0 * q;
}

int fit_growth_rate(const std::vector<std::function<double(double)>>& coefficients, int q_max) {
  for (int r = 1; r < 64; ++r) {
    bool ok = true;
    for (const auto& a : coefficients) {
      const double base = a(1.0);
      for (int q = 2; q <= q_max && ok; ++q) {
        const double qd = static_cast<double>(q);
        ok = a(qd) <= base * std::pow(qd, r) * (1.0 + 1e-12);
      }
      if (!ok) break;
    }
    if (ok) return r;
  }
  throw AnalysisError("no polynomial growth rate r < 64 envelopes the bound coefficients");
}

BoundReport bound_report(const MixingProfile& profile, std::size_t M, std::size_t K, double q, double nu,
                         bool online) {
  BoundReport rep;
  rep.q = q;
  rep.nu = nu;
  const auto l1 = lemma1_constants(profile, M, K, q);
  rep.c1q = l1.c1;
  rep.c2q = l1.c2;
  rep.moment_outer = l1.moment_outer;
  rep.dependence_outer = l1.dependence_outer;
  const MixingStats at4q = profile.at(4.0 * q);
  rep.c1_2q = c1_constant(at4q);
  rep.c2_2q = c2_constant(at4q, M, K);
  rep.cq = mean_error_constant(profile, M, K, q);
  rep.c_2q = mean_error_constant(profile, M, K, 2.0 * q);
  rep.batch_coefficient = batch_coefficient(profile, M, K, q);
  rep.bq = online_coefficient(profile, M, K, q);
  rep.transient_coefficient = online_transient_coefficient(profile, q);

  std::vector<std::function<double(double)>> growth;
  if (online) {
    rep.envelope_a1 = online_coefficient(profile, M, K, 1.0);
    rep.envelope_a2 = online_transient_coefficient(profile, 1.0);
    growth.push_back([&](double qq) { return online_coefficient(profile, M, K, qq); });
    growth.push_back([&](double qq) { return online_transient_coefficient(profile, qq); });
  } else {
    rep.envelope_a1 = batch_coefficient(profile, M, K, 1.0);
    rep.envelope_a2 = 0.0;
    growth.push_back([&](double qq) { return batch_coefficient(profile, M, K, qq); });
  }
  rep.r = fit_growth_rate(growth);
  rep.multiplier = highprob_multiplier(rep.r, nu);
  return rep;
}

double bound_envelope(const BoundReport& report, std::size_t M, std::size_t k) {
  if (k < 1) throw DomainError("envelope needs k >= 1");
  const double kd = static_cast<double>(k);
  return report.envelope_a1 / std::sqrt(kd) + report.envelope_a2 * static_cast<double>(M) / kd;
}

double expected_error_bound(const BoundReport& report, std::size_t M, std::size_t k, bool online) {
  if (k < 1) throw DomainError("bound needs k >= 1");
  const double kd = static_cast<double>(k);
  if (!online) return report.batch_coefficient / std::sqrt(kd);
  return report.bq / std::sqrt(kd) + report.transient_coefficient * static_cast<double>(M) / kd;
}

}  // namespace specden
