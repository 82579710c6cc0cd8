// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "golden/golden_values.hpp"
#include "oracles.hpp"
#include "specden/harness.hpp"

using namespace specden;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int g_failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++g_failures;
  std::printf("[%s] %d. %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

constexpr double kExceedanceLimit = 0.10;
constexpr double kRuntimeLimitSeconds = 300.0;

struct ReproductionRun {
  std::vector<ErrorRecord> records;
  double seconds = 0.0;
};

ReproductionRun run_reproduction(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ReproductionRun run;
  run.records = run_experiment(config).records;
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

Outcome check_exceedance(const ReproductionRun& run, std::size_t trials) {
  std::map<std::pair<std::size_t, double>, std::size_t> exceed;
  std::map<std::pair<std::size_t, double>, std::size_t> total;
  double worst_ratio = 0.0;
  for (const auto& r : run.records) {
    if (r.k < 2) continue;
    const auto key = std::make_pair(r.k, r.s);
    ++total[key];
    if (r.empirical_error > r.highprob_threshold) ++exceed[key];
    worst_ratio = std::max(worst_ratio, r.empirical_error / r.highprob_threshold);
  }
  double worst_fraction = 0.0;
  for (const auto& [key, n] : total) {
    if (n != trials) return {false, "missing trials at a checkpoint"};
    worst_fraction = std::max(worst_fraction, static_cast<double>(exceed[key]) / static_cast<double>(n));
  }
  const bool pass = worst_fraction <= kExceedanceLimit && run.seconds < kRuntimeLimitSeconds && !total.empty();
  return {pass, fmt("worst exceedance fraction %.3f (limit 0.10), max error/threshold %.2e, runtime %.1fs (limit 300s)",
                    worst_fraction, worst_ratio, run.seconds)};
}

ExperimentConfig fig1a() {
  ExperimentConfig c;
  c.method = Method::bartlett;
  c.algorithm = Algorithm::online;
  c.M = 5;
  c.samples = 1'000'000;
  c.trials = 20;
  c.freqs = {0.0, 0.125, 0.25, 0.375};
  c.nu = 0.1;
  c.q = 1.0;
  c.seed = 1;
  c.threads = 1;
  return c;
}

ExperimentConfig fig1b() {
  ExperimentConfig c = fig1a();
  c.method = Method::welch;
  c.window = WindowChoice::hann;
  c.M = 16;
  c.K = 8;
  c.seed = 2;
  return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

int main() {
  const auto chain = MarkovModel::two_state_reference();
  const MixingProfile profile = markov_mixing_profile(chain.g_max(), kReferenceDoeblin);
  const double mu = 7.0 / 12.0;

  ReproductionRun bartlett_run;

  report(1, "Bartlett M=K=5 online reproduction, nu=0.1", [&] {
    bartlett_run = run_reproduction(fig1a());
    return check_exceedance(bartlett_run, 20);
  });

  report(2, "Welch Hann M=16 K=8 online reproduction, nu=0.1", [&] {
    return check_exceedance(run_reproduction(fig1b()), 20);
  });

  report(3, "decay rate of the Bartlett run in [-0.65, -0.35]", [&] {
    if (bartlett_run.records.empty()) return Outcome{false, "criterion 1 produced no records"};
    std::string detail;
    bool pass = true;
    for (double s : fig1a().freqs) {
      const double slope = fit_decay_rate(bartlett_run.records, s);
      pass = pass && slope >= -0.65 && slope <= -0.35;
      detail += fmt("s=%.3f slope=%.3f  ", s, slope);
    }
    return Outcome{pass, detail};
  });

  report(4, "mean-estimate error below the lemma 2 bound (1000 runs)", [&] {
    const auto plan = SegmentationPlan::bartlett(5);
    const FrequencyGrid grid({0.0});
    const std::vector<std::size_t> ks{1, 10, 100};
    std::vector<double> sq(ks.size(), 0.0);
    const std::size_t runs = 1000;
    for (std::size_t t = 0; t < runs; ++t) {
      const auto ts = simulate(chain, plan.samples_used(100), trial_seed(404, t));
      const auto snaps = online_run(ts, plan, grid, ks);
      for (std::size_t i = 0; i < ks.size(); ++i) sq[i] += std::pow(snaps[i].mean[0] - mu, 2) / runs;
    }
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double emp = std::sqrt(sq[i]);
      const double bound = lemma2_bound(profile, 5, 5, ks[i], 1.0);
      pass = pass && emp / bound < 1.0;
      detail += fmt("k=%.0f ratio=%.4f  ", static_cast<double>(ks[i]), emp / bound);
    }
    return Outcome{pass, detail};
  });

  report(5, "weighted-sum L2 norm below the theorem 1 bound (2000 runs)", [&] {
    // Zero-mean process y - mu: sup |g(x) - mu| bounds its moments, dependence is unchanged by centering.
    MixingStats centered = profile.at(2.0);
    centered.moment = std::max(mu, 1.0 - mu);
    bool pass = true;
    std::string detail;
    for (std::size_t M : {5, 16}) {
      for (double s : {0.0, 0.25}) {
        const auto w = window_weights(WindowSpec::bartlett(), M, s);
        double sq = 0.0;
        const std::size_t runs = 2000;
        for (std::size_t t = 0; t < runs; ++t) {
          const auto ts = simulate(chain, M, trial_seed(505 + M, t));
          Complex acc = 0.0;
          for (std::size_t k = 0; k < M; ++k) acc += w[static_cast<Eigen::Index>(k)] * (ts.samples()(0, static_cast<Eigen::Index>(k)) - mu);
          sq += std::norm(acc) / runs;
        }
        const double bound = theorem1_bound(centered, std::span<const Complex>(w.data(), w.size()));
        pass = pass && std::sqrt(sq) <= bound;
        detail += fmt("M=%.0f s=%.2f ratio=%.4f  ", static_cast<double>(M), s, std::sqrt(sq) / bound);
      }
    }
    return Outcome{pass, detail};
  });

  report(6, "batch and online match brute-force evaluation to 1e-12", [&] {
    double worst = 0.0;
    const oracle::Series six{{1}, {2}, {3}, {4}, {5}, {6}};
    const auto ts6 = TimeSeries::scalar({1, 2, 3, 4, 5, 6});
    const auto grid = FrequencyGrid::uniform(-0.5, 0.5, 9);
    const auto batch = batch_estimate(ts6, SegmentationPlan::bartlett(2), grid);
    for (std::size_t f = 0; f < grid.size(); ++f) {
      worst = std::max(worst, std::abs(batch.estimate.at(f)(0, 0) - oracle::batch(six, 2, 2, 3, oracle::ones(2), grid[f])[0][0]));
    }
    std::mt19937_64 gen(6);
    for (int t = 0; t < 10; ++t) {
      const auto rows = oracle::random_series(gen, 60, 2, 0.5);
      const auto ts = TimeSeries::from_rows(rows);
      const SegmentationPlan plan(6, 3, WindowSpec::welch(hann_vector(6)));
      const std::vector<std::size_t> cps{1, 2, 5, 11, 19};
      const auto snaps = online_run(ts, plan, grid, cps);
      for (std::size_t c = 0; c < cps.size(); ++c) {
        const auto rerun = online_run(ts, plan, grid, {cps[c]});
        for (std::size_t f = 0; f < grid.size(); ++f) {
          const auto want = oracle::online(rows, 6, 3, cps[c], hann_vector(6), grid[f]);
          for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
              worst = std::max(worst, std::abs(snaps[c].estimate.at(f)(i, j) - want[i][j]));
              worst = std::max(worst, std::abs(snaps[c].estimate.at(f)(i, j) - rerun[0].estimate.at(f)(i, j)));
            }
          }
        }
      }
    }
    return Outcome{worst <= 1e-12, fmt("max deviation %.2e (limit 1e-12)", worst)};
  });

  report(7, "algebraic invariants over 200 random instances", [&] {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<std::size_t> dim(1, 3), seglen(1, 10), count(1, 15);
    std::uniform_real_distribution<double> us(-0.5, 0.5), shift(-10.0, 10.0);
    std::normal_distribution<double> nd;
    double herm = 0.0, psd = 0.0, mean = 0.0, shifted = 0.0, welch = 0.0, conj = 0.0;
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = dim(gen), M = seglen(gen), k = count(gen);
      const std::size_t K = std::uniform_int_distribution<std::size_t>(1, M)(gen);
      const auto rows = oracle::random_series(gen, (k - 1) * K + M, n, shift(gen));
      const auto ts = TimeSeries::from_rows(rows);
      std::vector<double> taper(M);
      for (auto& v : taper) v = nd(gen);
      const SegmentationPlan plan(M, K, WindowSpec::welch(taper));
      const double s = std::abs(us(gen));
      const FrequencyGrid grid(s > 0.0 ? std::vector<double>{-s, s} : std::vector<double>{0.0});

      const auto b = batch_estimate(ts, plan, grid);
      const auto o = online_run(ts, plan, grid, {k});
      for (const auto* est : {&b.estimate, &o[0].estimate}) {
        for (const auto& m : est->matrices) {
          const double scale = 1.0 + m.norm();
          herm = std::max(herm, (m - m.adjoint()).cwiseAbs().maxCoeff() / scale);
          Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
          psd = std::max(psd, -es.eigenvalues().minCoeff() / scale);
        }
        if (grid.size() == 2) {
          conj = std::max(conj, (est->at(0) - est->at(1).conjugate()).cwiseAbs().maxCoeff());
        }
      }
      mean = std::max(mean, (o[0].mean - b.mean).cwiseAbs().maxCoeff());

      Eigen::MatrixXd moved = ts.samples();
      Eigen::VectorXd c(static_cast<Eigen::Index>(n));
      for (auto& v : c) v = shift(gen);
      moved.colwise() += c;
      const auto bm = batch_estimate(TimeSeries(moved), plan, grid);
      for (std::size_t f = 0; f < grid.size(); ++f) {
        shifted = std::max(shifted, (bm.estimate.at(f) - b.estimate.at(f)).cwiseAbs().maxCoeff());
      }

      const SegmentationPlan bart(M, K, WindowSpec::bartlett());
      const SegmentationPlan rect(M, K, WindowSpec::welch(std::vector<double>(M, 1.0)));
      const auto eb = batch_estimate(ts, bart, grid), er = batch_estimate(ts, rect, grid);
      for (std::size_t f = 0; f < grid.size(); ++f) {
        welch = std::max(welch, (eb.estimate.at(f) - er.estimate.at(f)).cwiseAbs().maxCoeff());
      }
    }
    const bool pass = herm <= 1e-12 && psd <= 1e-10 && mean <= 1e-12 && shifted <= 1e-10 && welch <= 1e-12 &&
                      conj <= 1e-12;
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "hermitian %.1e, psd %.1e, mean %.1e, shift %.1e, rect-welch %.1e, conj %.1e", herm, psd, mean,
                  shifted, welch, conj);
    return Outcome{pass, buf};
  });

  report(8, "analytic bias within the bias bound on 32 frequencies", [&] {
    const auto grid = FrequencyGrid::uniform(-0.5, 0.5, 32);
    const SegmentationPlan bart = SegmentationPlan::bartlett(5);
    const SegmentationPlan welch(16, 8, WindowSpec::welch(hann_vector(16)));
    const double bb = bias_bartlett(*profile.gamma2, chain.g_max(), 5);
    const double bw = bias_welch(*profile.gamma2, chain.g_max(), hann_vector(16));
    double worst_b = 0.0, worst_w = 0.0;
    for (double s : grid) {
      const auto phi = true_psd(chain, s);
      worst_b = std::max(worst_b, Eigen::JacobiSVD<ComplexMatrix>(phi - windowed_expectation(chain, bart, s)).singularValues()(0));
      worst_w = std::max(worst_w, Eigen::JacobiSVD<ComplexMatrix>(phi - windowed_expectation(chain, welch, s)).singularValues()(0));
    }
    return Outcome{worst_b <= bb && worst_w <= bw,
                   fmt("bartlett max bias %.4f <= %.4f; ", worst_b, bb) + fmt("welch max bias %.4f <= %.4f", worst_w, bw)};
  });

  report(9, "bound constants reproduce frozen golden values to 1e-12", [&] {
    double worst = 0.0;
    for (const auto& g : {golden::kBartlett5, golden::kWelch16}) {
      const auto c = lemma1_constants(profile, g.M, g.K, 1.0);
      worst = std::max({worst, rel(c.c1, g.c1), rel(c.c2, g.c2), rel(c.moment_outer, g.moment_outer),
                        rel(c.dependence_outer, g.dependence_outer),
                        rel(mean_error_constant(profile, g.M, g.K, 1.0), g.cq),
                        rel(online_coefficient(profile, g.M, g.K, 1.0), g.bq),
                        rel(theorem2_bound(profile, g.M, g.K, 100, 1.0), g.thm2_k100),
                        rel(theorem3_bound(profile, g.M, g.K, 1000, 1.0), g.thm3_k1000)});
    }
    for (const auto& t : golden::kThm4) worst = std::max(worst, rel(theorem4_threshold(t.f_k, t.r, t.nu), t.threshold));
    return Outcome{worst <= 1e-12, fmt("max relative deviation %.2e (limit 1e-12)", worst)};
  });

  std::printf("%s: %d criteria failed\n", g_failures == 0 ? "ACCEPTED" : "REJECTED", g_failures);
  return g_failures == 0 ? 0 : 1;
}
