#include "specden/markov.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace specden {

namespace {

constexpr double kStochasticTol = 1e-12;

void validate_transition(const Eigen::MatrixXd& P) {
  if (P.rows() < 1 || P.rows() != P.cols()) throw InvalidLengthError("transition matrix must be square and nonempty");
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      if (!(P(i, j) >= 0.0)) throw DomainError("transition probabilities must be nonnegative");
    }
    if (std::abs(P.row(i).sum() - 1.0) > kStochasticTol) {
      throw DomainError("row " + std::to_string(i) + " of the transition matrix does not sum to 1");
    }
  }
}

// Primitive iff some power up to (m-1)^2 + 1 is strictly positive.
bool is_primitive(const Eigen::MatrixXd& P) {
  const Eigen::Index m = P.rows();
  Eigen::MatrixXd pattern = (P.array() > 0.0).cast<double>().matrix();
  Eigen::MatrixXd power = pattern;
  const Eigen::Index limit = m * m;
  for (Eigen::Index e = 1; e <= limit; ++e) {
    if ((power.array() > 0.0).all()) return true;
    power = ((power * pattern).array() > 0.0).cast<double>().matrix();
  }
  return false;
}

}  // namespace

MarkovModel::MarkovModel(Eigen::MatrixXd P, Eigen::MatrixXd G) : P_(std::move(P)), G_(std::move(G)) {
  validate_transition(P_);
  if (G_.rows() != P_.rows() || G_.cols() < 1) {
    throw InvalidLengthError("observation map must have one row per state and at least one column");
  }
  if (!is_primitive(P_)) throw DegeneracyError("chain is not irreducible and aperiodic");
}

MarkovModel MarkovModel::identity_observed(Eigen::MatrixXd P) {
  const Eigen::Index m = P.rows();
  Eigen::MatrixXd G(m, 1);
  for (Eigen::Index x = 0; x < m; ++x) G(x, 0) = static_cast<double>(x);
  return MarkovModel(std::move(P), std::move(G));
}

MarkovModel MarkovModel::two_state_reference() {
  Eigen::MatrixXd P(2, 2);
  P << 0.3, 0.7, 0.5, 0.5;
  return identity_observed(std::move(P));
}

double MarkovModel::g_max() const {
  return G_.rowwise().norm().maxCoeff();
}

RealVector stationary_dist(const Eigen::MatrixXd& P) {
  validate_transition(P);
  const Eigen::Index m = P.rows();
  const Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(m, m);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-10);
  if (lu.rank() != m - 1) throw DegeneracyError("transition matrix has no unique stationary distribution");

  // Replace one balance equation with the normalization.
  Eigen::MatrixXd system = A;
  system.row(m - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(m - 1) = 1.0;
  RealVector pi = system.fullPivLu().solve(rhs);
  // One power-iteration polish tightens the residual to rounding level.
  pi = (pi.transpose() * P).transpose();
  pi /= pi.sum();
  return pi;
}

double doeblin_coefficient(const Eigen::MatrixXd& P) {
  validate_transition(P);
  return P.colwise().minCoeff().sum();
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  std::uint64_t z = master + trial + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::size_t draw(const double* cumulative, std::size_t m, double u) {
  for (std::size_t j = 0; j + 1 < m; ++j) {
    if (u < cumulative[j]) return j;
  }
  return m - 1;
}

}  // namespace

TimeSeries simulate(const MarkovModel& model, std::size_t N, std::uint64_t seed, const SimulateOptions& options) {
  if (N < 1) throw InsufficientDataError("simulation needs N >= 1");
  const std::size_t m = model.states();
  const RealVector pi = stationary_dist(model.transition());

  std::vector<double> start_cdf(m);
  std::vector<double> row_cdf(m * m);
  double acc = 0.0;
  for (std::size_t x = 0; x < m; ++x) start_cdf[x] = acc += pi[static_cast<Eigen::Index>(x)];
  for (std::size_t x = 0; x < m; ++x) {
    acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      row_cdf[x * m + j] = acc += model.transition()(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(j));
    }
  }

  std::mt19937_64 gen(seed);
  std::size_t state = draw(start_cdf.data(), m, uniform01(gen));
  for (std::size_t t = 0; t < options.burn_in; ++t) state = draw(&row_cdf[state * m], m, uniform01(gen));

  const Eigen::MatrixXd& G = model.observation();
  Eigen::MatrixXd out(G.cols(), static_cast<Eigen::Index>(N));
  for (std::size_t t = 0; t < N; ++t) {
    if (t > 0) state = draw(&row_cdf[state * m], m, uniform01(gen));
    out.col(static_cast<Eigen::Index>(t)) = G.row(static_cast<Eigen::Index>(state)).transpose();
  }
  return TimeSeries(std::move(out));
}

RealVector true_mean(const MarkovModel& model) {
  return model.observation().transpose() * stationary_dist(model.transition());
}

namespace {

struct ChainMoments {
  RealVector pi;
  Eigen::MatrixXd centered;  // m x n, rows g(x) - mu
};

ChainMoments chain_moments(const MarkovModel& model) {
  ChainMoments c;
  c.pi = stationary_dist(model.transition());
  const RealVector mu = model.observation().transpose() * c.pi;
  c.centered = model.observation().rowwise() - mu.transpose();
  return c;
}

}  // namespace

Eigen::MatrixXd autocovariance(const MarkovModel& model, long lag) {
  const ChainMoments c = chain_moments(model);
  const Eigen::Index m = static_cast<Eigen::Index>(model.states());
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
  const long steps = lag < 0 ? -lag : lag;
  for (long i = 0; i < steps; ++i) power = power * model.transition();
  // E[g~(x_{i+k}) g~(x_i)^T] = sum_{x,x'} pi(x) P^k(x,x') g~(x') g~(x)^T
  const Eigen::MatrixXd Rk = c.centered.transpose() * power.transpose() * c.pi.asDiagonal() * c.centered;
  return lag >= 0 ? Rk : Eigen::MatrixXd(Rk.transpose());
}

ComplexMatrix true_psd(const MarkovModel& model, double s) {
  const ChainMoments c = chain_moments(model);
  const Eigen::Index m = static_cast<Eigen::Index>(model.states());
  const Eigen::MatrixXd Pi = Eigen::VectorXd::Ones(m) * c.pi.transpose();
  const Eigen::MatrixXd D = model.transition() - Pi;  // D^k = P^k - 1 pi for k >= 1

  const Eigen::VectorXcd eig = D.eigenvalues();
  if (eig.cwiseAbs().maxCoeff() >= 1.0 - 1e-12) {
    throw DivergenceError("chain has an eigenvalue on the unit circle; the spectrum does not exist");
  }

  // sum_{k>=1} z^k D^k = z D (I - z D)^{-1}
  const Complex z = std::polar(1.0, -2.0 * std::numbers::pi * s);
  const ComplexMatrix Dc = D.cast<Complex>();
  const ComplexMatrix I = ComplexMatrix::Identity(m, m);
  const ComplexMatrix S = (z * Dc) * (I - z * Dc).inverse();

  const ComplexMatrix gc = c.centered.cast<Complex>();
  const ComplexMatrix piD = c.pi.cast<Complex>().asDiagonal();
  const ComplexMatrix R0 = gc.transpose() * piD * gc;
  // sum_{k>=1} z^k R[k] with R[k] = g~^T (D^k)^T diag(pi) g~
  const ComplexMatrix positive = gc.transpose() * S.transpose() * piD * gc;
  // R[-k] = R[k]^T, paired with conj(z)^k, contributes the conjugate transpose.
  return R0 + positive + positive.adjoint();
}

ComplexMatrix windowed_expectation(const MarkovModel& model, const SegmentationPlan& plan, double s) {
  const std::size_t M = plan.length();
  const ComplexVector w = window_weights(plan.window(), M, s);
  const auto n = static_cast<Eigen::Index>(model.dimension());

  std::vector<Eigen::MatrixXd> R(M);
  const ChainMoments c = chain_moments(model);
  const Eigen::Index m = static_cast<Eigen::Index>(model.states());
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
  for (std::size_t lag = 0; lag < M; ++lag) {
    R[lag] = c.centered.transpose() * power.transpose() * c.pi.asDiagonal() * c.centered;
    power = power * model.transition();
  }

  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < M; ++a) {
    for (std::size_t b = 0; b < M; ++b) {
      const Complex coeff = w[static_cast<Eigen::Index>(a)] * std::conj(w[static_cast<Eigen::Index>(b)]);
      if (a >= b) {
        out += coeff * R[a - b].cast<Complex>();
      } else {
        out += coeff * R[b - a].transpose().cast<Complex>();
      }
    }
  }
  return out;
}

}  // namespace specden
