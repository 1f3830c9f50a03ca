#include "stkr/oracle.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "stkr/graph.hpp"  // ValidationError
#include "stkr/rng.hpp"

namespace stkr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// s applied to an empirical eigenvalue. Unlike eval_s this accepts negative
// inputs: the polynomial / rational form is evaluated as-is, which is what the
// implicit Gram-product solvers compute on an indefinite base Gram.
double eval_raw(const SpectralTransform& t, double lambda) {
  if (const auto* p = std::get_if<PolyTransform>(&t)) {
    double acc = 0.0;
    for (auto it = p->coeffs.rbegin(); it != p->coeffs.rend(); ++it) acc = (acc + *it) * lambda;
    return acc;
  }
  const auto& inv = std::get<InverseTransform>(t);
  if (lambda == 0.0) return 0.0;
  const double r = inv.rho(lambda);
  if (r == 0.0) throw ValidationError("rho(lambda) vanishes at an empirical eigenvalue");
  double num = 1.0;
  for (int k = 0; k < inv.r; ++k) num *= lambda;
  return num / r;
}

std::vector<std::int64_t> draw_indices(Rng& rng, std::int64_t count, std::int64_t space) {
  std::vector<std::int64_t> idx(count);
  for (auto& v : idx) v = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(space)));
  return idx;
}

}  // namespace

SyntheticKernel SyntheticKernel::random(std::int64_t N, VectorXd lambda, std::uint64_t seed) {
  const auto k = lambda.size();
  if (N < 1 || k < 1 || k > N) throw ValidationError("need 1 <= spectrum size <= N");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (lambda[i] < 0.0) throw ValidationError("eigenvalues must be nonnegative");
    if (i > 0 && lambda[i] > lambda[i - 1])
      throw ValidationError("eigenvalues must be nonincreasing");
  }

  Rng rng(seed);
  MatrixXd gauss(N, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (std::int64_t i = 0; i < N; ++i) gauss(i, j) = rng.next_gaussian();

  SyntheticKernel sk;
  sk.N = N;
  sk.lambda = std::move(lambda);
  sk.psi = MatrixXd(Eigen::HouseholderQR<MatrixXd>(gauss).householderQ() *
                    MatrixXd::Identity(N, k)) *
           std::sqrt(static_cast<double>(N));
  return sk;
}

MatrixXd SyntheticKernel::kernel_power(int p) const {
  if (p < 1) throw ValidationError("kernel power must be >= 1");
  VectorXd lp = lambda;
  for (int i = 1; i < p; ++i) lp.array() *= lambda.array();
  return psi * lp.asDiagonal() * psi.transpose();
}

double SyntheticKernel::kernel_entry(std::int64_t x, std::int64_t y) const {
  return (psi.row(x).array() * lambda.transpose().array() * psi.row(y).array()).sum();
}

double SyntheticKernel::kappa_sq() const {
  double best = 0.0;
  for (std::int64_t x = 0; x < N; ++x) best = std::max(best, kernel_entry(x, x));
  return best;
}

OracleFit dense_stkr_oracle(const MatrixXd& G, std::int64_t n, const SpectralTransform& t,
                            double beta_n, const MatrixXd& Y) {
  const auto size = G.rows();
  if (size > 2000) throw ValidationError("dense oracle is limited to 2000 samples");
  if (n < 1 || n > size || Y.rows() != n) throw ValidationError("bad labeled count");

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(G / static_cast<double>(size));
  if (eig.info() != Eigen::Success) throw ValidationError("oracle eigendecomposition failed");
  VectorXd s_vals(size);
  for (Eigen::Index i = 0; i < size; ++i) s_vals[i] = eval_raw(t, eig.eigenvalues()[i]);

  OracleFit fit;
  fit.Gs = static_cast<double>(size) * (eig.eigenvectors() * s_vals.asDiagonal() *
                                        eig.eigenvectors().transpose());
  const MatrixXd A = fit.Gs.topLeftCorner(n, n) +
                     static_cast<double>(n) * beta_n * MatrixXd::Identity(n, n);
  fit.alpha = Eigen::PartialPivLU<MatrixXd>(A).solve(Y);
  fit.scores = fit.Gs.leftCols(n) * fit.alpha;
  return fit;
}

std::vector<std::pair<std::int64_t, double>> approximation_decay(
    const SyntheticKernel& sk, const std::vector<std::int64_t>& sample_sizes, int p,
    int trials, std::uint64_t seed) {
  if (p < 2) throw ValidationError("approximation decay needs p >= 2");
  if (trials < 1) throw ValidationError("need at least one trial");
  for (auto s : sample_sizes)
    if (s < 1 || s > sk.N) throw ValidationError("sample sizes must lie in [1, N]");

  const MatrixXd exact_p = sk.kernel_power(p);
  const MatrixXd exact_1 = sk.kernel_power(1);
  const int num_queries = 10;
  const Rng master(seed);

  std::vector<std::pair<std::int64_t, double>> table;
  for (std::size_t si = 0; si < sample_sizes.size(); ++si) {
    const std::int64_t s = sample_sizes[si];
    double mean_dev = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      Rng rng = master.spawn(si * 1000003ULL + static_cast<std::uint64_t>(trial));
      const auto samples = draw_indices(rng, s, sk.N);
      const auto queries = draw_indices(rng, num_queries, sk.N);

      MatrixXd G(s, s);
      for (std::int64_t i = 0; i < s; ++i)
        for (std::int64_t j = 0; j < s; ++j) G(i, j) = exact_1(samples[i], samples[j]);

      double dev = 0.0;
      for (const auto q : queries) {
        VectorXd v(s);
        for (std::int64_t j = 0; j < s; ++j) v[j] = exact_1(q, samples[j]);
        // Khat^p(x, x_j) over all sample points j: G^{p-1} v / s^{p-1}.
        VectorXd est = v;
        for (int k = 1; k < p; ++k) est = (G * est) / static_cast<double>(s);
        for (std::int64_t j = 0; j < s; ++j)
          dev = std::max(dev, std::abs(est[j] - exact_p(q, samples[j])));
      }
      mean_dev += dev;
    }
    table.emplace_back(s, mean_dev / trials);
  }
  return table;
}

double eigenvalue_concentration(const SyntheticKernel& sk, std::int64_t sample_size,
                                int trials, double delta, std::uint64_t seed) {
  if (sample_size < 1 || sample_size > 2000)
    throw ValidationError("concentration check supports sample sizes in [1, 2000]");
  if (delta <= 0.0 || delta >= 1.0) throw ValidationError("delta must be in (0, 1)");
  if (trials < 1) throw ValidationError("need at least one trial");

  const MatrixXd exact_1 = sk.kernel_power(1);
  const double kappa2 = sk.kappa_sq();
  const double nm = static_cast<double>(sample_size);
  const double bound =
      sk.lambda[0] + kappa2 / std::sqrt(nm) *
                         (2.0 * std::sqrt(2.0) +
                          std::sqrt(19.0 * std::log(2.0 * (nm + 1.0) / delta)));

  const Rng master(seed);
  int passed = 0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = master.spawn(static_cast<std::uint64_t>(trial));
    const auto samples = draw_indices(rng, sample_size, sk.N);
    MatrixXd G(sample_size, sample_size);
    for (std::int64_t i = 0; i < sample_size; ++i)
      for (std::int64_t j = 0; j < sample_size; ++j) G(i, j) = exact_1(samples[i], samples[j]);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(G / nm);
    if (eig.eigenvalues()[sample_size - 1] <= bound) ++passed;
  }
  return static_cast<double>(passed) / trials;
}

double laplacian_identity_check(const MatrixXd& W, double eta, int trials,
                                std::uint64_t seed) {
  const auto N = W.rows();
  if (N < 1 || W.cols() != N) throw ValidationError("W must be square");
  if (!W.isApprox(W.transpose(), 1e-12)) throw ValidationError("W must be symmetric");
  if (trials < 1) throw ValidationError("need at least one trial");

  const VectorXd deg = W.rowwise().sum();
  for (Eigen::Index i = 0; i < N; ++i)
    if (deg[i] <= 0.0) throw ValidationError("all degrees must be positive");

  const VectorXd d_isqrt = deg.array().rsqrt();
  const MatrixXd S = d_isqrt.asDiagonal() * W * d_isqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S);
  const double lam_max = eig.eigenvalues()[N - 1];
  if (eig.eigenvalues()[0] < -1e-8 * std::max(lam_max, 1.0))
    throw ValidationError("W must be positive semidefinite");

  VectorXd sqrt_vals(N), pinv_vals(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double lam = std::max(eig.eigenvalues()[i], 0.0);
    sqrt_vals[i] = std::sqrt(lam);
    pinv_vals[i] = lam > 1e-12 * std::max(lam_max, 1.0) ? 1.0 / lam : 0.0;
  }
  const MatrixXd& U = eig.eigenvectors();
  const MatrixXd S_half = U * sqrt_vals.asDiagonal() * U.transpose();
  const MatrixXd L = MatrixXd::Identity(N, N) - eta * S;

  const double trace_d = deg.sum();
  const VectorXd p = deg / trace_d;                       // P_X(x_i)
  const MatrixXd G_K = trace_d * (deg.cwiseInverse().asDiagonal() * W *
                                  deg.cwiseInverse().asDiagonal());
  // A = P^{1/2} G_K P^{1/2}; the squared RKHS norm is g^T pinv(A) g.
  const MatrixXd A = p.array().sqrt().matrix().asDiagonal() * G_K *
                     p.array().sqrt().matrix().asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig_a(A);
  VectorXd a_pinv(N);
  const double a_max = eig_a.eigenvalues()[N - 1];
  for (Eigen::Index i = 0; i < N; ++i)
    a_pinv[i] = eig_a.eigenvalues()[i] > 1e-12 * std::max(a_max, 1.0)
                    ? 1.0 / eig_a.eigenvalues()[i]
                    : 0.0;

  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    VectorXd u(N);
    for (Eigen::Index i = 0; i < N; ++i) u[i] = rng.next_gaussian();
    const VectorXd y_hat = S_half * u;
    const VectorXd f = std::sqrt(trace_d) * d_isqrt.asDiagonal() * (S_half * y_hat);

    const double lhs = y_hat.dot(L * y_hat);
    const VectorXd g = p.array().sqrt().matrix().asDiagonal() * f;
    const VectorXd gt = eig_a.eigenvectors().transpose() * g;
    const double norm_hk = (gt.array().square() * a_pinv.array()).sum();
    const double norm_px = f.dot(p.asDiagonal() * f);
    const double rhs = norm_hk - eta * norm_px;

    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace stkr
