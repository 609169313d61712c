#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include "frameext/fourier_ops.hpp"

namespace frameext {

/// Sorted singular values of A partitioned at eps and 1 - eps into the cluster
/// near one, the plunge region, and the cluster near zero.
struct SpectralProfile {
  Eigen::VectorXd sigma;  ///< descending
  double eps = 0.0;
  std::size_t ones_count = 0;    ///< |I_{1-eps}|: sigma >= 1 - eps
  std::size_t plunge_count = 0;  ///< eta: eps < sigma < 1 - eps
  std::size_t zeros_count = 0;   ///< |I_eps|: sigma <= eps
};

/// eta on the sigma scale, per the strict-inequality definition.
inline std::size_t plunge_count_sigma(const Eigen::VectorXd& sigma, double eps) {
  std::size_t eta = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > eps && sigma[i] < 1.0 - eps) ++eta;
  return eta;
}

/// eta on the lambda = sigma^2 scale: eps^2 < lambda < 1 - eps + eps^2.
inline std::size_t plunge_count_lambda(const Eigen::VectorXd& lambda, double eps) {
  std::size_t eta = 0;
  const double lo = eps * eps;
  const double hi = 1.0 - eps + eps * eps;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda[i] > lo && lambda[i] < hi) ++eta;
  return eta;
}

/// Dense SVD of A, partitioned at eps and 1 - eps.
inline SpectralProfile singular_profile(const FrameOperator& op, double eps,
                                        std::size_t entry_cap = dense_entry_cap) {
  const DenseMatrix a = materialize_A_dense(op, entry_cap);
  Eigen::BDCSVD<DenseMatrix> svd(a);
  SpectralProfile profile;
  profile.sigma = svd.singularValues();  // Eigen returns descending order
  profile.eps = eps;
  for (Eigen::Index i = 0; i < profile.sigma.size(); ++i) {
    const double s = profile.sigma[i];
    if (s >= 1.0 - eps)
      ++profile.ones_count;
    else if (s > eps)
      ++profile.plunge_count;
    else
      ++profile.zeros_count;
  }
  return profile;
}

/// tr(T_Omega B_Lambda T_Omega) = N_Omega * B(0) = N_Omega * N_Lambda / N_R,
/// in closed form.
inline double trace_tbt(const FrameOperator& op) {
  return static_cast<double>(op.rows()) * static_cast<double>(op.cols()) /
         static_cast<double>(op.spec().grid_point_count());
}

/// Sum of the eigenvalues of dense A A' (equals ||A||_F^2); the cross-check
/// route for trace_tbt.
inline double trace_tbt_dense(const FrameOperator& op,
                              std::size_t entry_cap = dense_entry_cap) {
  const DenseMatrix a = materialize_A_dense(op, entry_cap);
  return a.squaredNorm();
}

/// tr((T_Omega B_Lambda T_Omega)^2) via the Dirichlet kernel: the Frobenius
/// sum of |B(k - l)|^2 over I_Omega x I_Omega. O(N_Omega^2); odd n_lambda.
inline double trace_tbt_squared(const FrameOperator& op,
                                std::size_t entry_cap = dense_entry_cap) {
  const GridSpec& spec = op.spec();
  if (spec.n_lambda % 2 == 0)
    throw std::invalid_argument("trace_tbt_squared: kernel path requires odd n_lambda");
  detail::check_entry_cap(op.rows(), op.rows(), entry_cap, "trace_tbt_squared");
  std::vector<double> b(static_cast<std::size_t>(spec.n_r));
  for (int t = 0; t < spec.n_r; ++t) b[static_cast<std::size_t>(t)] = dirichlet_b(t, spec);
  const auto& samples = op.mask().samples;
  std::vector<MultiIndex> cells;
  cells.reserve(samples.size());
  for (std::size_t flat : samples) cells.push_back(unflatten(flat, spec));
  double sum = 0.0;
  for (std::size_t r = 0; r < cells.size(); ++r)
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double prod = 1.0;
      for (int d = 0; d < spec.dim; ++d) {
        int delta = (cells[r][static_cast<std::size_t>(d)] -
                     cells[c][static_cast<std::size_t>(d)]) %
                    spec.n_r;
        if (delta < 0) delta += spec.n_r;
        prod *= b[static_cast<std::size_t>(delta)];
      }
      sum += prod * prod;
    }
  return sum;
}

/// Sum of the squared eigenvalues of dense A A', computed as ||A' A||_F^2.
inline double trace_tbt_squared_dense(const FrameOperator& op,
                                      std::size_t entry_cap = dense_entry_cap) {
  const DenseMatrix a = materialize_A_dense(op, entry_cap);
  const DenseMatrix gram = a.adjoint() * a;
  return gram.squaredNorm();
}

/// Bounds on the edges of the plunge region implied by the measured traces:
/// with g = sum(lambda) - sum(lambda^2) and tau = eps^2, the first index below
/// 1 - tau exceeds sum(lambda) - g/tau and the last index above tau stays
/// below sum(lambda) + g/tau.
struct PlungeBoundReport {
  double trace_sum = 0.0;     ///< measured sum of lambda
  double trace_sq_sum = 0.0;  ///< measured sum of lambda^2
  double g = 0.0;
  double tau = 0.0;
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  double lower = 0.0;
  double upper = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
};

inline PlungeBoundReport plunge_bound_check(const FrameOperator& op, double eps,
                                            std::size_t entry_cap = dense_entry_cap) {
  const SpectralProfile profile = singular_profile(op, eps, entry_cap);
  PlungeBoundReport report;
  report.tau = eps * eps;
  const Eigen::Index n = profile.sigma.size();
  std::vector<double> lambda(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    // eigenvalues of the localization operator lie in [0, 1]; clip roundoff
    lambda[static_cast<std::size_t>(i)] =
        std::clamp(profile.sigma[i] * profile.sigma[i], 0.0, 1.0);
  }
  for (double l : lambda) {
    report.trace_sum += l;
    report.trace_sq_sum += l * l;
  }
  report.g = report.trace_sum - report.trace_sq_sum;
  std::size_t below = 0;  // count of lambda >= 1 - tau
  for (double l : lambda)
    if (l >= 1.0 - report.tau) ++below;
  report.k_min = below + 1;
  for (double l : lambda)
    if (l > report.tau) ++report.k_max;
  report.lower = report.trace_sum - report.g / report.tau;
  report.upper = report.trace_sum + report.g / report.tau;
  const double slack = 1e-9 * std::max(1.0, report.trace_sum);
  report.lower_ok = static_cast<double>(report.k_min) >= report.lower - slack;
  report.upper_ok = static_cast<double>(report.k_max) <= report.upper + slack;
  return report;
}

/// Periodic discrete prolate spheroidal sequences: eigenvectors of A'A on the
/// coefficient side and their restrictions A v_i on the sample side, sorted by
/// descending eigenvalue. Coefficient vectors are orthonormal in the full-grid
/// inner product; the Omega inner product of restrictions is lambda_i delta_ij.
struct ProlateSet {
  Eigen::VectorXd lambda;            ///< descending, length N_Lambda
  DenseMatrix coeff_vectors;         ///< N_Lambda x N_Lambda, orthonormal columns
  DenseMatrix sample_vectors;        ///< N_Omega x N_Lambda, column i = A v_i
  Eigen::VectorXd lambda_sample_side;  ///< descending eigenvalues of A A'
};

inline ProlateSet prolate_decomposition(const FrameOperator& op,
                                        std::size_t entry_cap = dense_entry_cap) {
  detail::check_entry_cap(op.rows(), op.rows(), entry_cap, "prolate_decomposition");
  const DenseMatrix a = materialize_A_dense(op, entry_cap);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> coeff_eig(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> sample_eig(a * a.adjoint());
  if (coeff_eig.info() != Eigen::Success || sample_eig.info() != Eigen::Success)
    throw Error("prolate_decomposition: eigensolver failed");

  ProlateSet set;
  set.lambda = coeff_eig.eigenvalues().reverse();
  set.coeff_vectors = coeff_eig.eigenvectors().rowwise().reverse();
  set.sample_vectors = a * set.coeff_vectors;
  set.lambda_sample_side = sample_eig.eigenvalues().reverse();
  return set;
}

/// Blockwise pairing of two descending spectra: sorted values agree entrywise
/// within tol over the shared prefix, and any surplus values are below tol.
inline bool eigenvalues_match(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              double tol = 1e-8) {
  const Eigen::Index shared = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < shared; ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  const Eigen::VectorXd& longer = (a.size() > b.size()) ? a : b;
  for (Eigen::Index i = shared; i < longer.size(); ++i)
    if (std::abs(longer[i]) > tol) return false;
  return true;
}

/// CSV rows (index, sigma), 1-based.
inline void write_profile_csv(std::ostream& out, const SpectralProfile& profile) {
  out << "index,sigma\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < profile.sigma.size(); ++i)
    out << (i + 1) << ',' << profile.sigma[i] << '\n';
}

}  // namespace frameext
