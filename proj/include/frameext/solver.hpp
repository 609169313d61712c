#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "frameext/fourier_ops.hpp"
#include "frameext/rng.hpp"
#include "frameext/topology.hpp"

namespace frameext {

struct SolverConfig {
  double eps = 1e-14;                     ///< cutoff for the regularizing truncation
  std::optional<int> rank_estimate;       ///< starting sketch rank; heuristic when unset
  int oversampling = 10;                  ///< extra sketch columns p
  bool adaptive = true;                   ///< double the sketch until the rank drop appears
  std::uint64_t rng_seed = 0;
  double rank_constant = 1.0;             ///< c in ceil(c * N_deltaOmega * ln n_r)
};

struct SolveReport {
  int rank_used = 0;
  double residual_norm = 0.0;
  double coefficient_norm = 0.0;
  double sketch_seconds = 0.0;
  double factor_seconds = 0.0;
  double correction_seconds = 0.0;
  double total_seconds = 0.0;
  bool adaptive_doubling = false;
};

namespace detail {

// ||P b|| at or below this fraction of ||b|| is FFT roundoff, not plunge
// content; the projected system is then empty and y = 0.
inline constexpr double plunge_negligible_rel = 1e-13;

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Starting rank for the plunge solve: ceil(c * N_deltaOmega * ln n_r),
/// clamped to [1, min(N_Omega, N_Lambda)]. The boundary count comes from the
/// L-infinity distance layers of the mask. 2D only.
inline int estimate_plunge_rank(const FrameOperator& op, double /*eps*/,
                                double c = 1.0) {
  if (op.spec().dim != 2)
    throw std::invalid_argument("estimate_plunge_rank: requires dim == 2");
  const LayerDecomposition layers = distance_layers(op.mask());
  const double raw = c * static_cast<double>(layers.boundary_count()) *
                     std::log(static_cast<double>(op.spec().n_r));
  const auto cap = static_cast<long>(std::min(op.rows(), op.cols()));
  const long est = static_cast<long>(std::ceil(raw));
  return static_cast<int>(std::clamp(est, 1L, cap));
}

namespace detail {

/// Randomized solve of P A y = P b restricted to the range of a seeded
/// Gaussian coefficient sketch. Columns are indexed by (seed, column, row), so
/// widening the sketch reuses previously drawn columns verbatim and results do
/// not depend on evaluation order. The sketch subspace is orthonormalized
/// through Omega = Q R before the truncated solve: the factored operator
/// P A Q = (P A Omega) R^{-1} carries the projected singular values exactly,
/// so the eps cutoff is not blurred by the conditioning of the Gaussian mix.
inline CoeffVector plunge_solve(const FrameOperator& op, const SampleVector& pb,
                                const SolverConfig& cfg, SolveReport& report,
                                FftWorkspace& ws) {
  const auto n_lambda = static_cast<Eigen::Index>(op.cols());
  const auto n_omega = static_cast<Eigen::Index>(op.rows());
  if (pb.size() != n_omega)
    throw std::invalid_argument("randomized_plunge_solve: sample length mismatch");
  if (pb.norm() == 0.0) {
    report.rank_used = 0;
    return CoeffVector::Zero(n_lambda);
  }

  const Eigen::Index max_width = std::min(n_omega, n_lambda);
  if (cfg.rank_estimate && *cfg.rank_estimate > max_width)
    throw SolverError("plunge rank estimate " + std::to_string(*cfg.rank_estimate) +
                      " exceeds min(N_omega, N_lambda) = " + std::to_string(max_width) +
                      "; mask and grid do not match the frame assumption");

  const int start_rank = cfg.rank_estimate
                             ? *cfg.rank_estimate
                             : estimate_plunge_rank(op, cfg.eps, cfg.rank_constant);
  Eigen::Index width =
      std::clamp<Eigen::Index>(static_cast<Eigen::Index>(start_rank) + cfg.oversampling,
                               1, max_width);

  const rng::Counter gen(cfg.rng_seed, /*stream=*/0);
  DenseMatrix omega(n_lambda, width);
  DenseMatrix sketch(n_omega, width);
  Eigen::Index built = 0;

  Eigen::BDCSVD<DenseMatrix> svd;
  Eigen::HouseholderQR<DenseMatrix> qr;
  while (true) {
    const auto t_sketch = std::chrono::steady_clock::now();
    for (; built < width; ++built) {
      for (Eigen::Index m = 0; m < n_lambda; ++m)
        omega(m, built) = gen.complex_gaussian(
            static_cast<std::uint64_t>(built) * static_cast<std::uint64_t>(n_lambda) +
            static_cast<std::uint64_t>(m));
      sketch.col(built) = apply_P(op, apply_A(op, omega.col(built), ws), ws);
    }
    report.sketch_seconds += seconds_since(t_sketch);

    const auto t_factor = std::chrono::steady_clock::now();
    qr.compute(omega.leftCols(width));
    DenseMatrix projected_op = sketch.leftCols(width);
    qr.matrixQR()
        .topRows(width)
        .triangularView<Eigen::Upper>()
        .template solveInPlace<Eigen::OnTheRight>(projected_op);
    svd.compute(projected_op, Eigen::ComputeThinU | Eigen::ComputeThinV);
    report.factor_seconds += seconds_since(t_factor);

    const auto& sv = svd.singularValues();
    const double s_max = sv(0);
    if (s_max == 0.0) {
      report.rank_used = 0;
      return CoeffVector::Zero(n_lambda);
    }
    const bool rank_found = sv(sv.size() - 1) / s_max <= cfg.eps;
    if (cfg.adaptive && !rank_found && width < max_width) {
      width = std::min<Eigen::Index>(2 * width, max_width);
      omega.conservativeResize(Eigen::NoChange, width);
      sketch.conservativeResize(Eigen::NoChange, width);
      report.adaptive_doubling = true;
      continue;
    }
    // Either the numerical rank drop is inside the sketch, or the sketch
    // already spans min(N_omega, N_lambda) and nothing more can be resolved.
    break;
  }

  const auto& sv = svd.singularValues();
  Eigen::Index keep = 0;
  while (keep < sv.size() && sv(keep) >= cfg.eps * sv(0)) ++keep;
  report.rank_used = static_cast<int>(keep);

  const Eigen::VectorXcd projected = svd.matrixU().leftCols(keep).adjoint() * pb;
  const Eigen::VectorXcd scaled =
      projected.cwiseQuotient(sv.head(keep).cast<std::complex<double>>());
  // y = Q t with Q from omega = Q R; the thin Q is never formed, apply the
  // Householder factors to the padded coefficient vector instead
  Eigen::VectorXcd t = svd.matrixV().leftCols(keep) * scaled;
  Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(n_lambda);
  padded.head(width) = t;
  return qr.householderQ() * padded;
}

}  // namespace detail

/// Solve P A y = P b on the numerical range of P A through a seeded Gaussian
/// sketch, truncating singular values below eps * sigma_max. Identical seeds
/// and configs give bit-identical results.
inline CoeffVector randomized_plunge_solve(const FrameOperator& op, const SampleVector& pb,
                                           const SolverConfig& cfg,
                                           SolveReport* report = nullptr) {
  SolveReport local;
  FftWorkspace ws = op.make_workspace();
  CoeffVector y = detail::plunge_solve(op, pb, cfg, local, ws);
  if (report) *report = local;
  return y;
}

/// Plunge projection algorithm: solve P A y = P b for the boundary-coupled
/// part, then correct with z = A'(b - A y) for the well-conditioned interior;
/// x = y + z.
inline std::pair<CoeffVector, SolveReport> solve_algorithm1(const FrameOperator& op,
                                                            const SampleVector& b,
                                                            const SolverConfig& cfg) {
  if (static_cast<std::size_t>(b.size()) != op.rows())
    throw std::invalid_argument("solve_algorithm1: sample length mismatch");
  SolveReport report;
  const auto t0 = std::chrono::steady_clock::now();
  FftWorkspace ws = op.make_workspace();

  const double b_norm = b.norm();
  CoeffVector y;
  if (b_norm == 0.0) {
    y = CoeffVector::Zero(static_cast<Eigen::Index>(op.cols()));
  } else {
    const SampleVector pb = apply_P(op, b, ws);
    if (pb.norm() <= detail::plunge_negligible_rel * b_norm)
      y = CoeffVector::Zero(static_cast<Eigen::Index>(op.cols()));
    else
      y = detail::plunge_solve(op, pb, cfg, report, ws);
  }

  const auto t_corr = std::chrono::steady_clock::now();
  const SampleVector residual_after_y = b - apply_A(op, y, ws);
  const CoeffVector z = apply_A_adjoint(op, residual_after_y, ws);
  CoeffVector x = y + z;
  report.correction_seconds = detail::seconds_since(t_corr);

  report.residual_norm = (apply_A(op, x, ws) - b).norm();
  report.coefficient_norm = x.norm();
  report.total_seconds = detail::seconds_since(t0);
  return {std::move(x), report};
}

/// Dense regularized-SVD reference solve: x = sum_i sigma_i^{-1} v_i (u_i' b)
/// over sigma_i >= eps * sigma_max.
inline std::pair<CoeffVector, SolveReport> solve_dense_tsvd(
    const FrameOperator& op, const SampleVector& b, double eps,
    std::size_t entry_cap = dense_entry_cap) {
  if (static_cast<std::size_t>(b.size()) != op.rows())
    throw std::invalid_argument("solve_dense_tsvd: sample length mismatch");
  SolveReport report;
  const auto t0 = std::chrono::steady_clock::now();
  const DenseMatrix a = materialize_A_dense(op, entry_cap);

  const auto t_factor = std::chrono::steady_clock::now();
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  report.factor_seconds = detail::seconds_since(t_factor);

  const auto& sv = svd.singularValues();
  Eigen::Index keep = 0;
  if (sv.size() > 0 && sv(0) > 0.0)
    while (keep < sv.size() && sv(keep) >= eps * sv(0)) ++keep;
  report.rank_used = static_cast<int>(keep);

  CoeffVector x = CoeffVector::Zero(a.cols());
  if (keep > 0) {
    const Eigen::VectorXcd projected = svd.matrixU().leftCols(keep).adjoint() * b;
    x = svd.matrixV().leftCols(keep) *
        projected.cwiseQuotient(sv.head(keep).cast<std::complex<double>>());
  }
  report.residual_norm = (a * x - b).norm();
  report.coefficient_norm = x.norm();
  report.total_seconds = detail::seconds_since(t0);
  return {std::move(x), report};
}

/// Direct summation sum_l c_l exp(2*pi*i*(l . u)) in unit-box coordinates
/// u = (x + T)/(2T). At grid points of P_Omega this equals sqrt(N_R) * (A c).
inline std::vector<std::complex<double>> evaluate_series(
    const GridSpec& spec, const CoeffVector& c,
    const std::vector<std::vector<double>>& points) {
  if (static_cast<std::size_t>(c.size()) != spec.freq_count())
    throw std::invalid_argument("evaluate_series: coefficient length mismatch");
  const auto [lo, hi] = freq_range_1d(spec.n_lambda);
  const FreqWindow window = build_freq_window(spec);
  std::vector<std::complex<double>> values;
  values.reserve(points.size());
  std::vector<std::vector<std::complex<double>>> phases(
      static_cast<std::size_t>(spec.dim),
      std::vector<std::complex<double>>(static_cast<std::size_t>(spec.n_lambda)));
  for (const auto& x : points) {
    if (static_cast<int>(x.size()) != spec.dim)
      throw std::invalid_argument("evaluate_series: point dimension mismatch");
    for (int d = 0; d < spec.dim; ++d) {
      const double xd = x[static_cast<std::size_t>(d)];
      if (std::abs(xd) > spec.half_width * (1.0 + 1e-12))
        throw std::invalid_argument("evaluate_series: point outside the bounding box");
      const double u = (xd + spec.half_width) / (2.0 * spec.half_width);
      for (int l = lo; l <= hi; ++l)
        phases[static_cast<std::size_t>(d)][static_cast<std::size_t>(l - lo)] =
            std::polar(1.0, 2.0 * std::numbers::pi * l * u);
    }
    std::complex<double> sum = 0.0;
    for (std::size_t j = 0; j < window.indices.size(); ++j) {
      std::complex<double> term = c[static_cast<Eigen::Index>(j)];
      for (int d = 0; d < spec.dim; ++d)
        term *= phases[static_cast<std::size_t>(d)][static_cast<std::size_t>(
            window.indices[j][static_cast<std::size_t>(d)] - lo)];
      sum += term;
    }
    values.push_back(sum);
  }
  return values;
}

struct ErrorMetrics {
  double residual = 0.0;       ///< ||A c - b||_2 with b = f on P_Omega
  double max_pointwise = 0.0;  ///< max |F - f| over random interior samples
};

/// Residual on the collocation points plus the maximum pointwise error over
/// n_samples rejection-sampled interior points. The interior test uses the
/// continuous predicate when given, otherwise membership of the nearest grid
/// cell. 2D only.
inline ErrorMetrics error_metrics(const FrameOperator& op, const CoeffVector& c,
                                  const std::function<double(double, double)>& f,
                                  int n_samples, std::uint64_t seed,
                                  const DomainSpec* domain = nullptr) {
  const GridSpec& spec = op.spec();
  if (spec.dim != 2) throw std::invalid_argument("error_metrics: requires dim == 2");

  SampleVector b(static_cast<Eigen::Index>(op.rows()));
  const auto& samples = op.mask().samples;
  std::vector<double> xs(samples.size()), ys(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto coord = physical_coordinate(unflatten(samples[k], spec), spec);
    xs[k] = coord[0];
    ys[k] = coord[1];
    b[static_cast<Eigen::Index>(k)] = f(coord[0], coord[1]);
  }
  ErrorMetrics metrics;
  metrics.residual = (apply_A(op, c) - b).norm();

  auto inside = [&](double x, double y) -> bool {
    if (domain && domain->has_predicate()) return domain->contains(x, y);
    const double h = spec.cell_size();
    const int i = static_cast<int>(std::lround((x + spec.half_width) / h));
    const int j = static_cast<int>(std::lround((y + spec.half_width) / h));
    if (i < 0 || j < 0 || i >= spec.n_r || j >= spec.n_r) return false;
    return op.mask().inside[static_cast<std::size_t>(i) * spec.n_r + j] != 0;
  };

  const rng::Counter gen(seed, /*stream=*/1);
  std::vector<std::vector<double>> points;
  points.reserve(static_cast<std::size_t>(n_samples));
  std::uint64_t attempt = 0;
  const std::uint64_t max_attempts = 2000ULL * static_cast<std::uint64_t>(n_samples) + 1000;
  while (points.size() < static_cast<std::size_t>(n_samples)) {
    if (attempt >= max_attempts)
      throw Error("error_metrics: rejection sampling failed to find interior points");
    const double x = -spec.half_width + 2.0 * spec.half_width * gen.uniform(2 * attempt);
    const double y = -spec.half_width + 2.0 * spec.half_width * gen.uniform(2 * attempt + 1);
    ++attempt;
    if (inside(x, y)) points.push_back({x, y});
  }
  // evaluate_series sums the raw basis; the approximant of f carries the
  // operator's 1/sqrt(N_R) normalization
  const auto series = evaluate_series(spec, c, points);
  const double scale = op.normalization();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double err = std::abs(scale * series[i] - f(points[i][0], points[i][1]));
    metrics.max_pointwise = std::max(metrics.max_pointwise, err);
  }
  return metrics;
}

}  // namespace frameext
