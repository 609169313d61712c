#pragma once

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "frameext/domain.hpp"
#include "frameext/errors.hpp"
#include "frameext/grid.hpp"

namespace frameext {

using CoeffVector = Eigen::VectorXcd;   ///< indexed by FreqWindow order, length N_Lambda
using SampleVector = Eigen::VectorXcd;  ///< indexed by DomainMask::samples order, length N_Omega
using DenseMatrix = Eigen::MatrixXcd;

/// Default cap on dense materializations, in matrix entries.
inline constexpr std::size_t dense_entry_cap = std::size_t{1} << 24;

namespace detail {

// FFTW's planner is not thread-safe; executes on distinct plans are.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace detail

/// Scratch buffer of length N_R plus FFTW plans. One workspace per thread;
/// repeated applies allocate nothing. Copying makes an independent clone.
class FftWorkspace {
 public:
  explicit FftWorkspace(const GridSpec& spec) : spec_(spec) {
    const std::size_t n = spec.grid_point_count();
    buffer_.reset(static_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n)));
    if (!buffer_) throw std::bad_alloc();
    std::vector<int> dims(static_cast<std::size_t>(spec.dim), spec.n_r);
    auto* raw = reinterpret_cast<fftw_complex*>(buffer_.get());
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_dft(spec.dim, dims.data(), raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(spec.dim, dims.data(), raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw Error("FftWorkspace: FFTW planning failed");
  }

  FftWorkspace(const FftWorkspace& other) : FftWorkspace(other.spec_) {}
  FftWorkspace& operator=(const FftWorkspace&) = delete;

  FftWorkspace(FftWorkspace&& other) noexcept
      : spec_(other.spec_),
        buffer_(std::move(other.buffer_)),
        forward_(other.forward_),
        backward_(other.backward_) {
    other.forward_ = nullptr;
    other.backward_ = nullptr;
  }
  FftWorkspace& operator=(FftWorkspace&&) = delete;

  ~FftWorkspace() {
    if (!forward_ && !backward_) return;
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
  }

  std::complex<double>* data() { return buffer_.get(); }
  std::size_t size() const { return spec_.grid_point_count(); }

  void zero() { std::fill(buffer_.get(), buffer_.get() + size(), std::complex<double>{}); }
  /// Unnormalized transform with kernel exp(-2*pi*i*k*l/n).
  void forward() { fftw_execute(forward_); }
  /// Unnormalized transform with kernel exp(+2*pi*i*k*l/n).
  void backward() { fftw_execute(backward_); }

 private:
  GridSpec spec_;
  std::unique_ptr<std::complex<double>, detail::FftwDeleter> buffer_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// The collocation operator A with entries phi_j(x_k) / sqrt(N_R): an
/// N_Omega x N_Lambda subblock of the unitary multidimensional DFT matrix.
/// A and its adjoint act matrix-free through zero extension, an FFT between
/// the full grids, and restriction. Instances are immutable; the convenience
/// overloads without an explicit workspace share one internal scratch context
/// and are not safe for concurrent use.
class FrameOperator {
 public:
  explicit FrameOperator(DomainMask mask)
      : spec_(mask.spec), mask_(std::move(mask)), window_(build_freq_window(spec_)) {
    freq_positions_.reserve(window_.size());
    for (const MultiIndex& l : window_.indices)
      freq_positions_.push_back(freq_grid_position(l, spec_));
    scale_ = 1.0 / std::sqrt(static_cast<double>(spec_.grid_point_count()));
  }

  const GridSpec& spec() const { return spec_; }
  const DomainMask& mask() const { return mask_; }
  const FreqWindow& window() const { return window_; }
  const std::vector<std::size_t>& freq_positions() const { return freq_positions_; }

  std::size_t rows() const { return mask_.samples.size(); }  ///< N_Omega
  std::size_t cols() const { return window_.size(); }        ///< N_Lambda
  double normalization() const { return scale_; }            ///< 1 / sqrt(N_R)

  FftWorkspace make_workspace() const { return FftWorkspace(spec_); }

 private:
  friend FftWorkspace& internal_workspace(const FrameOperator&);

  GridSpec spec_;
  DomainMask mask_;
  FreqWindow window_;
  std::vector<std::size_t> freq_positions_;
  double scale_ = 1.0;
  mutable std::unique_ptr<FftWorkspace> shared_workspace_;
};

inline FftWorkspace& internal_workspace(const FrameOperator& op) {
  if (!op.shared_workspace_)
    op.shared_workspace_ = std::make_unique<FftWorkspace>(op.spec());
  return *op.shared_workspace_;
}

/// A c: extend coefficients by zeros to the full frequency grid, backward
/// transform, restrict to P_Omega. O(N_R log N_R).
inline SampleVector apply_A(const FrameOperator& op, const CoeffVector& c,
                            FftWorkspace& ws) {
  if (static_cast<std::size_t>(c.size()) != op.cols())
    throw std::invalid_argument("apply_A: coefficient length mismatch");
  ws.zero();
  auto* buf = ws.data();
  const auto& pos = op.freq_positions();
  for (std::size_t j = 0; j < pos.size(); ++j) buf[pos[j]] = c[static_cast<Eigen::Index>(j)];
  ws.backward();
  const auto& samples = op.mask().samples;
  SampleVector out(static_cast<Eigen::Index>(samples.size()));
  const double s = op.normalization();
  for (std::size_t k = 0; k < samples.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = s * buf[samples[k]];
  return out;
}

inline SampleVector apply_A(const FrameOperator& op, const CoeffVector& c) {
  return apply_A(op, c, internal_workspace(op));
}

/// A' s: extend samples by zeros to the full spatial grid, forward transform,
/// restrict to P_Lambda.
inline CoeffVector apply_A_adjoint(const FrameOperator& op, const SampleVector& s,
                                   FftWorkspace& ws) {
  if (static_cast<std::size_t>(s.size()) != op.rows())
    throw std::invalid_argument("apply_A_adjoint: sample length mismatch");
  ws.zero();
  auto* buf = ws.data();
  const auto& samples = op.mask().samples;
  for (std::size_t k = 0; k < samples.size(); ++k)
    buf[samples[k]] = s[static_cast<Eigen::Index>(k)];
  ws.forward();
  const auto& pos = op.freq_positions();
  CoeffVector out(static_cast<Eigen::Index>(pos.size()));
  const double sc = op.normalization();
  for (std::size_t j = 0; j < pos.size(); ++j)
    out[static_cast<Eigen::Index>(j)] = sc * buf[pos[j]];
  return out;
}

inline CoeffVector apply_A_adjoint(const FrameOperator& op, const SampleVector& s) {
  return apply_A_adjoint(op, s, internal_workspace(op));
}

/// P s = (A A' - I) s. The plunge projection: composed with A it maps the
/// singular values sigma of A to sigma^3 - sigma, annihilating the clusters
/// near 0 and 1.
inline SampleVector apply_P(const FrameOperator& op, const SampleVector& s,
                            FftWorkspace& ws) {
  SampleVector out = apply_A(op, apply_A_adjoint(op, s, ws), ws);
  out -= s;
  return out;
}

inline SampleVector apply_P(const FrameOperator& op, const SampleVector& s) {
  return apply_P(op, s, internal_workspace(op));
}

namespace detail {

inline void check_entry_cap(std::size_t rows, std::size_t cols, std::size_t cap,
                            const char* who) {
  if (cap != 0 && rows * cols > cap)
    throw CapExceeded(std::string(who) + ": " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " exceeds entry cap " + std::to_string(cap));
}

}  // namespace detail

/// Dense N_Omega x N_Lambda matrix with entries exp(2*pi*i*(k . l)/n_r)/sqrt(N_R),
/// evaluated directly from the entry formula (independent of the FFT path).
inline DenseMatrix materialize_A_dense(const FrameOperator& op,
                                       std::size_t entry_cap = dense_entry_cap) {
  detail::check_entry_cap(op.rows(), op.cols(), entry_cap, "materialize_A_dense");
  const GridSpec& spec = op.spec();
  const auto& samples = op.mask().samples;
  const auto& window = op.window().indices;
  DenseMatrix a(static_cast<Eigen::Index>(samples.size()),
                static_cast<Eigen::Index>(window.size()));
  const double step = 2.0 * std::numbers::pi / spec.n_r;
  const double s = op.normalization();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const MultiIndex ki = unflatten(samples[k], spec);
    for (std::size_t j = 0; j < window.size(); ++j) {
      long long dot = 0;
      for (int d = 0; d < spec.dim; ++d)
        dot += static_cast<long long>(ki[static_cast<std::size_t>(d)]) *
               window[j][static_cast<std::size_t>(d)];
      long long r = dot % spec.n_r;
      if (r < 0) r += spec.n_r;
      a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          std::polar(s, step * static_cast<double>(r));
    }
  }
  return a;
}

/// 1D Dirichlet factor b(k) = sin(pi*n_lambda*k/n_r) / (n_r*sin(pi*k/n_r)),
/// periodic with period n_r; the removable singularity at multiples of n_r
/// evaluates to n_lambda/n_r.
inline double dirichlet_b(long k, const GridSpec& spec) {
  long m = k % spec.n_r;
  if (m < 0) m += spec.n_r;
  if (m == 0) return static_cast<double>(spec.n_lambda) / spec.n_r;
  const double t = std::numbers::pi * static_cast<double>(m) / spec.n_r;
  return std::sin(spec.n_lambda * t) / (spec.n_r * std::sin(t));
}

/// Product of univariate Dirichlet kernels, B(k) = prod_d b(k_d). Equals the
/// entry formula of T_Omega B_Lambda T_Omega for odd n_lambda; even windows
/// pick up a unit phase factor and must use the dense route instead.
inline double kernel_B(const MultiIndex& k, const GridSpec& spec) {
  double prod = 1.0;
  for (int v : k) prod *= dirichlet_b(v, spec);
  return prod;
}

/// Dense N_Omega x N_Omega operator (T_Omega B_Lambda T_Omega)_{k,l} = B(k - l).
/// Real symmetric; requires odd n_lambda (see kernel_B).
inline Eigen::MatrixXd materialize_TBT(const FrameOperator& op,
                                       std::size_t entry_cap = dense_entry_cap) {
  const GridSpec& spec = op.spec();
  if (spec.n_lambda % 2 == 0)
    throw std::invalid_argument("materialize_TBT: kernel path requires odd n_lambda");
  detail::check_entry_cap(op.rows(), op.rows(), entry_cap, "materialize_TBT");
  std::vector<double> b(static_cast<std::size_t>(spec.n_r));
  for (int t = 0; t < spec.n_r; ++t) b[static_cast<std::size_t>(t)] = dirichlet_b(t, spec);

  const auto& samples = op.mask().samples;
  std::vector<MultiIndex> cells;
  cells.reserve(samples.size());
  for (std::size_t flat : samples) cells.push_back(unflatten(flat, spec));

  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd tbt(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = r; c < n; ++c) {
      double prod = 1.0;
      for (int d = 0; d < spec.dim; ++d) {
        int delta = (cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(d)] -
                     cells[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)]) %
                    spec.n_r;
        if (delta < 0) delta += spec.n_r;
        prod *= b[static_cast<std::size_t>(delta)];
      }
      tbt(r, c) = prod;
      tbt(c, r) = prod;
    }
  return tbt;
}

}  // namespace frameext
