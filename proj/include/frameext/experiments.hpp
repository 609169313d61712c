#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "frameext/domain.hpp"
#include "frameext/expr.hpp"
#include "frameext/solver.hpp"
#include "frameext/spectral.hpp"
#include "frameext/topology.hpp"

namespace frameext {

enum class ExperimentKind { convergence, plunge, robustness, timing, spectrum, topology };

inline const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::plunge: return "plunge";
    case ExperimentKind::robustness: return "robustness";
    case ExperimentKind::timing: return "timing";
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::topology: return "topology";
  }
  return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::convergence, ExperimentKind::plunge, ExperimentKind::robustness,
        ExperimentKind::timing, ExperimentKind::spectrum, ExperimentKind::topology})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::convergence;
  std::string domain = "disk";
  std::vector<int> nlambda = {5, 9, 13, 17, 21};  ///< strictly increasing
  double box_half_width = 2.0;                    ///< T
  std::vector<double> t_list = {1.2, 2.0, 3.0, 6.0};  ///< robustness only
  double eps = 1e-14;
  std::uint64_t seed = 0;
  int error_samples = 10000;
  int oversample_factor = 4;    ///< n_r = oversample_factor * n_lambda
  int timing_runs = 3;
  std::size_t direct_max_cols = 1100;  ///< skip the dense solve above this N_Lambda
  double rank_constant = 0.25;  ///< start-rank constant fed to the solver
  std::string out_path;

  void validate() const {
    if (nlambda.empty()) throw std::invalid_argument("experiment: empty n_lambda list");
    for (std::size_t i = 0; i + 1 < nlambda.size(); ++i)
      if (nlambda[i] >= nlambda[i + 1])
        throw std::invalid_argument("experiment: n_lambda list must be strictly increasing");
    if (nlambda.front() < 1) throw std::invalid_argument("experiment: n_lambda must be >= 1");
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("experiment: eps must lie in (0, 1)");
    if (timing_runs < 1) throw std::invalid_argument("experiment: timing_runs must be >= 1");
  }
};

struct TestFunction {
  std::string name;
  std::function<double(double, double)> fn;
};

/// The four accuracy-study targets: smooth, pole just outside the box corner,
/// oscillatory, and C0 with kinked partials.
inline const std::vector<TestFunction>& convergence_functions() {
  static const std::vector<TestFunction> fns = {
      {"exp_xy", [](double x, double y) { return std::exp(x + y); }},
      {"singular",
       [](double x, double y) {
         const double d = (x - 1.1) * (x - 1.1) + (y - 1.1) * (y - 1.1);
         return 1.0 / (d * d);
       }},
      {"oscillatory",
       [](double x, double y) {
         return std::cos(24 * x - 32 * y) * std::sin(21 * x - 28 * y);
       }},
      {"abs_xy", [](double x, double y) { return std::abs(x * y); }},
  };
  return fns;
}

/// sin((n_lambda/2)(x+y)): one more wavelength per basis refinement.
inline TestFunction robustness_wave(int n_lambda) {
  const double w = n_lambda / 2.0;
  return {"osc_diag", [w](double x, double y) { return std::sin(w * (x + y)); }};
}

/// Builtin name or "expr:<formula>".
inline TestFunction find_function(const std::string& name) {
  if (name.rfind("expr:", 0) == 0)
    return {name, expr::compile(std::string_view(name).substr(5))};
  for (const auto& f : convergence_functions())
    if (f.name == name) return f;
  throw std::invalid_argument("unknown function: " + name +
                              " (builtins: exp_xy singular oscillatory abs_xy, or expr:<...>)");
}

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream s;
  s << "kind=" << to_string(cfg.kind) << ";domain=" << cfg.domain << ";nlambda=";
  for (int n : cfg.nlambda) s << n << ',';
  s << ";T=" << fmt17(cfg.box_half_width) << ";t_list=";
  for (double t : cfg.t_list) s << fmt17(t) << ',';
  s << ";eps=" << fmt17(cfg.eps) << ";error_samples=" << cfg.error_samples
    << ";oversample=" << cfg.oversample_factor << ";timing_runs=" << cfg.timing_runs
    << ";direct_max_cols=" << cfg.direct_max_cols
    << ";rank_constant=" << fmt17(cfg.rank_constant);
  return s.str();
}

inline std::string csv_preamble(const ExperimentConfig& cfg, const std::string& columns,
                                const std::string& note = {}) {
  std::ostringstream out;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config(cfg))));
  out << "# frame-extend v1, config_hash=" << hash << ", seed=" << cfg.seed << "\n";
  out << "# oversampling: n_r = " << cfg.oversample_factor
      << " * n_lambda unless noted; eps = " << fmt17(cfg.eps) << "\n";
  if (!note.empty()) out << "# " << note << "\n";
  out << columns << "\n";
  return out.str();
}

inline int worker_count(std::size_t cells) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("FRAME_EXTEND_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = static_cast<unsigned>(cap);
  }
  return static_cast<int>(std::min<std::size_t>(n, cells));
}

/// Run fn(i) for i in [0, cells) on a small pool; results land in index order,
/// so output never depends on the worker count.
template <typename CellFn>
inline std::vector<std::string> ordered_cells(std::size_t cells, CellFn&& fn,
                                              bool serial = false) {
  std::vector<std::string> rows(cells);
  const int workers = serial ? 1 : worker_count(cells);
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells; ++i) rows[i] = fn(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells) return;
        rows[i] = fn(i);
      }
    });
  for (auto& t : pool) t.join();
  return rows;
}

inline SampleVector sample_function(const FrameOperator& op,
                                    const std::function<double(double, double)>& f) {
  SampleVector b(static_cast<Eigen::Index>(op.rows()));
  const auto& samples = op.mask().samples;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto c = physical_coordinate(unflatten(samples[k], op.spec()), op.spec());
    b[static_cast<Eigen::Index>(k)] = f(c[0], c[1]);
  }
  return b;
}

inline double lsq_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace detail

/// One row per (function, n_lambda) on the configured domain; Algorithm 1
/// residual plus the max pointwise error over seeded interior samples.
inline std::string run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  const DomainSpec domain = DomainSpec::builtin(cfg.domain);
  const auto& fns = convergence_functions();
  const std::size_t cells = fns.size() * cfg.nlambda.size();
  auto rows = detail::ordered_cells(cells, [&](std::size_t cell) -> std::string {
    const TestFunction& f = fns[cell / cfg.nlambda.size()];
    const int nl = cfg.nlambda[cell % cfg.nlambda.size()];
    std::ostringstream row;
    row << cfg.domain << ',' << f.name << ',' << nl << ',';
    try {
      const GridSpec spec(cfg.oversample_factor * nl, nl, cfg.box_half_width, 2);
      const FrameOperator op(rasterize(domain, spec));
      SolverConfig solver;
      solver.eps = cfg.eps;
      solver.rng_seed = rng::derive(cfg.seed, cell);
      solver.rank_constant = cfg.rank_constant;
      const auto [x, report] = solve_algorithm1(op, detail::sample_function(op, f.fn), solver);
      const ErrorMetrics metrics = error_metrics(op, x, f.fn, cfg.error_samples,
                                                 rng::derive(cfg.seed, cell), &domain);
      row << detail::fmt17(report.residual_norm) << ',' << detail::fmt17(metrics.max_pointwise);
    } catch (const Error& e) {
      row << "error,error  # " << e.what();
    }
    row << '\n';
    return row.str();
  });
  std::string csv = detail::csv_preamble(cfg, "domain,function,n_lambda,residual,max_error");
  for (const auto& r : rows) csv += r;
  return csv;
}

/// Plunge-region census: eta from the dense profile against the boundary count.
inline std::string run_plunge_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const DomainSpec domain = DomainSpec::builtin(cfg.domain);
  auto rows = detail::ordered_cells(cfg.nlambda.size(), [&](std::size_t cell) -> std::string {
    const int nl = cfg.nlambda[cell];
    const int nr = cfg.oversample_factor * nl;
    std::ostringstream row;
    row << cfg.domain << ',' << nl << ',' << nr << ',';
    try {
      const GridSpec spec(nr, nl, cfg.box_half_width, 2);
      const FrameOperator op(rasterize(domain, spec));
      const LayerDecomposition layers = distance_layers(op.mask());
      const SpectralProfile profile = singular_profile(op, cfg.eps);
      const double denom = static_cast<double>(layers.boundary_count()) * std::log(nr);
      row << layers.boundary_count() << ',' << profile.plunge_count << ','
          << detail::fmt17(static_cast<double>(profile.plunge_count) / denom);
    } catch (const CapExceeded& e) {
      row << "capped,capped,capped  # " << e.what();
    }
    row << '\n';
    return row.str();
  });
  std::string csv =
      detail::csv_preamble(cfg, "domain,n_lambda,n_r,n_delta_omega,eta,ratio");
  for (const auto& r : rows) csv += r;
  return csv;
}

/// Wave resolution study on the unit disk: f = sin((n_lambda/2)(x+y)) for each
/// extension half-width T. The grid is chosen per row so the oversampling
/// N_Omega/N_Lambda stays ~4 for every T.
inline std::string run_robustness(const ExperimentConfig& cfg) {
  cfg.validate();
  const DomainSpec unit_disk = DomainSpec::disk(1.0);
  const std::size_t cells = cfg.t_list.size() * cfg.nlambda.size();
  auto rows = detail::ordered_cells(cells, [&](std::size_t cell) -> std::string {
    const double T = cfg.t_list[cell / cfg.nlambda.size()];
    const int nl = cfg.nlambda[cell % cfg.nlambda.size()];
    std::ostringstream row;
    row << detail::fmt17(T) << ',' << nl << ',';
    try {
      const int nr = static_cast<int>(std::lround(
          cfg.oversample_factor * T * nl / std::sqrt(std::numbers::pi)));
      const GridSpec spec(std::max(nr, nl), nl, T, 2);
      const FrameOperator op(rasterize(unit_disk, spec));
      const TestFunction f = robustness_wave(nl);
      SolverConfig solver;
      solver.eps = cfg.eps;
      solver.rng_seed = rng::derive(cfg.seed, cell);
      solver.rank_constant = cfg.rank_constant;
      const auto [x, report] = solve_algorithm1(op, detail::sample_function(op, f.fn), solver);
      const ErrorMetrics metrics = error_metrics(op, x, f.fn, cfg.error_samples,
                                                 rng::derive(cfg.seed, cell), &unit_disk);
      row << detail::fmt17(metrics.max_pointwise);
    } catch (const Error& e) {
      row << "error  # " << e.what();
    }
    row << '\n';
    return row.str();
  });
  std::string csv = detail::csv_preamble(
      cfg, "T,n_lambda,max_error",
      "unit disk; n_r = round(oversample * T * n_lambda / sqrt(pi)) keeps N_omega/N_lambda ~ 4");
  for (const auto& r : rows) csv += r;
  return csv;
}

/// Wall-clock medians for the projection algorithm and (while feasible) the
/// dense solve. Always serial; timings go last in the row so the leading
/// columns are reproducible.
inline std::string run_timing(const ExperimentConfig& cfg) {
  cfg.validate();
  const DomainSpec domain = DomainSpec::builtin(cfg.domain);
  std::vector<double> lx_alg, ly_alg, lx_dir, ly_dir;
  auto rows = detail::ordered_cells(
      cfg.nlambda.size(),
      [&](std::size_t cell) -> std::string {
        const int nl = cfg.nlambda[cell];
        const GridSpec spec(cfg.oversample_factor * nl, nl, cfg.box_half_width, 2);
        const FrameOperator op(rasterize(domain, spec));
        const SampleVector b = detail::sample_function(
            op, [](double x, double y) { return std::exp(x + y); });
        SolverConfig solver;
        solver.eps = cfg.eps;
        solver.rng_seed = rng::derive(cfg.seed, cell);
        solver.rank_constant = cfg.rank_constant;

        std::vector<double> t_alg, t_dir;
        for (int run = 0; run < cfg.timing_runs; ++run) {
          const auto t0 = std::chrono::steady_clock::now();
          (void)solve_algorithm1(op, b, solver);
          t_alg.push_back(std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0).count());
        }
        const bool direct_feasible = op.cols() <= cfg.direct_max_cols;
        if (direct_feasible)
          for (int run = 0; run < cfg.timing_runs; ++run) {
            const auto t0 = std::chrono::steady_clock::now();
            (void)solve_dense_tsvd(op, b, cfg.eps, /*entry_cap=*/0);
            t_dir.push_back(std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count());
          }
        auto median = [](std::vector<double> v) {
          std::sort(v.begin(), v.end());
          return v[v.size() / 2];
        };
        const double med_alg = median(t_alg);
        lx_alg.push_back(std::log(static_cast<double>(op.cols())));
        ly_alg.push_back(std::log(med_alg));
        std::ostringstream row;
        row << nl << ',';
        if (direct_feasible) {
          const double med_dir = median(t_dir);
          lx_dir.push_back(std::log(static_cast<double>(op.cols())));
          ly_dir.push_back(std::log(med_dir));
          row << detail::fmt17(med_dir);
        } else {
          row << "nan";
        }
        row << ',' << detail::fmt17(med_alg) << '\n';
        return row.str();
      },
      /*serial=*/true);
  std::string csv = detail::csv_preamble(
      cfg, "n_lambda,t_direct_s,t_algorithm1_s",
      "medians of " + std::to_string(cfg.timing_runs) + " runs; direct solve skipped above " +
          std::to_string(cfg.direct_max_cols) + " columns");
  for (const auto& r : rows) csv += r;
  auto top_half_slope = [](const std::vector<double>& lx, const std::vector<double>& ly) {
    const std::size_t n = lx.size();
    const std::size_t start = n / 2 >= 1 ? n / 2 - (n % 2 == 0 ? 1 : 0) : 0;
    std::vector<double> tx(lx.begin() + static_cast<long>(start), lx.end());
    std::vector<double> ty(ly.begin() + static_cast<long>(start), ly.end());
    return detail::lsq_slope(tx, ty);
  };
  if (lx_alg.size() >= 2) {
    csv += "# slope_algorithm1_all=" + detail::fmt17(detail::lsq_slope(lx_alg, ly_alg)) +
           " top_half=" + detail::fmt17(top_half_slope(lx_alg, ly_alg)) + "\n";
  }
  if (lx_dir.size() >= 2) {
    csv += "# slope_direct_all=" + detail::fmt17(detail::lsq_slope(lx_dir, ly_dir)) +
           " top_half=" + detail::fmt17(top_half_slope(lx_dir, ly_dir)) + "\n";
  }
  return csv;
}

/// Singular-value profiles for each configured size, with eta footers.
inline std::string run_spectrum(const ExperimentConfig& cfg) {
  cfg.validate();
  const DomainSpec domain = DomainSpec::builtin(cfg.domain);
  std::string csv = detail::csv_preamble(cfg, "n_lambda,index,sigma");
  std::string footer;
  for (std::size_t cell = 0; cell < cfg.nlambda.size(); ++cell) {
    const int nl = cfg.nlambda[cell];
    const GridSpec spec(cfg.oversample_factor * nl, nl, cfg.box_half_width, 2);
    const FrameOperator op(rasterize(domain, spec));
    const SpectralProfile profile = singular_profile(op, cfg.eps);
    for (Eigen::Index i = 0; i < profile.sigma.size(); ++i)
      csv += std::to_string(nl) + ',' + std::to_string(i + 1) + ',' +
             detail::fmt17(profile.sigma[i]) + '\n';
    footer += "# n_lambda=" + std::to_string(nl) + " eta=" + std::to_string(profile.plunge_count) +
              " ones=" + std::to_string(profile.ones_count) +
              " zeros=" + std::to_string(profile.zeros_count) + "\n";
  }
  return csv + footer;
}

/// Mask statistics per resolution: boundary layer census, connectivity, and
/// the layer shrink bound.
inline std::string run_topology(const ExperimentConfig& cfg) {
  cfg.validate();
  const DomainSpec domain = DomainSpec::builtin(cfg.domain);
  std::string csv = detail::csv_preamble(
      cfg, "n_r,n_omega,n_delta_omega,components,holes,layer_bound_holds");
  std::vector<int> resolutions;
  for (int nl : cfg.nlambda) resolutions.push_back(cfg.oversample_factor * nl);
  for (int nr : resolutions) {
    const GridSpec spec(nr, 1, cfg.box_half_width, 2);
    const DomainMask mask = rasterize(domain, spec);
    const LayerDecomposition layers = distance_layers(mask);
    const LayerBoundReport bound = verify_layer_bound(mask);
    csv += std::to_string(nr) + ',' + std::to_string(mask.sample_count()) + ',' +
           std::to_string(layers.boundary_count()) + ',' +
           std::to_string(layers.component_count) + ',' +
           std::to_string(layers.hole_count) + ',' + (bound.holds ? "1" : "0") + '\n';
  }
  if (resolutions.size() >= 3)
    csv += "# box_counting_slope=" +
           detail::fmt17(boundary_dimension_estimate(domain, resolutions, cfg.box_half_width)) +
           "\n";
  return csv;
}

/// Dispatch on cfg.kind.
inline std::string run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::convergence: return run_convergence(cfg);
    case ExperimentKind::plunge: return run_plunge_study(cfg);
    case ExperimentKind::robustness: return run_robustness(cfg);
    case ExperimentKind::timing: return run_timing(cfg);
    case ExperimentKind::spectrum: return run_spectrum(cfg);
    case ExperimentKind::topology: return run_topology(cfg);
  }
  throw std::invalid_argument("unknown experiment kind");
}

}  // namespace frameext
