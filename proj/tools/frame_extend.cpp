// frame-extend: Fourier extension frame approximations on arbitrary 2D
// domains, plus spectral/topological analysis and the experiment suite.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "frameext/frameext.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_solver = 3;
constexpr int exit_io = 4;

struct CommonArgs {
  std::string domain = "disk";
  std::string mask_path;
  int nlambda = 9;
  int nr = 36;
  double box_half_width = 2.0;
  double eps = 1e-14;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_grid = true) {
  cmd->add_option("--domain", args.domain,
                  "builtin domain name (square, diamond, disk, ring, star, box)")
      ->capture_default_str();
  cmd->add_option("--mask", args.mask_path, "mask file (overrides --domain)")
      ->capture_default_str();
  if (with_grid) {
    cmd->add_option("--nlambda", args.nlambda, "frequencies per dimension")
        ->capture_default_str();
    cmd->add_option("--nr", args.nr, "grid points per dimension")->capture_default_str();
  }
  cmd->add_option("--T", args.box_half_width, "bounding-box half-width")
      ->capture_default_str();
  cmd->add_option("--eps", args.eps, "regularization cutoff")->capture_default_str();
  cmd->add_option("--seed", args.seed, "random seed")->capture_default_str();
}

frameext::DomainSpec resolve_domain(const CommonArgs& args) {
  if (!args.mask_path.empty()) return frameext::DomainSpec::from_mask_file(args.mask_path);
  return frameext::DomainSpec::builtin(args.domain);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw frameext::MaskError("cannot open output file " + path);
  out << content;
  if (!out) throw frameext::MaskError("write failed for " + path);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-")
    std::cout << content;
  else
    write_file(out_path, content);
}

int cmd_approx(const CommonArgs& args, const std::string& function_name,
               const std::string& out_prefix, std::optional<int> rank, bool adaptive) {
  const frameext::GridSpec spec(args.nr, args.nlambda, args.box_half_width, 2);
  const frameext::DomainSpec domain = resolve_domain(args);
  const frameext::FrameOperator op(frameext::rasterize(domain, spec));
  const frameext::TestFunction f = frameext::find_function(function_name);

  frameext::SampleVector b(static_cast<Eigen::Index>(op.rows()));
  const auto& samples = op.mask().samples;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto c = frameext::physical_coordinate(frameext::unflatten(samples[k], spec), spec);
    b[static_cast<Eigen::Index>(k)] = f.fn(c[0], c[1]);
  }

  frameext::SolverConfig solver;
  solver.eps = args.eps;
  solver.rng_seed = args.seed;
  solver.rank_estimate = rank;
  solver.adaptive = adaptive;
  const auto [x, report] = frameext::solve_algorithm1(op, b, solver);

  std::ostringstream coeffs;
  coeffs << "l1,l2,re,im\n";
  coeffs.precision(17);
  const auto& window = op.window().indices;
  for (std::size_t j = 0; j < window.size(); ++j)
    coeffs << window[j][0] << ',' << window[j][1] << ','
           << x[static_cast<Eigen::Index>(j)].real() << ','
           << x[static_cast<Eigen::Index>(j)].imag() << '\n';
  write_file(out_prefix + ".coeffs.csv", coeffs.str());

  nlohmann::json j;
  j["domain"] = domain.name();
  j["function"] = f.name;
  j["n_lambda"] = args.nlambda;
  j["n_r"] = args.nr;
  j["T"] = args.box_half_width;
  j["eps"] = args.eps;
  j["seed"] = args.seed;
  j["n_omega"] = op.rows();
  j["residual"] = report.residual_norm;
  j["coefficient_norm"] = report.coefficient_norm;
  j["rank"] = report.rank_used;
  j["adaptive_doubling"] = report.adaptive_doubling;
  j["timings"] = {{"sketch_s", report.sketch_seconds},
                  {"factor_s", report.factor_seconds},
                  {"correction_s", report.correction_seconds},
                  {"total_s", report.total_seconds}};
  write_file(out_prefix + ".report.json", j.dump(2) + "\n");
  std::cout << "residual " << report.residual_norm << ", rank " << report.rank_used
            << ", wrote " << out_prefix << ".coeffs.csv and " << out_prefix
            << ".report.json\n";
  return exit_ok;
}

int cmd_spectrum(const CommonArgs& args, const std::string& out_path) {
  const frameext::GridSpec spec(args.nr, args.nlambda, args.box_half_width, 2);
  const frameext::FrameOperator op(frameext::rasterize(resolve_domain(args), spec));
  const frameext::SpectralProfile profile = frameext::singular_profile(op, args.eps);
  std::ostringstream out;
  frameext::write_profile_csv(out, profile);
  out << "# eta=" << profile.plunge_count << " ones=" << profile.ones_count
      << " zeros=" << profile.zeros_count << " eps=" << args.eps << "\n";
  out << "# trace_closed_form=" << frameext::trace_tbt(op) << "\n";
  emit(out_path, out.str());
  return exit_ok;
}

int cmd_topology(const CommonArgs& args, const std::string& out_path) {
  const frameext::GridSpec spec(args.nr, 1, args.box_half_width, 2);
  const frameext::DomainMask mask = frameext::rasterize(resolve_domain(args), spec);
  const frameext::LayerDecomposition layers = frameext::distance_layers(mask);
  const frameext::LayerBoundReport bound = frameext::verify_layer_bound(mask);
  std::cout << "components=" << layers.component_count << " holes=" << layers.hole_count
            << " n_delta=" << layers.boundary_count()
            << " layers=" << layers.layer_sizes.size()
            << " layer_bound=" << (bound.holds ? "holds" : "violated") << "\n";
  if (!out_path.empty()) {
    std::ostringstream out;
    frameext::write_layer_csv(out, layers);
    emit(out_path, out.str());
  }
  return exit_ok;
}

frameext::ExperimentConfig load_experiment_config(const std::string& kind,
                                                  const std::string& config_path) {
  frameext::ExperimentConfig cfg;
  cfg.kind = frameext::parse_experiment_kind(kind);
  if (config_path.empty()) return cfg;
  std::ifstream in(config_path);
  if (!in) throw frameext::MaskError("cannot open config file " + config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config parse error in " + config_path + ": " + e.what());
  }
  try {
    if (j.contains("domain")) cfg.domain = j["domain"].get<std::string>();
    if (j.contains("nlambda")) cfg.nlambda = j["nlambda"].get<std::vector<int>>();
    if (j.contains("T")) cfg.box_half_width = j["T"].get<double>();
    if (j.contains("t_list")) cfg.t_list = j["t_list"].get<std::vector<double>>();
    if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("error_samples")) cfg.error_samples = j["error_samples"].get<int>();
    if (j.contains("oversample_factor"))
      cfg.oversample_factor = j["oversample_factor"].get<int>();
    if (j.contains("timing_runs")) cfg.timing_runs = j["timing_runs"].get<int>();
    if (j.contains("direct_max_cols"))
      cfg.direct_max_cols = j["direct_max_cols"].get<std::size_t>();
    if (j.contains("rank_constant")) cfg.rank_constant = j["rank_constant"].get<double>();
    if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config field error in " + config_path + ": " + e.what());
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier extension frame approximation toolkit"};
  app.require_subcommand(1);

  CommonArgs approx_args, spectrum_args, topo_args;
  std::string function_name = "exp_xy", approx_out, spectrum_out, topo_out;
  std::optional<int> approx_rank;
  bool approx_no_adaptive = false;

  CLI::App* approx = app.add_subcommand("approx", "approximate a function on a domain");
  add_common(approx, approx_args);
  approx->add_option("--function", function_name,
                     "builtin function name or expr:<formula> (x, y; + - * / ^, sin cos exp abs)")
      ->capture_default_str();
  approx->add_option("--out", approx_out, "output prefix for .coeffs.csv / .report.json")
      ->required();
  approx->add_option("--rank", approx_rank, "starting sketch rank (heuristic when unset)");
  approx->add_flag("--no-adaptive", approx_no_adaptive, "disable adaptive rank doubling");

  CLI::App* spectrum = app.add_subcommand("spectrum", "singular value profile of A");
  add_common(spectrum, spectrum_args);
  spectrum->add_option("--out", spectrum_out, "output CSV path (default stdout)")
      ->capture_default_str();

  CLI::App* topology = app.add_subcommand("topology", "mask layers, components, holes");
  add_common(topology, topo_args, /*with_grid=*/false);
  topology->add_option("--nr", topo_args.nr, "grid points per dimension")
      ->capture_default_str();
  topology->add_option("--out", topo_out, "layer CSV path (optional)")
      ->capture_default_str();

  std::string experiment_kind, experiment_config, experiment_out;
  CLI::App* experiment = app.add_subcommand("experiment", "run a study, emit CSV");
  experiment
      ->add_option("kind", experiment_kind,
                   "convergence | plunge | robustness | timing | spectrum | topology")
      ->required();
  experiment->add_option("--config", experiment_config, "JSON config file")
      ->capture_default_str();
  experiment->add_option("--out", experiment_out, "output CSV path (overrides config)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (approx->parsed())
      return cmd_approx(approx_args, function_name, approx_out, approx_rank,
                        !approx_no_adaptive);
    if (spectrum->parsed()) return cmd_spectrum(spectrum_args, spectrum_out);
    if (topology->parsed()) return cmd_topology(topo_args, topo_out);
    if (experiment->parsed()) {
      frameext::ExperimentConfig cfg =
          load_experiment_config(experiment_kind, experiment_config);
      if (!experiment_out.empty()) cfg.out_path = experiment_out;
      const std::string csv = frameext::run_experiment(cfg);
      emit(cfg.out_path, csv);
      return exit_ok;
    }
  } catch (const frameext::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return exit_solver;
  } catch (const frameext::MaskError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::length_error& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  }
  return exit_usage;
}
