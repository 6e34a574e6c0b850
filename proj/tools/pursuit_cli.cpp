// Command-line front end: dictionary/signal generation, forward decomposition,
// backward shrinking, and the self-contained chirp reference experiment.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pursuit/pursuit.hpp"

namespace fs = std::filesystem;
using pursuit::io::json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string human(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<int> parse_scales(const std::string& text) {
  std::vector<int> scales;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      if (hi < lo) throw pursuit::InvalidArgument("scale range is reversed: " + text);
      for (int m = lo; m <= hi; ++m) scales.push_back(m);
    } else {
      std::size_t begin = 0;
      while (begin <= text.size()) {
        const std::size_t comma = text.find(',', begin);
        const std::string item = text.substr(begin, comma == std::string::npos ? comma : comma - begin);
        scales.push_back(std::stoi(item));
        if (comma == std::string::npos) break;
        begin = comma + 1;
      }
    }
  } catch (const std::logic_error&) {
    throw pursuit::InvalidArgument("cannot parse scales: " + text);
  }
  return scales;
}

std::vector<double> parse_doubles(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t comma = text.find(',', begin);
    const std::string item = text.substr(begin, comma == std::string::npos ? comma : comma - begin);
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw pursuit::InvalidArgument(std::string("cannot parse ") + what + ": " + text);
    }
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  if (out.size() != expected) {
    throw pursuit::InvalidArgument(std::string(what) + " needs " + std::to_string(expected) +
                                   " comma-separated values: " + text);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct GenDictOptions {
  std::string scales = "0..4";
  double step = 0.2;
  std::string interval = "0,4";
  double grid = 0.01;
  int margin = 4;
  std::string output;
};

void run_gen_dict(const GenDictOptions& opt) {
  pursuit::MexHatSpec spec;
  spec.scales = parse_scales(opt.scales);
  spec.translation_step = opt.step;
  const auto iv = parse_doubles(opt.interval, 2, "--interval");
  spec.t_min = iv[0];
  spec.t_max = iv[1];
  spec.grid_step = opt.grid;
  spec.margin_indices = opt.margin;

  const pursuit::Dictionary dict = pursuit::build_mexhat_dictionary(spec);
  pursuit::io::write_dictionary(opt.output, dict);
  std::cout << "wrote " << dict.size() << " atoms to " << opt.output << " (+ sidecar "
            << pursuit::io::sidecar_path(opt.output).string() << ")\n";
}

struct GenSignalOptions {
  std::string chirp = "0,1,2";
  std::string grid = "0,0.01,4";
  std::string output;
};

void run_gen_signal(const GenSignalOptions& opt) {
  const auto c = parse_doubles(opt.chirp, 3, "--chirp");
  const auto g = parse_doubles(opt.grid, 3, "--grid");
  pursuit::ChirpSpec spec;
  spec.f0 = c[0];
  spec.t1 = c[1];
  spec.f1 = c[2];
  spec.grid_start = g[0];
  spec.grid_step = g[1];
  spec.grid_end = g[2];
  const pursuit::Signal f = pursuit::chirp(spec);
  pursuit::io::write_signal_csv(opt.output, f);
  std::cout << "wrote " << f.size() << " samples to " << opt.output << "\n";
}

// ---------------------------------------------------------------------------

void write_series(const fs::path& dir, const pursuit::Signal& f, const pursuit::Decomposition& state,
                  const pursuit::Dictionary& dict) {
  const Eigen::VectorXd approx = pursuit::reconstruct(state, dict);
  pursuit::Signal series{f.grid_start, f.grid_step, approx};
  pursuit::io::write_signal_csv(dir / "approximation.csv", series);
  series.samples = (f.samples - approx).cwiseAbs();
  pursuit::io::write_signal_csv(dir / "abs_error.csv", series);
}

struct DecomposeOptions {
  std::string signal;
  std::string dict;
  std::size_t max_atoms = 0;  // 0: limited only by the dictionary
  double tol = 0.0;
  double eps = pursuit::kDefaultDependenceEps;
  std::string output_dir = ".";
};

void run_decompose(const DecomposeOptions& opt) {
  Timer timer;
  const pursuit::Signal f = pursuit::io::read_signal_csv(opt.signal);
  const pursuit::Dictionary dict = pursuit::io::read_dictionary(opt.dict);

  pursuit::ForwardConfig cfg;
  cfg.max_atoms = opt.max_atoms > 0 ? opt.max_atoms : dict.size();
  cfg.residual_tol = opt.tol;
  cfg.dependence_eps = opt.eps;

  pursuit::ForwardResult result = pursuit::oomp_run(f, dict, cfg);

  const fs::path dir(opt.output_dir);
  fs::create_directories(dir);
  json config{{"command", "decompose"},
              {"max_atoms", cfg.max_atoms},
              {"residual_tol", cfg.residual_tol},
              {"dependence_eps", cfg.dependence_eps}};
  pursuit::io::write_decomposition(dir / "decomposition.json", result.decomposition, dict, config);

  pursuit::io::RunReport report;
  report.config = config;
  report.config["stop_reason"] = pursuit::to_string(result.stop);
  report.forward_residual_history = result.residual_history;
  report.forward_residual_norm = result.decomposition.residual_norm;
  report.elapsed_seconds = timer.seconds();
  pursuit::io::write_report(dir / "report.json", report, result.decomposition, dict);
  pursuit::io::write_coefficients_csv(dir / "coefficients.csv", result.decomposition, dict);
  write_series(dir, f, result.decomposition, dict);

  std::cout << "selected " << result.decomposition.size() << " atoms, residual norm "
            << human(result.decomposition.residual_norm) << " (stop: " << pursuit::to_string(result.stop)
            << ")\n";
}

struct ShrinkOptions {
  std::string artifact;
  std::string signal;
  std::string dict;
  std::optional<std::size_t> target_count;
  std::optional<double> error_budget;
  std::string criterion = "theorem1";
  double eps = pursuit::kDefaultDependenceEps;
  std::string output_dir = ".";
};

void run_shrink(const ShrinkOptions& opt) {
  Timer timer;
  const pursuit::Signal f = pursuit::io::read_signal_csv(opt.signal);
  const pursuit::Dictionary dict = pursuit::io::read_dictionary(opt.dict);
  pursuit::io::LoadedDecomposition loaded = pursuit::io::load_decomposition(opt.artifact, dict, f, opt.eps);

  // The artifact's coefficients must be the projection of THIS signal; a
  // non-orthogonal residual means the artifact belongs to different data.
  if (!loaded.state.empty() &&
      pursuit::diagnostics::max_residual_correlation(loaded.state) >
          1e-5 * std::max(f.samples.norm(), 1e-30)) {
    throw pursuit::IoError("decomposition artifact is not a projection of this signal");
  }

  pursuit::BackwardConfig cfg;
  cfg.target_count = opt.target_count;
  cfg.error_budget = opt.error_budget;
  if (opt.criterion == "theorem1") {
    cfg.criterion = pursuit::DeletionCriterion::theorem1;
  } else if (opt.criterion == "naive-abs-coeff") {
    cfg.criterion = pursuit::DeletionCriterion::naive_abs_coeff;
  } else {
    throw pursuit::InvalidArgument("unknown criterion: " + opt.criterion);
  }

  pursuit::BackwardResult result = pursuit::boomp_run(std::move(loaded.state), f, cfg);
  pursuit::update_residual(result.decomposition, dict, f);

  const fs::path dir(opt.output_dir);
  fs::create_directories(dir);
  json config{{"command", "shrink"},
              {"criterion", opt.criterion},
              {"source_config", loaded.config_echo}};
  if (cfg.target_count) config["target_count"] = *cfg.target_count;
  if (cfg.error_budget) config["error_budget"] = *cfg.error_budget;
  pursuit::io::write_decomposition(dir / "decomposition.json", result.decomposition, dict, config);

  pursuit::io::RunReport report;
  report.config = config;
  report.trace = result.trace;
  report.backward_residual_norm = result.decomposition.residual_norm;
  report.elapsed_seconds = timer.seconds();
  pursuit::io::write_report(dir / "report.json", report, result.decomposition, dict);
  pursuit::io::write_coefficients_csv(dir / "coefficients.csv", result.decomposition, dict);
  pursuit::io::write_trace_csv(dir / "trace.csv", result.trace);
  write_series(dir, f, result.decomposition, dict);

  std::cout << "deleted " << result.trace.size() << " coefficients, " << result.decomposition.size()
            << " remain, residual norm " << human(result.decomposition.residual_norm) << "\n";
}

// ---------------------------------------------------------------------------

struct ReproduceOptions {
  std::size_t max_atoms = 60;
  std::size_t target_count = 34;
  std::string output_dir;
  bool verify = false;
  unsigned seed = 0;  // reserved; the pipeline is deterministic
};

struct VerifyStats {
  double biorth = 0.0;
  double residual_corr = 0.0;
  double coeff_vs_oracle = 0.0;  // backward steps only
};

int run_reproduce(const ReproduceOptions& opt) {
  const char* stage = "setup";
  try {
    Timer timer;
    stage = "dictionary generation";
    const pursuit::Dictionary dict = pursuit::build_mexhat_dictionary(pursuit::MexHatSpec{});
    stage = "signal generation";
    const pursuit::Signal f = pursuit::chirp(pursuit::ChirpSpec{});

    VerifyStats stats;
    pursuit::StepObserver observer;
    if (opt.verify) {
      observer = [&stats](const pursuit::Decomposition& state) {
        stats.biorth = std::max(stats.biorth, pursuit::diagnostics::max_biorthogonality_error(state));
        stats.residual_corr =
            std::max(stats.residual_corr, pursuit::diagnostics::max_residual_correlation(state));
      };
    }

    stage = "forward pursuit";
    pursuit::ForwardConfig fwd;
    fwd.max_atoms = opt.max_atoms;
    const Timer forward_timer{};
    pursuit::ForwardResult forward = pursuit::oomp_run(f, dict, fwd, observer);
    const double forward_time = forward_timer.seconds();

    pursuit::StepObserver backward_observer = observer;
    if (opt.verify) {
      backward_observer = [&stats, &dict, &f, observer](const pursuit::Decomposition& state) {
        observer(state);
        const auto oracle = pursuit::oracle::least_squares_projection(f, dict, state.selected);
        double worst = 0.0;
        for (Eigen::Index k = 0; k < state.coefficients.size(); ++k) {
          worst = std::max(worst, std::abs(state.coefficients[k] - oracle.coefficients[k]));
        }
        const double scale = std::max(1.0, oracle.coefficients.cwiseAbs().maxCoeff());
        stats.coeff_vs_oracle = std::max(stats.coeff_vs_oracle, worst / scale);
      };
    }

    stage = "backward pursuit";
    pursuit::BackwardConfig bwd;
    bwd.target_count = opt.target_count;
    pursuit::BackwardResult backward =
        pursuit::boomp_run(forward.decomposition, f, bwd, backward_observer);
    pursuit::update_residual(backward.decomposition, dict, f);

    stage = "forward baseline";
    pursuit::ForwardConfig base_cfg;
    base_cfg.max_atoms = opt.target_count;
    pursuit::ForwardResult baseline = pursuit::oomp_run(f, dict, base_cfg);

    std::cout << "atoms: " << dict.size() << "\n";
    std::cout << "oomp-" << opt.max_atoms << " residual:  " << human(forward.decomposition.residual_norm)
              << "\n";
    std::cout << "boomp-" << opt.target_count << " residual: " << human(backward.decomposition.residual_norm)
              << "\n";
    std::cout << "oomp-" << opt.target_count << " residual:  " << human(baseline.decomposition.residual_norm)
              << "\n";
    std::cout << "forward time: " << human(forward_time) << " s\n";

    if (!opt.output_dir.empty()) {
      stage = "output";
      const fs::path dir(opt.output_dir);
      fs::create_directories(dir);
      pursuit::io::write_signal_csv(dir / "chirp.csv", f);
      pursuit::io::write_dictionary(dir / "dictionary.csv", dict);

      json config{{"command", "reproduce"},
                  {"max_atoms", opt.max_atoms},
                  {"target_count", opt.target_count}};
      pursuit::io::write_decomposition(dir / "decomposition.json", forward.decomposition, dict, config);
      pursuit::io::write_decomposition(dir / "decomposition_shrunk.json", backward.decomposition, dict,
                                       config);

      pursuit::io::RunReport report;
      report.config = config;
      report.forward_residual_history = forward.residual_history;
      report.trace = backward.trace;
      report.forward_residual_norm = forward.decomposition.residual_norm;
      report.backward_residual_norm = backward.decomposition.residual_norm;
      report.elapsed_seconds = timer.seconds();
      report.config["baseline_residual_norm"] = baseline.decomposition.residual_norm;
      pursuit::io::write_report(dir / "report.json", report, backward.decomposition, dict);
      pursuit::io::write_trace_csv(dir / "trace.csv", backward.trace);

      const Eigen::VectorXd shrunk = pursuit::reconstruct(backward.decomposition, dict);
      pursuit::Signal series{f.grid_start, f.grid_step, shrunk};
      pursuit::io::write_signal_csv(dir / "boomp_approximation.csv", series);
      series.samples = (f.samples - shrunk).cwiseAbs();
      pursuit::io::write_signal_csv(dir / "boomp_abs_error.csv", series);

      const Eigen::VectorXd base = pursuit::reconstruct(baseline.decomposition, dict);
      series.samples = base;
      pursuit::io::write_signal_csv(dir / "oomp_baseline_approximation.csv", series);
      series.samples = (f.samples - base).cwiseAbs();
      pursuit::io::write_signal_csv(dir / "oomp_baseline_abs_error.csv", series);
    }

    if (opt.verify) {
      stage = "verification";
      const double fn = f.samples.norm();
      bool ok = true;
      const auto check = [&ok](const char* name, double value, double limit) {
        const bool pass = value <= limit;
        ok = ok && pass;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << human(value)
                  << " (limit " << human(limit) << ")\n";
      };
      check("biorthogonality max error", stats.biorth, 1e-6);
      check("residual-atom correlation", stats.residual_corr, 1e-8 * fn);
      check("backward coefficients vs oracle", stats.coeff_vs_oracle, 1e-8);
      double additivity = forward.decomposition.residual_norm * forward.decomposition.residual_norm;
      for (const pursuit::DeletionStep& step : backward.trace) additivity += step.criterion_value;
      const double final_sq =
          backward.decomposition.residual_norm * backward.decomposition.residual_norm;
      check("residual additivity", std::abs(additivity - final_sq) / final_sq, 1e-8);
      if (!ok) throw pursuit::Error("verification failed");
    }
    return 0;
  } catch (const pursuit::Error&) {
    std::cerr << "reproduce: stage '" << stage << "' failed\n";
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward (OOMP) and backward (BOOMP) greedy sparse approximation"};
  app.require_subcommand(1);

  GenDictOptions gen_dict;
  auto* cmd_gen_dict = app.add_subcommand("gen-dict", "Generate a Mexican-hat wavelet dictionary");
  cmd_gen_dict->add_option("--scales", gen_dict.scales, "Dyadic scales, e.g. 0..4 or 0,1,2");
  cmd_gen_dict->add_option("--step", gen_dict.step, "Translation step in scaled time");
  cmd_gen_dict->add_option("--interval", gen_dict.interval, "Interval t_min,t_max");
  cmd_gen_dict->add_option("--grid", gen_dict.grid, "Sample grid step");
  cmd_gen_dict->add_option("--margin", gen_dict.margin, "Translation overhang per side");
  cmd_gen_dict->add_option("-o,--output", gen_dict.output, "Output CSV path")->required();
  cmd_gen_dict->callback([&] { run_gen_dict(gen_dict); });

  GenSignalOptions gen_signal;
  auto* cmd_gen_signal = app.add_subcommand("gen-signal", "Generate a linear chirp signal");
  cmd_gen_signal->add_option("--chirp", gen_signal.chirp, "f0,t1,f1")->required();
  cmd_gen_signal->add_option("--grid", gen_signal.grid, "start,step,end")->required();
  cmd_gen_signal->add_option("-o,--output", gen_signal.output, "Output CSV path")->required();
  cmd_gen_signal->callback([&] { run_gen_signal(gen_signal); });

  DecomposeOptions decompose;
  auto* cmd_decompose = app.add_subcommand("decompose", "Forward OOMP decomposition");
  cmd_decompose->add_option("--signal", decompose.signal, "Signal CSV")->required();
  cmd_decompose->add_option("--dict", decompose.dict, "Dictionary CSV")->required();
  cmd_decompose->add_option("--max-atoms", decompose.max_atoms, "Atom budget (0: no cap)");
  cmd_decompose->add_option("--tol", decompose.tol, "Stop when the residual norm drops to this");
  cmd_decompose->add_option("--eps", decompose.eps, "Dependence threshold");
  cmd_decompose->add_option("--output-dir", decompose.output_dir, "Where to write results");
  cmd_decompose->callback([&] { run_decompose(decompose); });

  ShrinkOptions shrink;
  std::size_t shrink_target = 0;
  double shrink_budget = 0.0;
  auto* cmd_shrink = app.add_subcommand("shrink", "Backward (BOOMP) coefficient shrinking");
  cmd_shrink->add_option("--artifact", shrink.artifact, "decomposition.json from decompose")->required();
  cmd_shrink->add_option("--signal", shrink.signal, "Signal CSV")->required();
  cmd_shrink->add_option("--dict", shrink.dict, "Dictionary CSV")->required();
  auto* target_opt = cmd_shrink->add_option("--target-count", shrink_target, "Shrink to this many atoms");
  auto* budget_opt =
      cmd_shrink->add_option("--error-budget", shrink_budget, "Never let the residual norm exceed this");
  cmd_shrink->add_option("--criterion", shrink.criterion, "theorem1 | naive-abs-coeff");
  cmd_shrink->add_option("--eps", shrink.eps, "Dependence threshold for dual rebuilding");
  cmd_shrink->add_option("--output-dir", shrink.output_dir, "Where to write results");
  cmd_shrink->callback([&] {
    if (*target_opt) shrink.target_count = shrink_target;
    if (*budget_opt) shrink.error_budget = shrink_budget;
    run_shrink(shrink);
  });

  ReproduceOptions reproduce;
  int reproduce_rc = 0;
  auto* cmd_reproduce = app.add_subcommand("reproduce", "Run the chirp / Mexican-hat reference experiment");
  cmd_reproduce->add_option("--max-atoms", reproduce.max_atoms, "Forward atom budget");
  cmd_reproduce->add_option("--target-count", reproduce.target_count, "Backward target");
  cmd_reproduce->add_option("--output-dir", reproduce.output_dir, "Also write artifacts here");
  cmd_reproduce->add_flag("--verify", reproduce.verify, "Run oracle invariant checks");
  cmd_reproduce->add_option("--seed", reproduce.seed, "Reserved (the pipeline is deterministic)");
  cmd_reproduce->callback([&] { reproduce_rc = run_reproduce(reproduce); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pursuit::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const pursuit::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pursuit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return reproduce_rc;
}
