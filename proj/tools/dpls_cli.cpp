#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "dpls/cost.hpp"
#include "dpls/detector.hpp"
#include "dpls/errors.hpp"
#include "dpls/evaluate.hpp"
#include "dpls/hull.hpp"
#include "dpls/io.hpp"
#include "dpls/oracle.hpp"
#include "dpls/preprocess.hpp"
#include "dpls/simulate.hpp"

namespace {

using namespace dpls;

struct DetectFlags {
  std::optional<double> beta, lambda, sigma2, mu0;
  double penalty_scale = 1.0;
  int m_max = 20;
  CellIndex n_stride = 1;
  double xi_scale = 1.0;
  bool faithful = false;
  bool two_pass = false;
  int workers = 1;

  void add(CLI::App* app) {
    app->add_option("--beta", beta, "Per-anomaly penalty");
    app->add_option("--lambda", lambda, "Per-hull-point penalty (default beta / n)");
    app->add_option("--sigma2", sigma2, "Noise variance (default MAD estimate)");
    app->add_option("--mu0", mu0, "Baseline mean (default median)");
    app->add_option("--penalty-scale", penalty_scale, "Multiplies beta and lambda")->capture_default_str();
    app->add_option("--m-max", m_max, "Largest number of regions searched")->capture_default_str();
    app->add_option("--n-stride", n_stride, "Step between evaluated N values")->capture_default_str();
    app->add_option("--xi-scale", xi_scale, "Multiplies the region size threshold xi_m")->capture_default_str();
    app->add_flag("--faithful", faithful, "Search m up to N with stride 1");
    app->add_flag("--two-pass", two_pass, "Re-estimate mu0 on the detected baseline and detect again");
    app->add_option("--workers", workers, "Worker threads")->capture_default_str();
  }

  DetectorConfig config() const {
    DetectorConfig c;
    c.beta = beta;
    c.lambda = lambda;
    c.sigma2 = sigma2;
    c.mu0 = mu0;
    c.penalty_scale = penalty_scale;
    c.m_max = m_max;
    c.n_stride = n_stride;
    c.xi_scale = xi_scale;
    c.faithful = faithful;
    c.two_pass = two_pass;
    c.workers = workers;
    return c;
  }
};

struct SimFlags {
  std::string setting = "1";
  CellIndex n = 400;
  double delta = 3.0;
  CellIndex area = 125;
  std::optional<double> zeta;
  std::optional<double> jitter;
  std::uint64_t seed = 1;
  double sigma = 1.0;
  std::optional<int> separation;
  int smooth_k = 6;

  void add(CLI::App* app) {
    app->add_option("--setting", setting, "1, 2, 3 or 3d")->capture_default_str();
    app->add_option("--n", n, "Number of cells (square, or cube for 3d)")->capture_default_str();
    app->add_option("--delta", delta, "Minimal mean shift")->capture_default_str();
    app->add_option("--area", area, "Total anomaly area")->capture_default_str();
    app->add_option("--zeta", zeta, "Correlation decay of dependent errors");
    app->add_option("--jitter", jitter, "Boundary jitter probability");
    app->add_option("--seed", seed, "Seed")->capture_default_str();
    app->add_option("--sigma", sigma, "Noise standard deviation")->capture_default_str();
    app->add_option("--separation", separation, "Minimum distance between regions");
    app->add_option("--smooth-k", smooth_k, "Smoothness bound K")->capture_default_str();
  }

  SimSetting setting_value() const {
    SimSetting s = make_setting(parse_setting(setting), n, delta, area, seed);
    s.zeta = zeta;
    s.jitter_prob = jitter;
    s.sigma = sigma;
    s.separation = separation;
    s.smooth_k = smooth_k;
    return s;
  }
};

void print_breakdown(const CostBreakdown& b) {
  std::cerr << "loss_baseline  " << b.loss_baseline << "\n"
            << "loss_anomalies " << b.loss_anomalies << "\n"
            << "penalty_count  " << b.penalty_count << "\n"
            << "penalty_hull   " << b.penalty_hull << "\n"
            << "total          " << b.total << "\n";
}

void emit(const Json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(out, j);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial anomaly detection by double-penalised least squares"};
  app.require_subcommand(1);

  // simulate
  SimFlags sim;
  std::string sim_out, sim_truth;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic field and its ground truth");
  sim.add(simulate);
  simulate->add_option("--out", sim_out, "Grid CSV output")->required();
  simulate->add_option("--truth", sim_truth, "Ground-truth JSON output");

  // detect
  DetectFlags det;
  std::string det_in, det_out;
  bool explain = false, surface = false;
  std::optional<std::uint64_t> ignored_seed;
  auto* detect_cmd = app.add_subcommand("detect", "Detect anomaly regions in a grid CSV");
  detect_cmd->add_option("input", det_in, "Grid CSV")->required();
  det.add(detect_cmd);
  detect_cmd->add_option("--out", det_out, "Result JSON (default stdout)");
  detect_cmd->add_flag("--explain-cost", explain, "Print the cost breakdown and per-region hull terms");
  detect_cmd->add_flag("--emit-cost-surface", surface, "Include the (m, N) cost surface");
  detect_cmd->add_option("--seed", ignored_seed, "Accepted and ignored; detection is deterministic");

  // bench
  SimFlags bsim;
  DetectFlags bdet;
  int B = 50;
  std::string b_out, b_freq, b_pgm;
  bool timings = false;
  auto* bench = app.add_subcommand("bench", "Monte Carlo benchmark on a simulated setting");
  bsim.add(bench);
  bdet.add(bench);
  bench->add_option("--B", B, "Replicates")->capture_default_str();
  bench->add_option("--out", b_out, "Report JSON (default stdout)");
  bench->add_option("--freq-map", b_freq, "Per-cell detection counts (grid CSV layout)");
  bench->add_option("--pgm", b_pgm, "Detection frequency heat map (8-bit PGM)");
  bench->add_flag("--timings", timings, "Record per-replicate runtimes in the report");

  // hull
  std::string hull_in;
  auto* hull = app.add_subcommand("hull", "Convex hull and enclosed lattice points of a region JSON");
  hull->add_option("input", hull_in, "Region JSON")->required();

  // oracle
  std::string or_in, or_out;
  double or_beta = 0, or_lambda = 0, or_sigma2 = 1, or_mu0 = 0;
  int or_labels = 2;
  std::optional<int> or_k;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive minimiser for grids of at most 16 cells");
  oracle->add_option("input", or_in, "Grid CSV")->required();
  oracle->add_option("--beta", or_beta)->required();
  oracle->add_option("--lambda", or_lambda)->required();
  oracle->add_option("--sigma2", or_sigma2)->capture_default_str();
  oracle->add_option("--mu0", or_mu0)->capture_default_str();
  oracle->add_option("--max-labels", or_labels)->capture_default_str();
  oracle->add_option("--smooth-k", or_k, "Restrict anomalies to the smooth class R_K");
  oracle->add_option("--out", or_out, "Result JSON (default stdout)");

  // preprocess
  std::string pre_in, pre_out, pre_stack_out, pre_window = "month";
  bool pre_detrend = false;
  auto* pre = app.add_subcommand("preprocess", "Detrend a raster stack and reduce it to a max composite");
  pre->add_option("input", pre_in, "Raster stack file")->required();
  pre->add_flag("--detrend", pre_detrend, "Remove a per-cell linear trend first");
  pre->add_option("--window", pre_window, "'month' or a window length in days")->capture_default_str();
  pre->add_option("--out", pre_out, "Composite grid CSV")->required();
  pre->add_option("--stack-out", pre_stack_out, "Write the (detrended) stack too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      const SimSetting s = sim.setting_value();
      const GroundTruth truth = make_truth(s);
      const Field f = s.zeta ? sample_dependent_field(truth, s.sigma, *s.zeta, s.seed)
                             : sample_field(truth, s.sigma, s.seed);
      save_grid(sim_out, f);
      if (!sim_truth.empty()) write_json(sim_truth, truth_to_json(truth, s));
    } else if (*detect_cmd) {
      const Field f = load_grid(det_in);
      DetectorConfig cfg = det.config();
      cfg.keep_surface = surface;
      const DetectionResult r = detect(f, cfg);
      if (explain) print_breakdown(r.best_cost);
      emit(result_to_json(r, explain), det_out);
    } else if (*bench) {
      const SimSetting s = bsim.setting_value();
      McOptions opts;
      opts.workers = bdet.workers;
      const McReport rep = run_monte_carlo(s, bdet.config(), B, opts);
      emit(report_to_json(rep, timings), b_out);
      if (!b_freq.empty()) save_count_map(b_freq, s.grid, rep.freq_map);
      if (!b_pgm.empty()) save_pgm(b_pgm, s.grid, rep.freq_map, rep.B);
    } else if (*hull) {
      const Region r = region_from_json(read_json(hull_in));
      std::cout << hull_to_json(convex_hull(r), hull_cardinality(r)).dump(2) << '\n';
    } else if (*oracle) {
      const Field f = load_grid(or_in);
      const CostParams p{or_beta, or_lambda, or_sigma2, or_mu0};
      const OracleResult r = exact_minimise(f, p, or_labels, or_k);
      Json regions = Json::array();
      for (const auto& a : r.best_partition.anomalies()) regions.push_back(region_to_json(a));
      emit(Json{{"m_hat", r.best_partition.m()},
                {"best_cost", breakdown_to_json(r.best_cost)},
                {"enumerated", r.enumerated},
                {"regions", regions}},
           or_out);
    } else if (*pre) {
      RasterStack st = load_stack(pre_in);
      if (pre_detrend) st = detrend_linear(st);
      if (!pre_stack_out.empty()) save_stack(pre_stack_out, st);
      Window w;
      if (pre_window != "month") {
        w.kind = Window::Kind::fixed_days;
        try {
          w.days = std::stoi(pre_window);
        } catch (const std::exception&) {
          throw InputError("--window must be 'month' or a number of days");
        }
      }
      save_grid(pre_out, max_composite(st, w));
    }
  } catch (const DegenerateScaleError& e) {
    std::cerr << "error: " << e.what() << " (median " << e.mu0() << "); pass --sigma2 explicitly\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
