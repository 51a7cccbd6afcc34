// fockcat: command-line front end. Every command is deterministic given its
// flags, config and seed, and writes a manifest next to its first output.

#include <omp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fockcat/channels.hpp"
#include "fockcat/io.hpp"
#include "fockcat/protocol.hpp"
#include "fockcat/tomography.hpp"
#include "fockcat/wigner.hpp"

namespace fs = std::filesystem;
using namespace fockcat;
using io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config = "paper";
  int threads = 0;
  bool serial = false;
};

Exec exec_mode(const Common& c) { return c.serial ? Exec::serial : Exec::parallel; }

Parity parse_parity(const std::string& s) { return s == "even" ? Parity::even : Parity::odd; }

json scss_json(const ScssParams& p, double fidelity) {
  return json{{"alpha", p.alpha},
              {"z", p.z},
              {"squeezing_db", p.squeezing_db()},
              {"parity", p.parity == Parity::odd ? "odd" : "even"},
              {"fidelity", fidelity}};
}

class Manifest {
 public:
  Manifest(std::string command, int argc, char** argv) : start_(std::chrono::steady_clock::now()) {
    m_.command = std::move(command);
    m_.arguments.assign(argv + 1, argv + argc);
    m_.tool_version = FOCKCAT_VERSION;
  }
  io::RunManifest& get() { return m_; }
  void write() {
    if (m_.outputs.empty()) return;
    m_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    io::write_manifest(m_);
  }

 private:
  io::RunManifest m_;
  std::chrono::steady_clock::time_point start_;
};

// ---- sweep ----------------------------------------------------------------------------

struct SweepArgs {
  bool ideal = false;
  bool realistic = false;
  double r_min = 0.0;
  double r_max = 0.9;
  int steps = 91;
  std::string parity = "odd";
  std::optional<int> n_stor;
  double halfwidth = 0.0;
  std::string out = "sweep.csv";
};

int run_sweep(const SweepArgs& a, const Common& c, Manifest& manifest) {
  const auto cfg = io::load_config(c.config);
  SweepOptions opt;
  opt.ideal = a.ideal;
  opt.parity = parse_parity(a.parity);
  opt.fixed_n_stor = a.n_stor;
  opt.herald_halfwidth = a.halfwidth;
  const auto result = sweep_reflectivity(cfg.config, reflectivity_grid(a.r_min, a.r_max, a.steps), opt, exec_mode(c));
  io::write_sweep_csv(a.out, result);
  const auto& best = result.best();
  std::cout << "best R=" << best.reflectivity << " fidelity=" << best.fidelity << " alpha=" << best.alpha
            << " z=" << best.z << '\n';
  manifest.get().config_profile = cfg.profile;
  manifest.get().outputs.push_back(a.out);
  return 0;
}

// ---- simulate ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string parity = "odd";
  std::optional<double> reflectivity;
  std::optional<int> n_stor;
  double halfwidth = 0.0;
  double eps = 0.005;
  std::string out = "simulate.json";
  std::string wigner_csv;
};

int run_simulate(const SimulateArgs& a, const Common& c, Manifest& manifest) {
  const auto cfg = io::load_config(c.config);
  const double r = a.reflectivity.value_or(cfg.config.reflectivity);
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("--R must lie in [0, 1], got " + std::to_string(r));
  const Parity parity = parse_parity(a.parity);

  json report{{"command", "simulate"}, {"config_profile", cfg.profile}, {"R", r}, {"parity", a.parity}};
  DensityMatrix rho = [&] {
    if (a.n_stor) {
      const auto sim = simulate_branch(cfg.config, r, *a.n_stor, parity, a.halfwidth);
      report["n_stor"] = *a.n_stor;
      report["herald_acceptance"] = sim.herald_acceptance;
      return sim.state;
    }
    report["n_stor_range"] = {cfg.config.n_stor_min, cfg.config.n_stor_max};
    return average_over_storage(cfg.config, r, parity, a.halfwidth, exec_mode(c));
  }();
  report["herald_halfwidth"] = a.halfwidth;

  const auto fit = closest_scss(rho, parity);
  const auto grid = wigner(rho, GridSpec{}, exec_mode(c));
  report["closest_scss"] = scss_json(fit.params, fit.fidelity);
  report["negative_regions"] = count_negative_regions(grid, a.eps);
  report["negativity_threshold"] = a.eps;
  report["wigner_min"] = grid.min();
  report["state"] = io::density_to_json(rho);

  io::write_json(a.out, report);
  manifest.get().outputs.push_back(a.out);
  if (!a.wigner_csv.empty()) {
    io::write_wigner_csv(a.wigner_csv, grid);
    manifest.get().outputs.push_back(a.wigner_csv);
  }
  manifest.get().config_profile = cfg.profile;
  std::cout << "fidelity=" << fit.fidelity << " alpha=" << fit.params.alpha << " z=" << fit.params.z
            << " negative_regions=" << report["negative_regions"] << '\n';
  return 0;
}

// ---- sample -----------------------------------------------------------------------------

struct SampleArgs {
  std::string state_json;
  std::string parity = "odd";
  std::optional<double> reflectivity;
  double loss = 0.0;
  std::size_t n = 16339;
  std::uint64_t seed = 1;
  std::optional<double> theta;
  std::string out = "quadratures.csv";
};

int run_sample(const SampleArgs& a, const Common& c, Manifest& manifest) {
  std::string profile;
  DensityMatrix rho = [&] {
    if (!a.state_json.empty()) {
      const json j = io::read_json(a.state_json);
      manifest.get().inputs.push_back(a.state_json);
      return io::density_from_json(j.contains("state") ? j.at("state") : j);
    }
    const auto cfg = io::load_config(c.config);
    profile = cfg.profile;
    return average_over_storage(cfg.config, a.reflectivity.value_or(cfg.config.reflectivity), parse_parity(a.parity),
                                0.0, exec_mode(c));
  }();
  if (a.loss > 0.0) rho = apply_loss(rho, a.loss);
  const PhaseMode mode = a.theta ? PhaseMode::fixed(*a.theta) : PhaseMode::uniform();
  io::write_quadratures_csv(a.out, sample_quadratures(rho, a.n, a.seed, mode));
  manifest.get().config_profile = profile;
  manifest.get().seed = a.seed;
  manifest.get().outputs.push_back(a.out);
  return 0;
}

// ---- tomo -------------------------------------------------------------------------------

struct TomoArgs {
  std::string in;
  double efficiency = 1.0;
  int storage_roundtrips = 0;
  double loss_per_roundtrip = 0.01;
  double target_alpha = 2.47;
  double target_z = 0.56;
  std::string parity = "odd";
  int bootstrap = 0;
  std::uint64_t seed = 1;
  int truncation = kDefaultTruncation;
  int max_iterations = 20000;
  double tol = 1e-9;
  int phase_bins = 128;
  double x_width = 0.1;
  double eps = 0.005;
  std::string out = "tomo.json";
  std::string wigner_csv;
};

int run_tomo(const TomoArgs& a, const Common& c, Manifest& manifest) {
  TomographyJob job;
  job.records = io::read_quadratures_csv(a.in);
  job.truncation = a.truncation;
  job.efficiency_correction = correction_transmission(a.efficiency, a.storage_roundtrips, a.loss_per_roundtrip);
  job.max_iterations = a.max_iterations;
  job.convergence_tol = a.tol;
  job.binning.phase_bins = a.phase_bins;
  job.binning.x_width = a.x_width;
  const auto fit = maxlik_reconstruct(job, exec_mode(c));

  const ScssParams target{a.target_alpha, a.target_z, parse_parity(a.parity)};
  const double f = fidelity(fit.state, cat_state(target, a.truncation));
  const auto grid = wigner(fit.state, GridSpec{}, exec_mode(c));

  json report{{"command", "tomo"},
              {"records", job.records.size()},
              {"efficiency_correction", job.efficiency_correction},
              {"iterations", fit.iterations},
              {"converged", fit.converged},
              {"log_likelihood", fit.log_likelihood.back()},
              {"target", scss_json(target, f)},
              {"fidelity", f},
              {"negative_regions", count_negative_regions(grid, a.eps)},
              {"state", io::density_to_json(fit.state)}};
  if (a.bootstrap > 0) {
    BootstrapOptions bo;
    bo.efficiency_correction = job.efficiency_correction;
    bo.truncation = a.truncation;
    bo.max_iterations = a.max_iterations;
    bo.convergence_tol = a.tol;
    bo.binning = job.binning;
    const auto b = parametric_bootstrap(fit.state, job.records.size(), a.bootstrap, target, a.seed, bo, exec_mode(c));
    report["bootstrap"] = json{{"point_estimate", b.point_estimate},
                               {"lower", b.lower},
                               {"upper", b.upper},
                               {"n_repetitions", b.n_repetitions},
                               {"percentiles", {bo.lower_percentile, bo.upper_percentile}},
                               {"replicates", b.replicates}};
  }
  io::write_json(a.out, report);
  manifest.get().inputs.push_back(a.in);
  manifest.get().seed = a.seed;
  manifest.get().outputs.push_back(a.out);
  if (!a.wigner_csv.empty()) {
    io::write_wigner_csv(a.wigner_csv, grid);
    manifest.get().outputs.push_back(a.wigner_csv);
  }
  std::cout << "fidelity=" << f << " iterations=" << fit.iterations << (fit.converged ? "" : " (not converged)")
            << '\n';
  if (!fit.converged) {
    std::cerr << "fockcat: maximum likelihood did not converge in " << fit.iterations << " iterations\n";
    return kExitNumerical;
  }
  return 0;
}

// ---- rate / decay-fit / ingest ----------------------------------------------------------------

struct RateArgs {
  std::optional<int> n_stor_max;
  std::optional<double> halfwidth;
  std::string out;
};

int run_rate(const RateArgs& a, const Common& c, Manifest& manifest) {
  auto cfg = io::load_config(c.config);
  if (a.n_stor_max) cfg.config.n_stor_max = *a.n_stor_max;
  if (a.halfwidth) cfg.config.herald_halfwidth = *a.halfwidth;
  const auto rate = generation_rate(cfg.config, exec_mode(c));
  json report{{"command", "rate"},
              {"config_profile", cfg.profile},
              {"n_stor_min", cfg.config.n_stor_min},
              {"n_stor_max", cfg.config.n_stor_max},
              {"herald_halfwidth", cfg.config.herald_halfwidth},
              {"rate_hz", rate.rate_hz},
              {"stored_photon_availability", rate.stored_photon_availability},
              {"herald_acceptance", rate.herald_acceptance}};
  std::cout << "rate_hz=" << rate.rate_hz << '\n';
  if (!a.out.empty()) {
    io::write_json(a.out, report);
    manifest.get().outputs.push_back(a.out);
  }
  manifest.get().config_profile = cfg.profile;
  return 0;
}

struct DecayArgs {
  std::string in;
  std::string out;
};

int run_decay(const DecayArgs& a, Manifest& manifest) {
  const auto points = io::read_decay_csv(a.in);
  const auto fit = decay_fit(points);
  std::cout << "loss_per_round_trip=" << fit.loss_per_round_trip << '\n';
  if (!a.out.empty()) {
    io::write_json(a.out, json{{"command", "decay-fit"},
                               {"points", points.size()},
                               {"loss_per_round_trip", fit.loss_per_round_trip},
                               {"amplitude", fit.amplitude}});
    manifest.get().outputs.push_back(a.out);
  }
  manifest.get().inputs.push_back(a.in);
  return 0;
}

struct IngestArgs {
  std::string in;
  int truncation = kDefaultTruncation;
  double target_alpha = 2.47;
  double target_z = 0.56;
  std::string out;
};

int run_ingest(const IngestArgs& a, Manifest& manifest) {
  const auto rep = ingest_density_matrix_file(a.in, a.truncation);
  const ScssParams target{a.target_alpha, a.target_z, Parity::odd};
  const double f = fidelity(rep.state, cat_state(target, rep.state.truncation()));
  json report{{"command", "ingest"},
              {"source_dim", rep.source_dim},
              {"raw_trace", rep.raw_trace},
              {"hermiticity_deviation", rep.hermiticity_deviation},
              {"min_raw_eigenvalue", rep.min_raw_eigenvalue},
              {"max_eigenvalue_adjustment", rep.max_eigenvalue_adjustment},
              {"eigenvalues_floored", rep.eigenvalues_floored},
              {"target", scss_json(target, f)},
              {"state", io::density_to_json(rep.state)}};
  std::cout << "trace=" << rep.raw_trace << " max_adjustment=" << rep.max_eigenvalue_adjustment << " fidelity=" << f
            << '\n';
  if (!a.out.empty()) {
    io::write_json(a.out, report);
    manifest.get().outputs.push_back(a.out);
  }
  manifest.get().inputs.push_back(a.in);
  return 0;
}

// ---- check ------------------------------------------------------------------------------------

void check_json(const fs::path& path) {
  const json j = io::read_json(path);
  if (j.contains("re") && j.contains("im")) {
    io::density_from_json(j);
  } else if (j.contains("state")) {
    const auto rho = io::density_from_json(j.at("state"));
    if (!rho.is_valid()) throw ParseError(path.string() + ": embedded state is not a valid density matrix");
  } else if (j.contains("command") && j.contains("outputs")) {
    for (const auto& key : {"arguments", "seed", "tool_version", "wall_seconds"}) {
      if (!j.contains(key)) throw ParseError(path.string() + ": manifest lacks '" + key + "'");
    }
  } else if (!j.contains("command")) {
    throw ParseError(path.string() + ": unrecognized JSON artifact");
  }
}

int run_check(const std::vector<std::string>& files) {
  static const std::vector<std::vector<std::string>> headers = {
      {"x", "p", "w"}, {"R", "fidelity", "alpha", "z", "squeezing_db"}, {"x", "theta"}, {"n_stor", "fidelity"}};
  for (const auto& f : files) {
    const fs::path path(f);
    if (path.extension() == ".json") {
      check_json(path);
    } else {
      std::ifstream in(path);
      if (!in) throw ParseError("cannot open " + f);
      std::string header;
      std::getline(in, header);
      if (!header.empty() && header.back() == '\r') header.pop_back();
      bool matched = false;
      for (const auto& h : headers) {
        std::string joined;
        for (std::size_t i = 0; i < h.size(); ++i) joined += (i ? "," : "") + h[i];
        if (joined == header) {
          io::validate_csv(path, h);
          matched = true;
          break;
        }
      }
      if (!matched) throw ParseError(f + ":1: unknown CSV header '" + header + "'");
    }
    std::cout << "ok " << f << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-cat breeding simulator and homodyne tomography toolkit"};
  app.set_version_flag("--version", std::string(FOCKCAT_VERSION));
  Common common;
  std::vector<std::string> check_files;
  app.add_option("--check", check_files, "Re-validate existing output files against their schemas");
  app.add_option("--threads", common.threads, "OpenMP thread count (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--serial", common.serial, "Run every kernel on the serial reference path");

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Config profile name or JSON path")->capture_default_str();
  };

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Closest-SCSS fidelity as a function of reflectivity");
  auto* ideal_flag = sweep_cmd->add_flag("--ideal", sweep.ideal, "Lossless closed-form heralded state");
  auto* real_flag = sweep_cmd->add_flag("--realistic", sweep.realistic, "Full loss model (default)");
  ideal_flag->excludes(real_flag);
  add_config(sweep_cmd);
  sweep_cmd->add_option("--r-min", sweep.r_min)->capture_default_str();
  sweep_cmd->add_option("--r-max", sweep.r_max)->capture_default_str();
  sweep_cmd->add_option("--steps", sweep.steps)->capture_default_str()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--parity", sweep.parity)->check(CLI::IsMember({"odd", "even"}))->capture_default_str();
  sweep_cmd->add_option("--n-stor", sweep.n_stor, "Fixed storage time instead of the configured average");
  sweep_cmd->add_option("--herald-halfwidth", sweep.halfwidth)->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out)->capture_default_str();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate one operating point and analyse the output state");
  add_config(sim_cmd);
  sim_cmd->add_option("--parity", sim.parity)->check(CLI::IsMember({"odd", "even"}))->capture_default_str();
  sim_cmd->add_option("--R", sim.reflectivity, "Beam-splitter reflectivity (default: config)");
  sim_cmd->add_option("--n-stor", sim.n_stor, "Fixed storage time instead of the configured average");
  sim_cmd->add_option("--herald-halfwidth", sim.halfwidth)->capture_default_str();
  sim_cmd->add_option("--eps", sim.eps, "Wigner negativity threshold")->capture_default_str();
  sim_cmd->add_option("--out", sim.out)->capture_default_str();
  sim_cmd->add_option("--wigner", sim.wigner_csv, "Also write the Wigner grid as CSV");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw synthetic homodyne records");
  add_config(sample_cmd);
  sample_cmd->add_option("--state", sample.state_json, "Density-matrix JSON (default: simulate from config)");
  sample_cmd->add_option("--parity", sample.parity)->check(CLI::IsMember({"odd", "even"}))->capture_default_str();
  sample_cmd->add_option("--R", sample.reflectivity);
  sample_cmd->add_option("--loss", sample.loss, "Photon loss applied before detection")->check(CLI::Range(0.0, 1.0));
  sample_cmd->add_option("-n,--samples", sample.n)->capture_default_str();
  sample_cmd->add_option("--seed", sample.seed)->capture_default_str();
  sample_cmd->add_option("--theta", sample.theta, "Fixed LO phase (default: uniform)");
  sample_cmd->add_option("--out", sample.out)->capture_default_str();

  TomoArgs tomo;
  auto* tomo_cmd = app.add_subcommand("tomo", "Maximum-likelihood reconstruction from x,theta records");
  tomo_cmd->add_option("--in", tomo.in)->required();
  tomo_cmd->add_option("--efficiency", tomo.efficiency)->capture_default_str();
  tomo_cmd->add_option("--storage-roundtrips", tomo.storage_roundtrips)->capture_default_str();
  tomo_cmd->add_option("--loss-per-roundtrip", tomo.loss_per_roundtrip)->capture_default_str();
  tomo_cmd->add_option("--target-alpha", tomo.target_alpha)->capture_default_str();
  tomo_cmd->add_option("--target-z", tomo.target_z)->capture_default_str();
  tomo_cmd->add_option("--parity", tomo.parity)->check(CLI::IsMember({"odd", "even"}))->capture_default_str();
  tomo_cmd->add_option("--bootstrap", tomo.bootstrap, "Parametric bootstrap repetitions (0 = off)");
  tomo_cmd->add_option("--seed", tomo.seed)->capture_default_str();
  tomo_cmd->add_option("--truncation", tomo.truncation)->capture_default_str();
  tomo_cmd->add_option("--max-iterations", tomo.max_iterations)->capture_default_str();
  tomo_cmd->add_option("--tol", tomo.tol, "Log-likelihood gain per record that ends the iteration")
      ->capture_default_str();
  tomo_cmd->add_option("--phase-bins", tomo.phase_bins)->capture_default_str();
  tomo_cmd->add_option("--x-width", tomo.x_width)->capture_default_str();
  tomo_cmd->add_option("--eps", tomo.eps)->capture_default_str();
  tomo_cmd->add_option("--out", tomo.out)->capture_default_str();
  tomo_cmd->add_option("--wigner", tomo.wigner_csv);

  RateArgs rate;
  auto* rate_cmd = app.add_subcommand("rate", "Generation-rate estimate");
  add_config(rate_cmd);
  rate_cmd->add_option("--n-stor-max", rate.n_stor_max);
  rate_cmd->add_option("--herald-halfwidth", rate.halfwidth);
  rate_cmd->add_option("--out", rate.out);

  DecayArgs decay;
  auto* decay_cmd = app.add_subcommand("decay-fit", "Loss per round trip from n_stor,fidelity data");
  decay_cmd->add_option("--in", decay.in)->required();
  decay_cmd->add_option("--out", decay.out);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load a published density matrix and make it physical");
  ingest_cmd->add_option("--in", ingest.in)->required();
  ingest_cmd->add_option("--truncation", ingest.truncation)->capture_default_str();
  ingest_cmd->add_option("--target-alpha", ingest.target_alpha)->capture_default_str();
  ingest_cmd->add_option("--target-z", ingest.target_z)->capture_default_str();
  ingest_cmd->add_option("--out", ingest.out);

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (common.threads > 0) omp_set_num_threads(common.threads);

  try {
    if (!check_files.empty()) return run_check(check_files);
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitUsage;
    }
    const CLI::App* sub = app.get_subcommands().front();
    Manifest manifest(sub->get_name(), argc, argv);
    int code = 0;
    if (sub == sweep_cmd) code = run_sweep(sweep, common, manifest);
    else if (sub == sim_cmd) code = run_simulate(sim, common, manifest);
    else if (sub == sample_cmd) code = run_sample(sample, common, manifest);
    else if (sub == tomo_cmd) code = run_tomo(tomo, common, manifest);
    else if (sub == rate_cmd) code = run_rate(rate, common, manifest);
    else if (sub == decay_cmd) code = run_decay(decay, manifest);
    else if (sub == ingest_cmd) code = run_ingest(ingest, manifest);
    manifest.write();
    return code;
  } catch (const ConvergenceError& e) {
    std::cerr << "fockcat: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DegenerateOutcomeError& e) {
    std::cerr << "fockcat: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    // Domain, parse, dimension and truncation errors all trace back to the inputs.
    std::cerr << "fockcat: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "fockcat: " << e.what() << '\n';
    return kExitNumerical;
  }
}
