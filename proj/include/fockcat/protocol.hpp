#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fockcat/exec.hpp"
#include "fockcat/fock.hpp"

namespace fockcat {

/// Physical parameters of the heralded-resource / storage / beam-splitter /
/// homodyne-heralding model. Efficiencies and losses are probabilities.
struct ExperimentConfig {
  double eta = 0.15;        // heralding-channel efficiency; the resource states use this value
  double eta_f = 0.25;      // filtering part of eta (only the p3 scenario split uses it)
  double eta_apd = 0.6;     // APD part of eta
  double single_click_rate = 4.0e5;  // Hz
  double double_click_rate = 1.0e3;  // Hz
  double f_pump = 76.0e6;            // Hz
  double eta_prop = 0.06;   // loss before the memory cavity
  double eta_qmc = 0.01;    // loss per cavity round trip
  int n_stor_min = 9;
  int n_stor_max = 18;
  double r_hd = 0.24;       // homodyne inefficiency, modeled as loss on the heralding mode
  int truncation = kDefaultTruncation;
  double herald_halfwidth = 0.2;  // experimental acceptance window |X| <= w (rates)
  double tmsv_phase = 0.0;  // TMSV phase; the heralded mixtures do not depend on it
  double reflectivity = 0.72;  // operating point of the tunable beam splitter

  /// Throws DomainError on any violated invariant.
  void validate() const;
  int storage_window() const { return n_stor_max - n_stor_min + 1; }
};

/// The frozen "paper" profile.
ExperimentConfig paper_preset();

// ---- resource states -----------------------------------------------------------

/// r^2 = single-click rate / (eta f_pump).
double estimate_r_squared(const ExperimentConfig& config);

/// Double-click probabilities given two / three photons in the heralding arm.
double double_click_p2(double eta);
double double_click_p3(double eta);
/// p3 summed over its two scenarios (three photons transmitted, or exactly two).
double double_click_p3_scenarios(double eta_f, double eta_apd);

/// |1><1| + r^2 (2 - eta) |2><2|, normalized.
DensityMatrix heralded_single(double r2, double eta, int truncation);
/// p2 r^4 |2><2| + p3 r^6 |3><3|, normalized.
DensityMatrix heralded_double(double r2, double eta, int truncation);

/// Composite loss 1 - (1 - eta_prop)(1 - eta_qmc)^n_stor.
double storage_loss(int n_stor, const ExperimentConfig& config);

// ---- pipeline --------------------------------------------------------------------

struct SimulationOutput {
  DensityMatrix state;
  /// Window probability for w > 0, probability density at X = 0 for w = 0.
  double herald_acceptance = 0.0;
};

/// Odd branch: stored single photon (n_stor round trips) mixed with a heralded
/// photon pair on a beam splitter of reflectivity R, homodyne loss on mode 2,
/// herald |X_2| <= halfwidth.
SimulationOutput simulate_scss(const ExperimentConfig& config, double reflectivity, int n_stor,
                               double herald_halfwidth = 0.0);

/// Even branch: as simulate_scss but the second resource is also a heralded
/// single photon.
SimulationOutput simulate_even(const ExperimentConfig& config, double reflectivity, int n_stor,
                               double herald_halfwidth = 0.0);

SimulationOutput simulate_branch(const ExperimentConfig& config, double reflectivity, int n_stor, Parity branch,
                                 double herald_halfwidth = 0.0);

/// Uniform mean of the branch output over n_stor in [n_stor_min, n_stor_max].
DensityMatrix average_over_storage(const ExperimentConfig& config, double reflectivity,
                                   Parity branch = Parity::odd, double herald_halfwidth = 0.0,
                                   Exec exec = Exec::parallel);

/// (1 - 3 R)|1> - sqrt(6) R |3>, normalized: the lossless X = 0 herald of |1>|2>.
FockVector ideal_heralded_state(double reflectivity, int truncation);

// ---- closest SCSS -----------------------------------------------------------------

struct ClosestScssOptions {
  double alpha_max = 4.0;
  double alpha_step = 0.05;
  double z_max = 1.5;
  double z_step = 0.05;
  double refine_tol = 1e-4;
};

struct ClosestScss {
  ScssParams params;
  double fidelity = 0.0;
};

/// Maximizes <SCSS(alpha, z)|rho|SCSS(alpha, z)> over alpha >= 0, |z| <= z_max:
/// coarse grid (ties go to the smallest alpha) then Nelder-Mead refinement.
ClosestScss closest_scss(const DensityMatrix& rho, Parity parity = Parity::odd,
                         const ClosestScssOptions& options = {});

// ---- sweeps ------------------------------------------------------------------------

struct SweepRow {
  double reflectivity = 0.0;
  double fidelity = 0.0;
  double alpha = 0.0;
  double z = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  /// Row with the largest fidelity (first one on ties).
  const SweepRow& best() const;
};

struct SweepOptions {
  bool ideal = false;
  Parity parity = Parity::odd;
  /// Use a single storage time instead of averaging over the configured window.
  std::optional<int> fixed_n_stor;
  double herald_halfwidth = 0.0;
  ClosestScssOptions search;
};

/// One closest-SCSS fit per reflectivity. The grid must be strictly
/// increasing within [0, 1).
SweepResult sweep_reflectivity(const ExperimentConfig& config, const std::vector<double>& grid,
                               const SweepOptions& options = {}, Exec exec = Exec::parallel);

/// n evenly spaced points from lo to hi inclusive.
std::vector<double> reflectivity_grid(double lo, double hi, int n);

// ---- rates and decay ------------------------------------------------------------------

struct RateEstimate {
  double rate_hz = 0.0;
  double stored_photon_availability = 0.0;
  double herald_acceptance = 0.0;
};

/// double_click_rate * [1 - (1 - p1)^window] * acceptance(w), with
/// p1 = single_click_rate / f_pump and the acceptance averaged over the
/// storage window at config.reflectivity.
RateEstimate generation_rate(const ExperimentConfig& config, Exec exec = Exec::parallel);

struct DecayFit {
  double loss_per_round_trip = 0.0;
  double amplitude = 1.0;
};

/// Least-squares fit of log F(n) = log A + n log(1 - l).
DecayFit decay_fit(const std::vector<std::pair<int, double>>& points);

}  // namespace fockcat
