#include "fockcat/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fockcat/channels.hpp"
#include "fockcat/optimize.hpp"

namespace fockcat {

namespace {

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << "config: " << name << " must lie in [0, 1], got " << v;
    throw DomainError(msg.str());
  }
}

void require_resource_validity(double r2, double eta) {
  if (!(r2 >= 0.0) || !(r2 * (2.0 - eta) < 1.0)) {
    throw DomainError("heralded resource: r^2 (2 - eta) must lie in [0, 1)");
  }
}

// Lower bound on alpha for odd targets; alpha = 0 itself is the zero vector.
constexpr double kOddAlphaFloor = 1e-6;

double target_fidelity(const DensityMatrix& rho, double alpha, double z, Parity parity) {
  const double a = parity == Parity::odd ? std::max(std::abs(alpha), kOddAlphaFloor) : std::abs(alpha);
  return fidelity(rho, cat_state({a, z, parity}, rho.truncation()));
}

}  // namespace

void ExperimentConfig::validate() const {
  require_probability(eta, "eta");
  require_probability(eta_f, "eta_f");
  require_probability(eta_apd, "eta_apd");
  require_probability(eta_prop, "eta_prop");
  require_probability(eta_qmc, "eta_qmc");
  require_probability(r_hd, "r_hd");
  if (!(single_click_rate >= 0.0) || !(double_click_rate >= 0.0) || !(f_pump > 0.0)) {
    throw DomainError("config: click rates must be >= 0 and f_pump > 0");
  }
  if (n_stor_min < 0 || n_stor_min > n_stor_max) {
    throw DomainError("config: need 0 <= n_stor_min <= n_stor_max");
  }
  if (truncation < 4) throw DomainError("config: truncation must be >= 4");
  if (!(herald_halfwidth >= 0.0)) throw DomainError("config: herald_halfwidth must be >= 0");
  require_probability(reflectivity, "reflectivity");
}

ExperimentConfig paper_preset() { return ExperimentConfig{}; }

// ---- resource states -----------------------------------------------------------------

double estimate_r_squared(const ExperimentConfig& config) {
  if (!(config.eta > 0.0) || !(config.f_pump > 0.0)) {
    throw DomainError("estimate_r_squared: eta and f_pump must be positive");
  }
  return config.single_click_rate / (config.eta * config.f_pump);
}

double double_click_p2(double eta) { return 0.5 * eta * eta; }

double double_click_p3(double eta) { return 1.5 * eta * eta * (1.0 - 0.5 * eta); }

double double_click_p3_scenarios(double eta_f, double eta_apd) {
  const double all_three = 0.75 * eta_f * eta_f * eta_f * eta_apd * (1.0 - (1.0 - eta_apd) * (1.0 - eta_apd));
  const double two_pass = 3.0 * eta_f * eta_f * (1.0 - eta_f) * 0.5 * eta_apd * eta_apd;
  return all_three + two_pass;
}

DensityMatrix heralded_single(double r2, double eta, int truncation) {
  require_resource_validity(r2, eta);
  return DensityMatrix::diagonal({0.0, 1.0, r2 * (2.0 - eta)}, truncation);
}

DensityMatrix heralded_double(double r2, double eta, int truncation) {
  require_resource_validity(r2, eta);
  if (!(eta > 0.0)) throw DomainError("heralded_double: eta must be positive");
  // p2 r^4 |2><2| + p3 r^6 |3><3|, divided through by p2 r^4.
  const double ratio = double_click_p3(eta) / double_click_p2(eta) * r2;
  return DensityMatrix::diagonal({0.0, 0.0, 1.0, ratio}, truncation);
}

double storage_loss(int n_stor, const ExperimentConfig& config) {
  if (n_stor < 0) throw DomainError("storage_loss: n_stor must be >= 0");
  return 1.0 - (1.0 - config.eta_prop) * std::pow(1.0 - config.eta_qmc, n_stor);
}

// ---- pipeline --------------------------------------------------------------------------

namespace {

SimulationOutput simulate_with(const ExperimentConfig& config, const CMatrix& mixer, int n_stor, Parity branch,
                               double halfwidth) {
  const int n = config.truncation;
  const double r2 = estimate_r_squared(config);
  const DensityMatrix stored = apply_loss(heralded_single(r2, config.eta, n), storage_loss(n_stor, config));
  const DensityMatrix second_raw =
      branch == Parity::odd ? heralded_double(r2, config.eta, n) : heralded_single(r2, config.eta, n);
  const DensityMatrix second = apply_loss(second_raw, storage_loss(1, config));
  const DensityMatrix mixed = apply_unitary(mixer, DensityMatrix::product(stored, second));
  const DensityMatrix detected = apply_loss_on_mode(mixed, 2, config.r_hd);
  HeraldResult herald = herald_project(detected, HeraldSpec{2, halfwidth});
  return SimulationOutput{std::move(herald.state), herald.acceptance};
}

}  // namespace

SimulationOutput simulate_branch(const ExperimentConfig& config, double reflectivity, int n_stor, Parity branch,
                                 double herald_halfwidth) {
  config.validate();
  const CMatrix mixer = beam_splitter_unitary(BeamSplitterSpec(reflectivity), config.truncation);
  return simulate_with(config, mixer, n_stor, branch, herald_halfwidth);
}

SimulationOutput simulate_scss(const ExperimentConfig& config, double reflectivity, int n_stor,
                               double herald_halfwidth) {
  return simulate_branch(config, reflectivity, n_stor, Parity::odd, herald_halfwidth);
}

SimulationOutput simulate_even(const ExperimentConfig& config, double reflectivity, int n_stor,
                               double herald_halfwidth) {
  return simulate_branch(config, reflectivity, n_stor, Parity::even, herald_halfwidth);
}

DensityMatrix average_over_storage(const ExperimentConfig& config, double reflectivity, Parity branch,
                                   double herald_halfwidth, Exec exec) {
  config.validate();
  const CMatrix mixer = beam_splitter_unitary(BeamSplitterSpec(reflectivity), config.truncation);
  const int count = config.storage_window();
  std::vector<CMatrix> terms(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic) if (use_threads(exec))
  for (int i = 0; i < count; ++i) {
    terms[static_cast<std::size_t>(i)] =
        simulate_with(config, mixer, config.n_stor_min + i, branch, herald_halfwidth).state.elements();
  }
  CMatrix mean = CMatrix::Zero(terms.front().rows(), terms.front().cols());
  for (const auto& t : terms) mean += t;
  mean /= static_cast<double>(count);
  return DensityMatrix(std::move(mean), 1, config.truncation).normalized();
}

FockVector ideal_heralded_state(double reflectivity, int truncation) {
  if (truncation < 3) throw TruncationError("ideal_heralded_state: truncation must be >= 3");
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
    throw DomainError("ideal_heralded_state: reflectivity must lie in [0, 1]");
  }
  CVector v = CVector::Zero(truncation + 1);
  v(1) = 1.0 - 3.0 * reflectivity;
  v(3) = -std::sqrt(6.0) * reflectivity;
  return FockVector(std::move(v), truncation).normalized();
}

// ---- closest SCSS ------------------------------------------------------------------------

ClosestScss closest_scss(const DensityMatrix& rho, Parity parity, const ClosestScssOptions& options) {
  if (rho.modes() != 1) throw DimensionError("closest_scss: single-mode state required");
  const int n_alpha = static_cast<int>(std::lround(options.alpha_max / options.alpha_step)) + 1;
  const int n_z = static_cast<int>(std::lround(2.0 * options.z_max / options.z_step)) + 1;

  double best_f = -1.0;
  double best_alpha = 0.0;
  double best_z = 0.0;
  for (int i = 0; i < n_alpha; ++i) {
    const double alpha = i * options.alpha_step;
    if (parity == Parity::odd && alpha == 0.0) continue;
    for (int j = 0; j < n_z; ++j) {
      const double z = -options.z_max + j * options.z_step;
      const double f = target_fidelity(rho, alpha, z, parity);
      if (f > best_f) {
        best_f = f;
        best_alpha = alpha;
        best_z = z;
      }
    }
  }

  const double z_max = options.z_max;
  auto objective = [&](const std::vector<double>& p) {
    const double z = std::clamp(p[1], -z_max, z_max);
    return -target_fidelity(rho, p[0], z, parity);
  };
  optimize::NelderMeadOptions nm;
  nm.initial_step = 0.5 * std::min(options.alpha_step, options.z_step);
  nm.xtol = options.refine_tol;
  nm.ftol = 1e-13;
  const auto refined = optimize::nelder_mead(objective, {best_alpha, best_z}, nm);

  ClosestScss out;
  if (-refined.value >= best_f) {
    double alpha = std::abs(refined.x[0]);
    if (parity == Parity::odd) alpha = std::max(alpha, kOddAlphaFloor);
    out.params = {alpha, std::clamp(refined.x[1], -z_max, z_max), parity};
    out.fidelity = -refined.value;
  } else {
    out.params = {best_alpha, best_z, parity};
    out.fidelity = best_f;
  }
  return out;
}

// ---- sweeps --------------------------------------------------------------------------------

const SweepRow& SweepResult::best() const {
  if (rows.empty()) throw DomainError("SweepResult::best: empty sweep");
  auto it = std::max_element(rows.begin(), rows.end(),
                             [](const SweepRow& a, const SweepRow& b) { return a.fidelity < b.fidelity; });
  return *it;
}

std::vector<double> reflectivity_grid(double lo, double hi, int n) {
  if (n < 1) throw DomainError("reflectivity_grid: need at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

SweepResult sweep_reflectivity(const ExperimentConfig& config, const std::vector<double>& grid,
                               const SweepOptions& options, Exec exec) {
  config.validate();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] < 1.0)) throw DomainError("sweep: reflectivities must lie in [0, 1)");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("sweep: grid must be strictly increasing");
  }
  SweepResult result;
  result.rows.resize(grid.size());
  const auto count = static_cast<int>(grid.size());
#pragma omp parallel for schedule(dynamic) if (use_threads(exec))
  for (int i = 0; i < count; ++i) {
    const double r = grid[static_cast<std::size_t>(i)];
    DensityMatrix rho = [&] {
      if (options.ideal) return DensityMatrix::pure(ideal_heralded_state(r, config.truncation));
      if (options.fixed_n_stor) {
        return simulate_branch(config, r, *options.fixed_n_stor, options.parity, options.herald_halfwidth).state;
      }
      return average_over_storage(config, r, options.parity, options.herald_halfwidth, Exec::serial);
    }();
    const ClosestScss fit = closest_scss(rho, options.ideal ? Parity::odd : options.parity, options.search);
    result.rows[static_cast<std::size_t>(i)] = SweepRow{r, fit.fidelity, fit.params.alpha, fit.params.z};
  }
  return result;
}

// ---- rates and decay -------------------------------------------------------------------------

RateEstimate generation_rate(const ExperimentConfig& config, Exec exec) {
  config.validate();
  RateEstimate out;
  const double p1 = config.single_click_rate / config.f_pump;
  out.stored_photon_availability = 1.0 - std::pow(1.0 - p1, config.storage_window());
  if (config.herald_halfwidth == 0.0) return out;  // measure-zero window

  const CMatrix mixer = beam_splitter_unitary(BeamSplitterSpec(config.reflectivity), config.truncation);
  const int count = config.storage_window();
  std::vector<double> acceptance(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic) if (use_threads(exec))
  for (int i = 0; i < count; ++i) {
    acceptance[static_cast<std::size_t>(i)] =
        simulate_with(config, mixer, config.n_stor_min + i, Parity::odd, config.herald_halfwidth).herald_acceptance;
  }
  double sum = 0.0;
  for (double a : acceptance) sum += a;
  out.herald_acceptance = sum / count;
  out.rate_hz = config.double_click_rate * out.stored_photon_availability * out.herald_acceptance;
  return out;
}

DecayFit decay_fit(const std::vector<std::pair<int, double>>& points) {
  if (points.size() < 3) throw DomainError("decay_fit: need at least 3 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, f] : points) {
    if (!(f > 0.0) || f > 1.0) throw DomainError("decay_fit: fidelities must lie in (0, 1]");
    const double y = std::log(f);
    sx += n;
    sy += y;
    sxx += static_cast<double>(n) * n;
    sxy += n * y;
  }
  const double m = static_cast<double>(points.size());
  const double denom = m * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw DomainError("decay_fit: need at least two distinct storage times");
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  return DecayFit{1.0 - std::exp(slope), std::exp(intercept)};
}

}  // namespace fockcat
