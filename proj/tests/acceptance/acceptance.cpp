// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fockcat/channels.hpp"
#include "fockcat/protocol.hpp"
#include "fockcat/tomography.hpp"
#include "fockcat/wigner.hpp"

using namespace fockcat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Headline simulation shared by criteria 6-8: paper_preset(), R = 0.72,
// storage-averaged over the configured window, X = 0 herald.
const DensityMatrix& headline_state() {
  static const DensityMatrix rho = average_over_storage(paper_preset(), 0.72, Parity::odd, 0.0, Exec::serial);
  return rho;
}

// Detector efficiency times 15 round trips of storage.
const double kCorrection = correction_transmission(0.76, 15);
constexpr std::size_t kPaperSamples = 16339;

Outcome closed_form_herald() {
  Timer t;
  ExperimentConfig c = paper_preset();
  c.eta_prop = c.eta_qmc = c.r_hd = 0.0;
  c.single_click_rate = 0.0;
  double worst = 1.0;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.9 * i / 19.0;
    const auto out = simulate_scss(c, r, 0);
    CVector v = CVector::Zero(c.truncation + 1);
    v(1) = 1 - 3 * r;
    v(3) = -std::sqrt(6.0) * r;
    worst = std::min(worst, fidelity(out.state, FockVector(v / v.norm(), c.truncation)));
  }
  const double secs = t.seconds();
  return {worst > 1 - 1e-6 && secs < 5.0, fmt("min fidelity %.12f over 20 R values, %.2f s", worst, secs)};
}

Outcome headline_sweep() {
  Timer t;
  SweepOptions opt;
  const auto sweep = sweep_reflectivity(paper_preset(), reflectivity_grid(0.5, 0.9, 41), opt, Exec::serial);
  const auto& b = sweep.best();
  const double db = ScssParams{b.alpha, b.z, Parity::odd}.squeezing_db();
  const double secs = t.seconds();
  const bool ok = within(b.fidelity, 0.57, 0.02) && within(b.reflectivity, 0.72, 0.03) && within(b.alpha, 2.47, 0.10) &&
                  within(b.z, 0.56, 0.05) && within(db, 4.82, 0.4) && secs < 600;
  return {ok, fmt("max F=%.4f at R=%.2f, alpha=%.3f, z=%.3f (%.2f dB), %.0f s", b.fidelity, b.reflectivity, b.alpha,
                  b.z, db, secs)};
}

Outcome even_branch() {
  Timer t;
  const auto rho = average_over_storage(paper_preset(), 0.72, Parity::even, 0.0, Exec::serial);
  const auto fit = closest_scss(rho, Parity::even);
  const double db = fit.params.squeezing_db();
  const double secs = t.seconds();
  const bool ok = within(fit.fidelity, 0.61, 0.03) && within(fit.params.alpha, 1.71, 0.10) && within(db, 3.90, 0.4) &&
                  secs < 60;
  return {ok, fmt("F=%.4f, alpha=%.3f, %.2f dB, %.1f s", fit.fidelity, fit.params.alpha, db, secs)};
}

Outcome constants() {
  const double r = retardance_to_reflectivity(2.03);
  const double storage = 1 - std::pow(0.99, 15);
  const double r2 = estimate_r_squared(paper_preset());
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double ef = u(rng), ea = u(rng);
    worst = std::max(worst, std::abs(double_click_p3(ef * ea) - double_click_p3_scenarios(ef, ea)));
  }
  const bool ok = within(r, 0.721, 0.001) && within(storage, 0.1399, 0.0001) && within(r2, 0.0351, 0.0002) &&
                  worst <= 1e-12;
  return {ok, fmt("R(2.03)=%.4f, storage=%.5f, r2=%.5f, p3 max diff=%.1e", r, storage, r2, worst)};
}

Outcome ideal_curve() {
  SweepOptions opt;
  opt.ideal = true;
  const auto grid = reflectivity_grid(0.0, 0.8, 81);
  const auto s = sweep_reflectivity(paper_preset(), grid, opt, Exec::serial);
  const bool limit = s.rows.front().fidelity >= 0.999;
  // Interior local minima of the fidelity column.
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < s.rows.size(); ++i) {
    if (s.rows[i].fidelity < s.rows[i - 1].fidelity && s.rows[i].fidelity <= s.rows[i + 1].fidelity) {
      minima.push_back(s.rows[i].reflectivity);
    }
  }
  const bool dip = std::any_of(minima.begin(), minima.end(), [](double r) { return within(r, 1.0 / 3.0, 0.02); });
  int decreases = 0;
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    const double step = s.rows[i].alpha - s.rows[i - 1].alpha;
    if (step < 0) {
      ++decreases;
      worst_drop = std::min(worst_drop, step);
    }
  }
  std::ostringstream mins;
  for (double m : minima) mins << (mins.tellp() ? "," : "") << m;
  const auto at_third = closest_scss(DensityMatrix::pure(ideal_heralded_state(1.0 / 3.0, 20)));
  return {limit && dip && decreases == 0,
          fmt("F(0)=%.6f; local minima at R=[%s] (F=%.4f), F(1/3)=%.4f; alpha decreases at %d of 80 steps "
              "(largest drop %.3f)",
              s.rows.front().fidelity, mins.str().c_str(),
              minima.empty() ? 0.0 : s.rows[static_cast<std::size_t>(std::lround(minima.front() * 100))].fidelity,
              at_third.fidelity, decreases, worst_drop)};
}

Outcome tomography_closed_loop() {
  // The single-dataset fidelity scatters by a few percent with the seed, so
  // the criterion is evaluated on the median of five independent datasets.
  Timer t;
  const auto& rho = headline_state();
  const QuadratureSampler sampler(apply_loss(rho, 1 - kCorrection), PhaseMode::uniform());
  std::vector<double> fids;
  for (std::uint64_t k = 0; k < 5; ++k) {
    TomographyJob job;
    job.records = sampler.draw(kPaperSamples, derive_seed(6, k));
    job.efficiency_correction = kCorrection;
    fids.push_back(fidelity(maxlik_reconstruct(job).state, rho));
  }
  std::vector<double> sorted = fids;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[2];
  const double secs = t.seconds();
  return {median > 0.90 && secs < 300,
          fmt("median fidelity %.4f (runs %.4f %.4f %.4f %.4f %.4f), t=%.4f, %.0f s", median, fids[0], fids[1], fids[2],
              fids[3], fids[4], kCorrection, secs)};
}

Outcome negativity() {
  const auto corrected = loss_correct(apply_loss(headline_state(), 1 - kCorrection), kCorrection);
  const GridSpec spec;
  const int coarse = count_negative_regions(wigner(corrected, spec), 0.005);
  const int fine = count_negative_regions(wigner(corrected, spec.refined(2)), 0.005);
  return {coarse == 3 && fine == 3, fmt("%d regions on 201x201, %d on 401x401", coarse, fine)};
}

Outcome bootstrap() {
  Timer t;
  const ScssParams target{2.47, 0.56, Parity::odd};
  BootstrapOptions opt;
  opt.efficiency_correction = kCorrection;
  const auto rep = parametric_bootstrap(headline_state(), kPaperSamples, 100, target, 8, opt);
  // Replicate k depends only on (seed, k), so a short rerun must match the prefix.
  const auto again = parametric_bootstrap(headline_state(), kPaperSamples, 3, target, 8, opt);
  const bool deterministic = std::equal(again.replicates.begin(), again.replicates.end(), rep.replicates.begin());
  const double secs = t.seconds();
  const bool ok = rep.width() >= 0.01 && rep.width() <= 0.12 && deterministic && rep.lower <= rep.point_estimate &&
                  rep.point_estimate <= rep.upper && secs < 1800;
  return {ok, fmt("F=%.4f +%.4f/-%.4f (width %.4f), replay %s, %.0f s", rep.point_estimate, rep.upper - rep.point_estimate,
                  rep.point_estimate - rep.lower, rep.width(), deterministic ? "identical" : "DIFFERS", secs)};
}

Outcome table_ingestion() {
  bool ok = true;
  std::ostringstream detail;
  double fc = 0.0;
  for (const char* name : {"a", "b", "c"}) {
    const auto rep = ingest_density_matrix_file(std::string(FOCKCAT_DATA_DIR) + "/table1_" + name + ".txt", 20);
    const bool good = within(rep.raw_trace, 1.0, 0.01) && rep.max_eigenvalue_adjustment < 0.02 && rep.state.is_valid();
    ok = ok && good;
    detail << "(" << name << ") tr=" << rep.raw_trace << " adj=" << rep.max_eigenvalue_adjustment << "; ";
    if (std::string(name) == "c") fc = fidelity(rep.state, cat_state({2.47, 0.56, Parity::odd}, 20));
  }
  ok = ok && within(fc, 0.53, 0.08);
  detail << "F(c, SCSS 2.47/0.56)=" << fc;
  return {ok, detail.str()};
}

Outcome rate_model() {
  const auto base = generation_rate(paper_preset());
  auto longer = paper_preset();
  longer.n_stor_max = 24;
  const auto extended = generation_rate(longer);
  const bool ok = base.rate_hz >= 3.1 / 2 && base.rate_hz <= 3.1 * 2 && extended.rate_hz > base.rate_hz;
  return {ok, fmt("%.3f Hz at n_stor_max=18, %.3f Hz at 24", base.rate_hz, extended.rate_hz)};
}

Outcome decay() {
  std::vector<std::pair<int, double>> pts;
  for (int n = 0; n <= 40; n += 2) {
    pts.emplace_back(n, apply_loss(DensityMatrix::pure(fock_state(1, 4)), 1 - std::pow(0.99, n)).populations()(1));
  }
  const double l = decay_fit(pts).loss_per_round_trip;
  return {within(l, 0.010, 0.0005), fmt("fitted loss per round trip %.6f", l)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria = {
      {1, {"closed-form herald", closed_form_herald}},
      {2, {"headline realistic sweep", headline_sweep}},
      {3, {"even-cat branch", even_branch}},
      {4, {"constants", constants}},
      {5, {"ideal curve shape", ideal_curve}},
      {6, {"tomography closed loop", tomography_closed_loop}},
      {7, {"Wigner negativity count", negativity}},
      {8, {"parametric bootstrap", bootstrap}},
      {9, {"Table I ingestion", table_ingestion}},
      {10, {"rate model", rate_model}},
      {11, {"decay fit", decay}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [k, v] : criteria) selected.push_back(k);
  }
  int failures = 0;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::printf("[FAIL] %2d unknown criterion\n", k);
      ++failures;
      continue;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", k, it->second.first, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
