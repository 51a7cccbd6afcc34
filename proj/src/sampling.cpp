#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fockcat/kernels.hpp"
#include "fockcat/tomography.hpp"

namespace fockcat {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(splitmix64(seed) ^ index); }

QuadratureRecord fold_phase(QuadratureRecord r) {
  constexpr double pi = std::numbers::pi;
  double theta = std::fmod(r.theta, 2.0 * pi);
  if (theta < 0.0) theta += 2.0 * pi;
  if (theta >= pi) {
    theta -= pi;
    r.x = -r.x;
  }
  // fmod can land exactly on pi after the shift for inputs just below 2 pi.
  if (theta >= pi) theta = 0.0;
  r.theta = theta;
  return r;
}

QuadratureSampler::QuadratureSampler(const DensityMatrix& rho, PhaseMode mode)
    : QuadratureSampler(rho, mode, Options{}) {}

QuadratureSampler::QuadratureSampler(const DensityMatrix& rho, PhaseMode mode, const Options& options)
    : mode_(mode) {
  if (rho.modes() != 1) throw DimensionError("QuadratureSampler: single-mode state required");
  if (options.x_points < 3 || options.phase_nodes < 1) throw DomainError("QuadratureSampler: grid too small");
  const double extent =
      options.x_extent > 0.0 ? options.x_extent : std::sqrt(2.0 * rho.truncation() + 1.0) + 5.0;
  xs_.resize(static_cast<std::size_t>(options.x_points));
  for (int i = 0; i < options.x_points; ++i) {
    xs_[static_cast<std::size_t>(i)] = -extent + 2.0 * extent * i / (options.x_points - 1);
  }
  if (mode.kind == PhaseMode::Kind::fixed) {
    thetas_ = {mode.theta};
  } else {
    thetas_.resize(static_cast<std::size_t>(options.phase_nodes) + 1);
    for (int k = 0; k <= options.phase_nodes; ++k) {
      thetas_[static_cast<std::size_t>(k)] = std::numbers::pi * k / options.phase_nodes;
    }
  }

  const CMatrix harmonics = kernels::quadrature_harmonics(rho.elements(), xs_, Exec::serial);
  const RMatrix table = kernels::quadrature_density_table(harmonics, thetas_, Exec::serial);
  cdf_.resize(thetas_.size());
  for (std::size_t t = 0; t < thetas_.size(); ++t) {
    auto& c = cdf_[t];
    c.resize(xs_.size());
    c[0] = 0.0;
    for (std::size_t i = 1; i < xs_.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(t);
      c[i] = c[i - 1] + 0.5 * (table(row, static_cast<Eigen::Index>(i - 1)) + table(row, static_cast<Eigen::Index>(i))) *
                            (xs_[i] - xs_[i - 1]);
    }
    if (!(c.back() > 0.0)) throw DegenerateOutcomeError("QuadratureSampler: quadrature density vanishes");
    for (double& v : c) v /= c.back();
  }
}

double QuadratureSampler::sample_x(int node, double u) const {
  const auto& c = cdf_[static_cast<std::size_t>(node)];
  auto it = std::lower_bound(c.begin(), c.end(), u);
  if (it == c.begin()) return xs_.front();
  if (it == c.end()) return xs_.back();
  const auto i = static_cast<std::size_t>(it - c.begin());
  const double span = c[i] - c[i - 1];
  const double frac = span > 0.0 ? (u - c[i - 1]) / span : 0.5;
  return xs_[i - 1] + frac * (xs_[i] - xs_[i - 1]);
}

std::vector<QuadratureRecord> QuadratureSampler::draw(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<QuadratureRecord> out(n);
  const int last_node = static_cast<int>(thetas_.size()) - 1;
  for (auto& rec : out) {
    if (mode_.kind == PhaseMode::Kind::fixed) {
      rec.theta = mode_.theta;
      rec.x = sample_x(0, uniform01(rng()));
      rec = fold_phase(rec);
      continue;
    }
    rec.theta = std::numbers::pi * uniform01(rng());
    const double pos = rec.theta / std::numbers::pi * last_node;
    const int lo = std::min(static_cast<int>(pos), last_node - 1);
    const double lambda = pos - lo;
    const int node = uniform01(rng()) < lambda ? lo + 1 : lo;
    rec.x = sample_x(node, uniform01(rng()));
  }
  return out;
}

std::vector<QuadratureRecord> sample_quadratures(const DensityMatrix& rho, std::size_t n, std::uint64_t seed,
                                                 PhaseMode mode) {
  return QuadratureSampler(rho, mode).draw(n, seed);
}

}  // namespace fockcat
