#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fockcat/channels.hpp"
#include "fockcat/kernels.hpp"
#include "fockcat/tomography.hpp"

using namespace fockcat;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix small_cat() { return DensityMatrix::pure(cat_state({1.4, 0.3, Parity::odd}, 12)); }

double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST(Records, PhaseFolding) {
  const auto r = fold_phase({0.7, kPi + 0.25});
  EXPECT_NEAR(r.theta, 0.25, 1e-12);
  EXPECT_EQ(r.x, -0.7);
  const auto neg = fold_phase({0.7, -0.25});
  EXPECT_NEAR(neg.theta, kPi - 0.25, 1e-12);
  EXPECT_EQ(neg.x, -0.7);
  EXPECT_EQ(fold_phase({0.7, 1.0}).x, 0.7);
}

TEST(Sampling, VacuumVariance) {
  const auto rec = sample_quadratures(DensityMatrix::pure(fock_state(0, 6)), 100000, 3);
  double s = 0, s2 = 0;
  for (const auto& r : rec) {
    s += r.x;
    s2 += r.x * r.x;
    ASSERT_GE(r.theta, 0.0);
    ASSERT_LT(r.theta, kPi);
  }
  const double n = rec.size();
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 0.5, 0.01);
}

TEST(Sampling, SinglePhotonAvoidsOrigin) {
  const auto rec = sample_quadratures(DensityMatrix::pure(fock_state(1, 6)), 100000, 4);
  const auto near = std::count_if(rec.begin(), rec.end(), [](const auto& r) { return std::abs(r.x) < 0.05; });
  EXPECT_LT(double(near) / rec.size(), 0.002);
}

TEST(Sampling, DeterministicGivenSeed) {
  const auto a = sample_quadratures(small_cat(), 2000, 99);
  const auto b = sample_quadratures(small_cat(), 2000, 99);
  const auto c = sample_quadratures(small_cat(), 2000, 100);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].theta, b[i].theta);
  }
  EXPECT_NE(a[0].x, c[0].x);
}

TEST(Sampling, FixedPhaseMatchesDensity) {
  // Kolmogorov-Smirnov against the exact CDF at a fixed phase.
  const auto rho = small_cat();
  const double theta = 0.6;
  auto rec = sample_quadratures(rho, 20000, 5, PhaseMode::fixed(theta));
  std::vector<double> xs;
  for (const auto& r : rec) {
    EXPECT_EQ(r.theta, theta);
    xs.push_back(r.x);
  }
  std::sort(xs.begin(), xs.end());
  const auto pdf = quadrature_pdf(rho, theta);
  double cdf = 0.0, x = -10.0, dmax = 0.0;
  const double dx = 1e-3;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (x < xs[i]) {
      cdf += pdf(x + 0.5 * dx) * dx;
      x += dx;
    }
    dmax = std::max(dmax, std::abs(cdf - double(i + 1) / xs.size()));
  }
  EXPECT_LT(dmax, 1.36 / std::sqrt(double(xs.size())));
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
  EXPECT_EQ(uniform01(0), 0.0);
  EXPECT_LT(uniform01(~0ULL), 1.0);
}

TEST(Kernels, LatticeLikelihoodMatchesProjectorSum) {
  const auto rho = small_cat().elements();
  const std::vector<double> xs = {-2.05, -0.55, 0.05, 1.15, 2.45};
  const std::vector<double> ts = {0.1, 0.9, 2.0, 3.0};
  RMatrix counts(4, 5);
  for (int t = 0; t < 4; ++t)
    for (int i = 0; i < 5; ++i) counts(t, i) = (t * 5 + i) % 3;
  const auto cells = kernels::BinnedCells::build(xs, ts, counts, 12);
  const auto lattice = kernels::accumulate_likelihood(rho, cells, Exec::serial);
  const auto flat = kernels::accumulate_likelihood(rho, cells.to_projectors(), Exec::serial);
  EXPECT_NEAR(lattice.log_likelihood, flat.log_likelihood, 1e-10);
  EXPECT_LT((lattice.weighted_sum - flat.weighted_sum).norm(), 1e-9 * flat.weighted_sum.norm());
  const auto par = kernels::accumulate_likelihood(rho, cells, Exec::parallel);
  EXPECT_EQ(par.log_likelihood, lattice.log_likelihood);
  EXPECT_TRUE((par.weighted_sum.array() == lattice.weighted_sum.array()).all());
}

TEST(MaxLik, LikelihoodNeverDecreases) {
  TomographyJob job;
  job.records = sample_quadratures(small_cat(), 5000, 11);
  job.truncation = 12;
  job.max_iterations = 300;
  const auto fit = maxlik_reconstruct(job);
  ASSERT_GT(fit.log_likelihood.size(), 2u);
  for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i) {
    EXPECT_GE(fit.log_likelihood[i], fit.log_likelihood[i - 1]);
  }
  EXPECT_TRUE(fit.state.is_valid());
}

TEST(MaxLik, RecoversPureCat) {
  const auto truth = DensityMatrix::pure(cat_state({2.0, 0.4, Parity::odd}, 20));
  TomographyJob job;
  job.records = sample_quadratures(truth, 50000, 21);
  const auto fit = maxlik_reconstruct(job);
  EXPECT_TRUE(fit.converged);
  EXPECT_GT(fidelity(fit.state, truth), 0.98);
}

TEST(MaxLik, UndoesDetectionLoss) {
  const auto truth = DensityMatrix::pure(cat_state({2.0, 0.4, Parity::odd}, 20));
  TomographyJob job;
  job.records = sample_quadratures(apply_loss(truth, 0.24), 50000, 22);
  job.efficiency_correction = 0.76;
  const auto fit = maxlik_reconstruct(job);
  EXPECT_GT(fidelity(fit.state, truth), 0.95);
}

TEST(MaxLik, SingleRecordGivesValidState) {
  TomographyJob job;
  job.records = {{0.3, 0.2}};
  job.truncation = 6;
  const auto fit = maxlik_reconstruct(job);
  EXPECT_NEAR(fit.state.trace(), 1.0, 1e-10);
  EXPECT_GT(fit.state.min_eigenvalue(), -1e-10);
}

TEST(MaxLik, JobGuards) {
  TomographyJob job;
  EXPECT_THROW(maxlik_reconstruct(job), DomainError);
  job.records = {{0.0, 0.0}};
  job.efficiency_correction = 0.5;
  EXPECT_THROW(maxlik_reconstruct(job), DomainError);
}

TEST(MaxLik, SerialAndParallelAgree) {
  TomographyJob job;
  job.records = sample_quadratures(small_cat(), 3000, 12);
  job.truncation = 12;
  job.max_iterations = 50;
  const auto s = maxlik_reconstruct(job, Exec::serial);
  const auto p = maxlik_reconstruct(job, Exec::parallel);
  EXPECT_TRUE((s.state.elements().array() == p.state.elements().array()).all());
}

TEST(MaxLik, DistributionalClosedLoop) {
  const auto truth = small_cat();
  const auto first = sample_quadratures(truth, 50000, 31);
  TomographyJob job;
  job.records = first;
  job.truncation = 12;
  const auto fit = maxlik_reconstruct(job);
  const auto second = sample_quadratures(fit.state, 50000, 32);
  // Compare per phase sector so phase structure is tested, not just the mixture.
  for (int sector = 0; sector < 4; ++sector) {
    std::vector<double> a, b;
    for (const auto& r : first)
      if (int(r.theta / kPi * 4) == sector) a.push_back(r.x);
    for (const auto& r : second)
      if (int(r.theta / kPi * 4) == sector) b.push_back(r.x);
    EXPECT_LT(ks_distance(a, b), 0.02) << sector;
  }
}

TEST(LossCorrect, IdentityAndRoundTrip) {
  const auto rho = DensityMatrix::pure(cat_state({2.0, 0.4, Parity::odd}, 20));
  EXPECT_LT((loss_correct(rho, 1.0).elements() - rho.elements()).norm(), 1e-15);
  const auto back = loss_correct(apply_loss(rho, 0.24), 0.76);
  EXPECT_GT(fidelity(back, rho), 0.999);
  EXPECT_THROW(loss_correct(rho, 0.5), DomainError);
  EXPECT_THROW(loss_correct(rho, 1.1), DomainError);
}

TEST(LossCorrect, TwoStageTransmission) {
  EXPECT_NEAR(correction_transmission(0.76, 15), 0.76 * (1 - 0.1399), 1e-4);
  EXPECT_NEAR(1 - correction_transmission(1.0, 15), 0.1399, 1e-4);
}

TEST(Negativity, VacuumAndSinglePhoton) {
  EXPECT_EQ(count_negative_regions(wigner(DensityMatrix::pure(fock_state(0, 6)))), 0);
  EXPECT_EQ(count_negative_regions(wigner(DensityMatrix::pure(fock_state(1, 6)))), 1);
  EXPECT_THROW(count_negative_regions(wigner(DensityMatrix::pure(fock_state(1, 6))), 0.0), DomainError);
}

TEST(Negativity, FourConnectivity) {
  WignerGrid g;
  g.x_axis = {0, 1, 2};
  g.p_axis = {0, 1, 2};
  g.values = RMatrix::Zero(3, 3);
  g.values(0, 0) = g.values(1, 1) = g.values(2, 2) = -1;  // diagonal touches only at corners
  EXPECT_EQ(count_negative_regions(g, 0.5), 3);
  g.values(0, 1) = -1;
  EXPECT_EQ(count_negative_regions(g, 0.5), 2);
}

TEST(Percentile, Interpolates) {
  EXPECT_DOUBLE_EQ(percentile({3, 1, 2, 4, 5}, 50), 3);
  EXPECT_DOUBLE_EQ(percentile({1, 2}, 25), 1.25);
  EXPECT_THROW(percentile({}, 50), DomainError);
}

TEST(Bootstrap, OrderedDeterministicAndConcentrating) {
  const auto rho = small_cat();
  const ScssParams target{1.4, 0.3, Parity::odd};
  BootstrapOptions opt;
  opt.truncation = 12;
  const auto a = parametric_bootstrap(rho, 2000, 8, target, 5, opt);
  const auto b = parametric_bootstrap(rho, 2000, 8, target, 5, opt);
  EXPECT_EQ(a.replicates, b.replicates);
  EXPECT_LE(a.lower, a.point_estimate);
  EXPECT_GE(a.upper, a.point_estimate);
  EXPECT_NEAR(a.point_estimate, 1.0, 1e-9);
  const auto serial = parametric_bootstrap(rho, 2000, 8, target, 5, opt, Exec::serial);
  EXPECT_EQ(a.replicates, serial.replicates);
  // Four times the data: a narrower spread, aggregated over seeds.
  double wide = 0, narrow = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    wide += parametric_bootstrap(rho, 1000, 10, target, 40 + s, opt).width();
    narrow += parametric_bootstrap(rho, 4000, 10, target, 40 + s, opt).width();
  }
  EXPECT_LT(narrow, wide);
  EXPECT_THROW(parametric_bootstrap(rho, 100, 1, target, 1, opt), DomainError);
}

TEST(Ingest, ParsesComplexEntries) {
  const CMatrix m = parse_complex_matrix("# header\n0.5 & -0.01j & 0.1+0.02j\n0.01j & 0.3 & 0\n0.1-0.02i & 0 & 0.2\n");
  EXPECT_EQ(m.rows(), 3);
  EXPECT_EQ(m(0, 1), Complex(0, -0.01));
  EXPECT_EQ(m(0, 2), Complex(0.1, 0.02));
  EXPECT_EQ(m(2, 0), Complex(0.1, -0.02));
  const CMatrix w = parse_complex_matrix("1e-3-2e-3j 1\n1 -1E+1\n");
  EXPECT_EQ(w(0, 0), Complex(1e-3, -2e-3));
  EXPECT_EQ(w(1, 1), Complex(-10, 0));
  EXPECT_THROW(parse_complex_matrix("1 2\n3\n"), DimensionError);
  EXPECT_THROW(parse_complex_matrix("1 abc\n3 4\n"), ParseError);
}

TEST(Ingest, ValidStateUnchanged) {
  const auto rep = ingest_density_matrix("0.5 0\n0 0.5\n");
  EXPECT_LT((rep.state.elements() - 0.5 * CMatrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_EQ(rep.eigenvalues_floored, 0);
  EXPECT_EQ(rep.max_eigenvalue_adjustment, 0.0);
  const auto padded = ingest_density_matrix("0.5 0\n0 0.5\n", 20);
  EXPECT_EQ(padded.state.truncation(), 20);
  EXPECT_THROW(ingest_density_matrix("1 0 0\n0 0 0\n0 0 0\n", 1), TruncationError);
}

TEST(Ingest, FloorsNegativeEigenvalues) {
  const auto rep = ingest_density_matrix("0.6 0.5\n0.5 0.4\n");
  EXPECT_EQ(rep.eigenvalues_floored, 1);
  EXPECT_GT(rep.max_eigenvalue_adjustment, 0.0);
  EXPECT_TRUE(rep.state.is_valid());
}
