#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fockcat/exec.hpp"
#include "fockcat/fock.hpp"
#include "fockcat/wigner.hpp"

namespace fockcat {

/// One homodyne outcome: quadrature x (vacuum variance 1/2) at LO phase theta.
struct QuadratureRecord {
  double x = 0.0;
  double theta = 0.0;
};

/// Maps theta into [0, pi), flipping x for the half turn (X_{theta+pi} = -X_theta).
QuadratureRecord fold_phase(QuadratureRecord r);

// ---- sampling --------------------------------------------------------------------

struct PhaseMode {
  enum class Kind { uniform, fixed };
  Kind kind = Kind::uniform;
  double theta = 0.0;

  static PhaseMode uniform() { return {}; }
  static PhaseMode fixed(double theta) { return {Kind::fixed, theta}; }
};

/// Draws i.i.d. homodyne records from a single-mode state. The quadrature
/// density is tabulated once on a fine x grid at phase nodes spanning [0, pi];
/// between nodes the density is the linear mixture of its neighbours, sampled
/// by first choosing a node and then inverting its CDF.
class QuadratureSampler {
 public:
  struct Options {
    int phase_nodes = 512;
    int x_points = 4001;
    /// Half-extent of the x grid; 0 picks sqrt(2N + 1) + 5.
    double x_extent = 0.0;
  };

  QuadratureSampler(const DensityMatrix& rho, PhaseMode mode, const Options& options);
  QuadratureSampler(const DensityMatrix& rho, PhaseMode mode);

  std::vector<QuadratureRecord> draw(std::size_t n, std::uint64_t seed) const;

 private:
  double sample_x(int node, double u) const;

  PhaseMode mode_;
  std::vector<double> xs_;
  std::vector<double> thetas_;
  std::vector<std::vector<double>> cdf_;  // per node, normalized to end at 1
};

std::vector<QuadratureRecord> sample_quadratures(const DensityMatrix& rho, std::size_t n, std::uint64_t seed,
                                                 PhaseMode mode = PhaseMode::uniform());

/// Uniform double in [0, 1) with 53 random bits, identical on every platform.
double uniform01(std::uint64_t bits);
/// Independent child seed for stream `index` (splitmix64 of the pair).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// ---- maximum likelihood -------------------------------------------------------------

struct BinningOptions {
  double x_min = -6.0;
  double x_max = 6.0;
  double x_width = 0.1;
  int phase_bins = 128;
};

struct TomographyJob {
  std::vector<QuadratureRecord> records;
  int truncation = kDefaultTruncation;
  /// Overall transmission between the state and the detector that the
  /// reconstruction undoes. 1 means no correction.
  double efficiency_correction = 1.0;
  int max_iterations = 20000;
  /// Stop once an iteration gains less than this much log-likelihood per record.
  double convergence_tol = 1e-9;
  BinningOptions binning;

  /// Throws DomainError on an empty record set or efficiency outside (0.5, 1].
  void validate() const;
};

struct MaxLikResult {
  DensityMatrix state;
  int iterations = 0;
  bool converged = false;
  /// Log-likelihood before the first update and after every accepted one.
  std::vector<double> log_likelihood;
};

/// Iterative R rho R reconstruction. The loss is folded into the measurement
/// operators, Pi -> L^dag(Pi), so the estimate is the pre-loss state. Each
/// update is diluted, rho -> (I + eps R) rho (I + eps R) / tr, with eps halved
/// until the likelihood does not drop.
MaxLikResult maxlik_reconstruct(const TomographyJob& job, Exec exec = Exec::serial);

/// Inverts the pure-loss map of transmission t directly and projects the
/// result onto the PSD cone. Requires t > 0.5.
DensityMatrix loss_correct(const DensityMatrix& rho, double transmission);

/// Detector efficiency times storage transmission (0.99^n per round trip).
double correction_transmission(double detector_efficiency, int storage_roundtrips, double loss_per_roundtrip = 0.01);

// ---- bootstrap ----------------------------------------------------------------------

struct BootstrapOptions {
  /// Samples are drawn from L_t(rho_hat) and reconstructed with correction t.
  double efficiency_correction = 1.0;
  int truncation = kDefaultTruncation;
  int max_iterations = 20000;
  double convergence_tol = 1e-9;
  BinningOptions binning;
  double lower_percentile = 16.0;
  double upper_percentile = 84.0;
};

struct BootstrapReport {
  double point_estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int n_repetitions = 0;
  std::vector<double> replicates;  // repetition order
  double width() const { return upper - lower; }
};

BootstrapReport parametric_bootstrap(const DensityMatrix& rho_hat, std::size_t n_samples, int n_rep,
                                     const ScssParams& target, std::uint64_t seed,
                                     const BootstrapOptions& options = {}, Exec exec = Exec::parallel);

/// Linear-interpolated percentile (0..100) of unsorted values.
double percentile(std::vector<double> values, double pct);

// ---- Wigner negativity ----------------------------------------------------------------

/// Number of 4-connected components of grid cells with W < -eps.
int count_negative_regions(const WignerGrid& grid, double eps = 0.005);

// ---- density-matrix ingestion -----------------------------------------------------------

struct IngestReport {
  DensityMatrix state;
  int source_dim = 0;
  double raw_trace = 0.0;
  /// max |M - M^dag| of the parsed matrix.
  double hermiticity_deviation = 0.0;
  double min_raw_eigenvalue = 0.0;
  /// Largest magnitude by which an eigenvalue was raised to reach zero.
  double max_eigenvalue_adjustment = 0.0;
  int eigenvalues_floored = 0;
};

/// Parses a square complex matrix, one row per line, entries separated by '&'
/// or whitespace. Entries look like 0.12, -0.01j, 0.09+0.01j ('i' also works).
/// Blank lines and lines starting with '#' are skipped.
CMatrix parse_complex_matrix(const std::string& text);

/// Hermitizes, floors negative eigenvalues, renormalizes and zero-pads to the
/// requested truncation (default: the source size).
IngestReport ingest_density_matrix(const std::string& text, std::optional<int> truncation = std::nullopt);
IngestReport ingest_density_matrix_file(const std::string& path, std::optional<int> truncation = std::nullopt);

}  // namespace fockcat
