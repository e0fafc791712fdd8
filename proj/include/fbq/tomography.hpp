#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbq/shaper.hpp"
#include "fbq/states.hpp"

// Tomographic measurement set, maximum-likelihood density-matrix
// reconstruction, and Monte-Carlo error propagation.
//
// Per photon the basis holds all d single-bin projectors plus both
// two-bin superpositions (relative phase 0 and pi/2) for every pair,
// d^2 vectors per photon and d^4 product projectors in total; that set is
// informationally complete.

namespace fbq {

struct PhotonProjector {
  enum class Kind { SingleBin, TwoBinSuperposition };

  Kind kind = Kind::SingleBin;
  int j1 = 0;
  int j2 = 0;          // used by TwoBinSuperposition, j1 < j2
  double alpha = 0.0;  // relative phase, 0 or pi/2

  static PhotonProjector single(int j);
  static PhotonProjector superposition(int j1, int j2, double alpha);

  // Unit ket: e_j or (e_j1 + e^{i alpha} e_j2)/sqrt(2).
  Eigen::VectorXcd ket(int d) const;
  std::string id() const;
};

struct ProjectorSpec {
  PhotonProjector idler;
  PhotonProjector signal;

  // Product ket of length d^2, index j*d+k.
  Eigen::VectorXcd ket(int d) const;
  std::string id() const;
};

std::vector<ProjectorSpec> tomography_basis(int d);

// Rank of the measurement map (rows vec(|chi><chi|)); completeness means d^4.
int measurement_rank(const std::vector<ProjectorSpec>& basis, int d);

struct MleOptions {
  double tolerance = 1e-10;       // relative log-likelihood change
  int max_iterations = 4000;
  double gradient_tolerance = 1e-7;  // on the count-normalized objective
};

struct TomographyRun {
  int dim = 0;
  std::vector<ProjectorSpec> projectors;
  std::vector<CountRecord> counts;  // aligned with projectors
  MleOptions options;

  void validate() const;  // lengths match, counts nonnegative, set complete
  Eigen::VectorXd net_counts() const;
};

// Forward model: expected signal Tr(rho |chi><chi|) per projector, normalized
// to the brightest single-bin-pair projection, sampled through the detector.
// Projector k uses the derived seed (detector.rng_seed, k).
TomographyRun simulate_tomography(const DensityMatrix& state,
                                  const std::vector<ProjectorSpec>& basis,
                                  const DetectorModel& detector);

// Same forward model with exact expected counts (no Poisson sampling).
TomographyRun expected_tomography(const DensityMatrix& state,
                                  const std::vector<ProjectorSpec>& basis,
                                  const DetectorModel& detector);

struct MleResult {
  DensityMatrix rho;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  double log_likelihood = 0.0;     // Poisson log-likelihood at the optimum
  double scale = 0.0;              // fitted count scale
  std::vector<double> likelihood_trace;
};

// The count-normalized negative profile log-likelihood over the packed
// lower-triangular parameters (d^4 of them): D diagonal reals, then
// (Re, Im) pairs row by row. Exposed so the analytic gradient can be
// validated against finite differences.
class MleObjective {
 public:
  MleObjective(int d, const std::vector<ProjectorSpec>& projectors,
               const Eigen::VectorXd& net_counts);

  int parameter_count() const { return D_ * D_; }
  double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& gradient) const;
  // Affine map from objective value to the Poisson log-likelihood.
  double log_likelihood(double objective_value) const;

 private:
  int D_;
  Eigen::MatrixXcd X_;       // projector kets as columns
  Eigen::VectorXd counts_;
  double total_ = 0.0;
};

// rho = T^dag T / Tr(T^dag T), T complex lower-triangular, maximizing the
// Poisson likelihood with the count scale profiled out analytically.
MleResult mle_reconstruct(const TomographyRun& run);

// Internal entry point used by the Monte-Carlo loop; counts may be real.
MleResult mle_reconstruct_counts(int d, const std::vector<ProjectorSpec>& projectors,
                                 const Eigen::VectorXd& net_counts, const MleOptions& options);

struct MonteCarloError {
  double mean = 0.0;
  double two_sigma = 0.0;
  int n_failures = 0;
};

// Perturbs each net count n -> n + N(0, sqrt(n)) (clamped at 0), re-runs the
// reconstruction and evaluates the statistic. Deterministic under seed.
// Aborts when more than 10% of the resamples fail to reconstruct.
MonteCarloError monte_carlo_error(const TomographyRun& run,
                                  const std::function<double(const DensityMatrix&)>& statistic,
                                  int n_samples, std::uint64_t seed, int threads = 1,
                                  double noise_scale = 1.0);

}  // namespace fbq
