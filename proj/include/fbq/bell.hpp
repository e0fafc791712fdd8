#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "fbq/states.hpp"

// CGLMP Bell-parameter machinery. Measurement bases are the Fourier-phase
// vectors; side A uses phases j(m + alpha_a), side B uses j(-n + beta_b).
//
// Probability-group convention: P(A_a = B_b + k) sums the joint outcomes
// where A's result exceeds B's by k modulo d, P(A=(j+k) mod d, B=j); the
// analogous sum with the roles swapped is P(B_b = A_a + k). This is the
// convention under which the qutrit parameter reaches 2.8729 on the
// maximally entangled state and is maximized at gamma = (sqrt(11)-sqrt(3))/2.

namespace fbq {

struct DetectionSettings {
  double alpha1 = 0.0;
  double alpha2 = 0.5;
  double beta1 = 0.25;
  double beta2 = -0.25;

  double alpha(int a) const;  // a in {1,2}
  double beta(int b) const;   // b in {1,2}
};

enum class BellSide { A, B };

// The Fourier-phase unit vector for outcome m of setting index a (or b).
Eigen::VectorXcd cglmp_vector(int d, BellSide side, int setting, int outcome,
                              const DetectionSettings& settings = {});

// Joint probability tables for all four setting pairs, each normalized to
// unit sum. at(a, b) with a, b in {1, 2}.
struct BellTables {
  int dim = 0;
  std::array<Eigen::MatrixXd, 4> tables;

  Eigen::MatrixXd& at(int a, int b) { return tables[(a - 1) * 2 + (b - 1)]; }
  const Eigen::MatrixXd& at(int a, int b) const { return tables[(a - 1) * 2 + (b - 1)]; }
};

Eigen::MatrixXd joint_probabilities(const BipartiteStateVector& state,
                                    const DetectionSettings& settings, int a, int b);
Eigen::MatrixXd joint_probabilities(const DensityMatrix& state, const DetectionSettings& settings,
                                    int a, int b);

BellTables bell_tables(const BipartiteStateVector& state, const DetectionSettings& settings);
BellTables bell_tables(const DensityMatrix& state, const DetectionSettings& settings);

// P(A_a = B_b + k) and P(B_b = A_a + k) for one normalized table.
double prob_a_exceeds_b(const Eigen::MatrixXd& table, int k);
double prob_b_exceeds_a(const Eigen::MatrixXd& table, int k);

// General d-dimensional Bell parameter from the four joint tables.
double cglmp_from_tables(const BellTables& tables);

double cglmp_parameter(const BipartiteStateVector& state, const DetectionSettings& settings = {});
double cglmp_parameter(const DensityMatrix& state, const DetectionSettings& settings = {});

// Explicit eight-term expansion valid for d = 2 and 3; cross-checks the
// general evaluator.
double cglmp_explicit_qubit_qutrit(const BellTables& tables);

struct BellEstimate {
  double value = 0.0;
  double two_sigma = 0.0;
};

// Experimental-mode evaluation: net-count tables per setting pair are
// normalized by their totals; the 2-sigma error comes from seeded Poisson
// resampling of the counts.
BellEstimate cglmp_from_counts(const BellTables& counts, int n_resamples, std::uint64_t seed);

// Maximum of the Bell parameter over all deterministic local strategies
// (d^4 outcome assignments); equals the local realistic bound 2.
double local_deterministic_bound(int d);

// Maximal CHSH value 2 sqrt(m1 + m2) from the two largest eigenvalues of
// T^T T, T_uv = Tr(rho sigma_u x sigma_v), Pauli order (x, y, z).
double horodecki_chsh(const DensityMatrix& rho);

struct GammaScanPoint {
  double gamma = 0.0;
  double bell = 0.0;
};

// I_d of the symmetric-noise state rho_sn(gamma, lambda) over a gamma grid.
std::vector<GammaScanPoint> gamma_scan(int d, const std::vector<double>& gammas, double lambda,
                                       const DetectionSettings& settings = {});

struct GammaOptimum {
  double gamma = 0.0;
  double bell = 0.0;
};

// Grid scan (101 points by default) refined by golden-section search.
GammaOptimum bell_scan_argmax(int d, double lambda, const DetectionSettings& settings = {},
                              int grid_points = 101, double tolerance = 1e-4);

}  // namespace fbq
