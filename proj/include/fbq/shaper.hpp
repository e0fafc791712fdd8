#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbq/bins.hpp"
#include "fbq/states.hpp"

// SLM transfer functions M(w) = sum_j u_j f_j(w), the up-conversion
// coincidence signal, Poisson photon counting, and Procrustean filtering.
// The SLM only attenuates: |u_j| <= 1. Finite spectral resolution is a
// Gaussian blur of the bin indicator edges.

namespace fbq {

enum class Side { Idler, Signal };

class TransferFunction {
 public:
  // Idler bins must lie in the lower-frequency half (center < 0), signal bins
  // in the upper half; bins pairwise disjoint; weights.size() == bins.size().
  TransferFunction(Side side, std::vector<FrequencyBin> bins, Eigen::VectorXcd weights,
                   double blur_sigma = 0.0);

  Side side() const { return side_; }
  const std::vector<FrequencyBin>& bins() const { return bins_; }
  const Eigen::VectorXcd& weights() const { return weights_; }
  double blur_sigma() const { return blur_sigma_; }

 private:
  Side side_;
  std::vector<FrequencyBin> bins_;
  Eigen::VectorXcd weights_;
  double blur_sigma_;
};

// M(w); zero outside all bins. With blur, indicators become erf-smoothed
// edges (exactly half the plateau value at a bin edge).
Complex evaluate_transfer(const TransferFunction& m, double omega);

struct SignalQuadrature {
  double rel_tolerance = 1e-6;
  int initial_points_per_segment = 8;  // Simpson panels, doubled until converged
  int max_doublings = 14;
  double blur_padding_sigmas = 8.0;
};

// S = | int Gamma(w) M_i(w) M_s(-w) dw |^2 by adaptive composite Simpson with
// breakpoints at (blur-padded) bin edges. Throws on non-convergence.
double coincidence_signal_continuum(const TransferFunction& m_i, const TransferFunction& m_s,
                                    const std::function<Complex(double)>& gamma,
                                    const SignalQuadrature& quad = {});

// Exact discrete projection signal |sum_l u^i_l u^s_l c_l|^2.
double projective_signal(const Eigen::VectorXcd& u_i, const Eigen::VectorXcd& u_s,
                         const Eigen::VectorXcd& c);

struct DetectorModel {
  double peak_pair_rate = 43.0;   // Hz at the brightest single-bin-pair projection
  double background_rate = 0.2;   // Hz
  double integration_time = 10.0; // s
  std::uint64_t rng_seed = 1;
};

struct CountRecord {
  std::string projector_id;
  std::int64_t raw_counts = 0;
  std::int64_t background_counts = 0;
  double integration_time = 0.0;  // s

  // Background-subtracted counts, clamped at zero.
  std::int64_t net() const { return raw_counts > background_counts ? raw_counts - background_counts : 0; }
  bool clamped() const { return raw_counts < background_counts; }
};

// raw ~ Poisson(S*peak_rate*t + background*t), background ~ Poisson(background*t),
// deterministic for a fixed detector.rng_seed.
CountRecord sample_counts(double signal, const DetectorModel& detector,
                          const std::string& projector_id = {});

// Amplitude scalings t_j = min_k|c_k| / |c_j| on the combined per-level
// transmission |u^i_j u^s_j|; the weakest level stays at full transmission and
// the filtered coefficients t_j c_j are flat. Throws when any c_j = 0.
Eigen::VectorXd procrustean_scalings(const Eigen::VectorXcd& c);

struct ProcrusteanOptions {
  int max_iterations = 60;
  // Rates "agree" when every pairwise count difference is within two Poisson
  // sigmas, |n_j - n_k| <= 2 sqrt(n_j + n_k).
};

struct ProcrusteanResult {
  Eigen::VectorXd scalings;  // combined per-level amplitude transmissions, max = 1
  int iterations = 0;
  bool converged = false;
  std::vector<std::int64_t> final_counts;
};

// Iterative mode: measure(intensity transmissions t_j^2) returns one noisy
// count per level; amplitudes are rescaled until the rates balance.
ProcrusteanResult procrustean_iterative(
    const std::function<std::vector<std::int64_t>(const Eigen::VectorXd&)>& measure, int levels,
    const ProcrusteanOptions& options = {});

}  // namespace fbq
