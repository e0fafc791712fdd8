#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "fbq/bins.hpp"
#include "fbq/states.hpp"
#include "fbq/units.hpp"

// Continuous SPDC joint spectral amplitude Lambda(w_i, w_s) = alpha * Phi and
// its projection onto frequency bins. All frequencies are relative to the
// degeneracy point; a cw pump concentrates support on w_i + w_s = 0.

namespace fbq {

struct PumpModel {
  enum class Mode { ContinuousWave, GaussianPulse };

  Mode mode = Mode::ContinuousWave;
  double center_frequency = 2.0 * M_PI * speed_of_light / 532e-9;  // rad/s, informational
  double bandwidth_fwhm = 0.0;  // rad/s; ignored for ContinuousWave
  // Width of the Gaussian surrogate for the cw delta function on grids.
  // 0 means "auto": resolved from bin widths (1e-4 of the smallest full
  // width) or, grid-only, from the axis span. Exact diagonal-form math never
  // uses it.
  double cw_sigma = 0.0;

  static PumpModel continuous_wave(double surrogate_sigma = 0.0);
  static PumpModel gaussian_pulse(double bandwidth_fwhm_rad);
};

struct CrystalModel {
  enum class Profile { Sinc, Gaussian };

  double center_wavelength = 1064e-9;   // m, degenerate SPDC wavelength
  double spdc_bandwidth_fwhm = 105e-9;  // m of wavelength
  Profile profile = Profile::Sinc;

  // FWHM of the phase-matching envelope in the w_i - w_s variable, rad/s.
  double fwhm_rad() const;
};

struct JsaGrid {
  Eigen::MatrixXcd values;  // N_i x N_s, unit Frobenius norm
  Eigen::VectorXd axis_i;   // strictly increasing, rad/s
  Eigen::VectorXd axis_s;
};

struct SchmidtReport {
  double entropy_ebits = 0.0;
  double schmidt_number = 1.0;
  Eigen::VectorXd singular_values;  // nonincreasing, sum of squares = 1
};

Complex pump_envelope(double omega_i, double omega_s, const PumpModel& pump);
Complex phase_matching(double omega_i, double omega_s, const CrystalModel& crystal);

JsaGrid build_jsa(const PumpModel& pump, const CrystalModel& crystal,
                  const Eigen::VectorXd& axis_i, const Eigen::VectorXd& axis_s);

// SVD of the grid; entropy and Schmidt number from squared singular values.
// Weights below entropy_floor are excluded from the entropy sum.
SchmidtReport schmidt_analysis(const JsaGrid& grid, double entropy_floor = 1e-15);

struct QuadratureOptions {
  int samples_per_bin = 64;  // midpoint rule resolution per bin (per axis)
};

// c_jk from the analytic amplitude. For a cw pump this is the exact
// 1-D reduction along w_i = -w_s; for a pulsed pump it is 2-D midpoint
// quadrature over the bin rectangles. Output normalized to unit norm.
Eigen::MatrixXcd bin_coefficients(const PumpModel& pump, const CrystalModel& crystal,
                                  const std::vector<FrequencyBin>& bins_i,
                                  const std::vector<FrequencyBin>& bins_s,
                                  const QuadratureOptions& opt = {});

// c_jk by Riemann summation of a sampled grid over the bin rectangles.
// Bins must lie inside the grid's axis ranges.
Eigen::MatrixXcd bin_coefficients(const JsaGrid& grid,
                                  const std::vector<FrequencyBin>& bins_i,
                                  const std::vector<FrequencyBin>& bins_s);

// Diagonal c_j in the cw limit, for mirror-paired bins (bins_i = mirrored
// signal bins). Throws when off-diagonal mass exceeds the tolerance.
Eigen::VectorXcd diagonal_coefficients(const PumpModel& pump, const CrystalModel& crystal,
                                       const std::vector<FrequencyBin>& bins_s,
                                       const QuadratureOptions& opt = {},
                                       double offdiag_tolerance = 1e-9);

}  // namespace fbq
