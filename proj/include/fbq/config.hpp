#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "fbq/bell.hpp"

// Plain-text experiment configuration: [section] blocks of key = value lines,
// '#' comments. Unknown sections or keys are errors. Physical quantities
// carry their unit in the key name (*_nm, *_hz, *_s, *_rad_s).

namespace fbq {

struct PumpConfig {
  std::string mode = "cw";  // cw | gaussian
  double bandwidth_fwhm_hz = 5e6;
  double cw_sigma_rad_s = 0.0;  // 0 = auto
};

struct CrystalConfig {
  double center_wavelength_nm = 1064.0;
  double bandwidth_fwhm_nm = 105.0;
  std::string profile = "sinc";  // sinc | gaussian
};

struct BinsConfig {
  int dimension = 2;
  double span_min_nm = 6.0;   // nearest signal-bin edge, offset from degeneracy
  double span_max_nm = 24.0;  // farthest signal-bin edge
  double fill_fraction = 0.5; // bin width / pitch
};

struct DetectorConfig {
  double peak_pair_rate_hz = 43.0;
  double background_rate_hz = 0.2;
  double integration_time_s = 10.0;
};

struct ShaperConfig {
  double blur_resolution_nm = 0.0;     // spectral resolution FWHM; 9 = paper
  double acceptance_span_ratio = 10.0; // detection-crystal width / bin span
};

struct SchmidtConfig {
  int grid_points = 160;
  double grid_span_sigmas = 6.0;
  double pump_bandwidth_ratio = 10.0;  // pump/phase-matching width ratio
  bool export_jsa = false;
  long max_grid_cells = 4000000;       // N_i * N_s guard
};

struct TomographyRunConfig {
  double noise_lambda = 0.920;
  bool poisson = true;
  std::string procrustean = "exact";  // exact | iterative | off
  int mc_samples = 60;
  double mle_tolerance = 1e-10;
  int mle_max_iterations = 4000;
};

struct BellRunConfig {
  int dimension = 2;
  double lambda_mixing = 0.920;
  int gamma_points = 101;
  int resamples = 200;
  DetectionSettings settings;
};

struct RunConfig {
  std::uint64_t seed = 20260810;
  std::string out_dir = "out";
  int threads = 1;
};

// Acceptance-criterion tolerances, pinned to their specified values; a config
// can override them (used to prove that verify actually gates).
struct VerifyConfig {
  double i2_tolerance = 1e-9;
  double i3_oracle_tolerance = 1e-6;
  double gamma_max_tolerance = 1e-3;
  double linearity_tolerance = 1e-12;
  double endpoint_tolerance = 1e-3;
  double roundtrip_fidelity_min = 0.999;
  double mc_two_sigma_max = 0.03;
  double equivalence_tolerance = 1e-6;
  double schmidt_flat_tolerance = 1e-9;
  double schmidt_oracle_rel = 0.005;
  double horodecki_tolerance = 1e-9;
};

struct ExperimentConfig {
  PumpConfig pump;
  CrystalConfig crystal;
  BinsConfig bins;
  DetectorConfig detector;
  ShaperConfig shaper;
  SchmidtConfig schmidt;
  TomographyRunConfig tomography;
  BellRunConfig bell;
  RunConfig run;
  VerifyConfig verify;
};

ExperimentConfig default_config();
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

// Canonical rendering of the effective configuration; its FNV-1a hash is the
// provenance hash embedded in every output file.
std::string render_config(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace fbq
