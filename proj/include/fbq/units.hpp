#pragma once

#include <cmath>

// Frequencies are handled internally as angular offsets from the degeneracy
// point, omega = Omega_abs - Omega_0, so idler/signal enter symmetrically and
// optical-scale cancellation never occurs. Wavelength spans are converted with
// the linearized dispersion |d omega/d lambda| = 2*pi*c/lambda^2 at the
// reference wavelength.

namespace fbq {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double fwhm_per_sigma = 2.3548200450309493;  // 2*sqrt(2 ln 2)

inline double angular_frequency(double wavelength_m) {
  return 2.0 * M_PI * speed_of_light / wavelength_m;
}

// |d omega / d lambda| at a reference wavelength, in (rad/s)/m.
inline double rad_per_meter(double reference_wavelength_m) {
  return 2.0 * M_PI * speed_of_light / (reference_wavelength_m * reference_wavelength_m);
}

// Linearized conversion of a wavelength span (e.g. a bandwidth) to rad/s.
inline double wavelength_span_to_rad(double span_m, double reference_wavelength_m) {
  return span_m * rad_per_meter(reference_wavelength_m);
}

inline double sigma_from_fwhm(double fwhm) { return fwhm / fwhm_per_sigma; }

}  // namespace fbq
