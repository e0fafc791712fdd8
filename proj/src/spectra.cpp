#include "fbq/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbq {

namespace {

// sinc(x) = 1/2 at x ~ 1.8954942670339809 (root of sin x = x/2).
constexpr double sinc_half_max_arg = 1.8954942670339809;

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

void require_strictly_increasing(const Eigen::VectorXd& axis, const char* name) {
  if (axis.size() == 0) throw std::invalid_argument(std::string(name) + ": empty axis");
  for (Eigen::Index i = 1; i < axis.size(); ++i) {
    if (!(axis(i) > axis(i - 1))) {
      throw std::invalid_argument(std::string(name) + ": axis not strictly increasing");
    }
  }
}

double resolved_cw_sigma(const PumpModel& pump, double fallback_scale) {
  if (pump.cw_sigma > 0.0) return pump.cw_sigma;
  return 1e-4 * fallback_scale;
}

}  // namespace

PumpModel PumpModel::continuous_wave(double surrogate_sigma) {
  PumpModel p;
  p.mode = Mode::ContinuousWave;
  p.cw_sigma = surrogate_sigma;
  return p;
}

PumpModel PumpModel::gaussian_pulse(double bandwidth_fwhm_rad) {
  if (!(bandwidth_fwhm_rad > 0.0)) {
    throw std::invalid_argument("PumpModel: pulse bandwidth_fwhm must be > 0");
  }
  PumpModel p;
  p.mode = Mode::GaussianPulse;
  p.bandwidth_fwhm = bandwidth_fwhm_rad;
  return p;
}

double CrystalModel::fwhm_rad() const {
  if (!(spdc_bandwidth_fwhm > 0.0)) {
    throw std::invalid_argument("CrystalModel: spdc_bandwidth_fwhm must be > 0");
  }
  return wavelength_span_to_rad(spdc_bandwidth_fwhm, center_wavelength);
}

Complex pump_envelope(double omega_i, double omega_s, const PumpModel& pump) {
  const double sum = omega_i + omega_s;
  double sigma;
  if (pump.mode == PumpModel::Mode::ContinuousWave) {
    if (!(pump.cw_sigma > 0.0)) {
      throw std::invalid_argument(
          "pump_envelope: cw surrogate width is unresolved; set cw_sigma > 0");
    }
    sigma = pump.cw_sigma;
  } else {
    if (!(pump.bandwidth_fwhm > 0.0)) {
      throw std::invalid_argument("pump_envelope: pulse bandwidth_fwhm must be > 0");
    }
    sigma = sigma_from_fwhm(pump.bandwidth_fwhm);
  }
  return Complex(std::exp(-sum * sum / (2.0 * sigma * sigma)), 0.0);
}

Complex phase_matching(double omega_i, double omega_s, const CrystalModel& crystal) {
  const double diff = omega_i - omega_s;
  const double fwhm = crystal.fwhm_rad();
  if (crystal.profile == CrystalModel::Profile::Sinc) {
    const double kappa = 2.0 * sinc_half_max_arg / fwhm;
    return Complex(sinc(kappa * diff), 0.0);
  }
  const double sigma = sigma_from_fwhm(fwhm);
  return Complex(std::exp(-diff * diff / (2.0 * sigma * sigma)), 0.0);
}

JsaGrid build_jsa(const PumpModel& pump, const CrystalModel& crystal,
                  const Eigen::VectorXd& axis_i, const Eigen::VectorXd& axis_s) {
  require_strictly_increasing(axis_i, "build_jsa axis_i");
  require_strictly_increasing(axis_s, "build_jsa axis_s");

  PumpModel p = pump;
  if (p.mode == PumpModel::Mode::ContinuousWave && p.cw_sigma <= 0.0) {
    double span = std::min(axis_i(axis_i.size() - 1) - axis_i(0),
                           axis_s(axis_s.size() - 1) - axis_s(0));
    p.cw_sigma = resolved_cw_sigma(p, span);
  }

  JsaGrid grid;
  grid.axis_i = axis_i;
  grid.axis_s = axis_s;
  grid.values.resize(axis_i.size(), axis_s.size());
  for (Eigen::Index i = 0; i < axis_i.size(); ++i) {
    for (Eigen::Index s = 0; s < axis_s.size(); ++s) {
      grid.values(i, s) =
          pump_envelope(axis_i(i), axis_s(s), p) * phase_matching(axis_i(i), axis_s(s), crystal);
    }
  }
  double n = grid.values.norm();
  if (n <= 0.0) throw std::runtime_error("build_jsa: amplitude vanishes on the whole grid");
  grid.values /= n;
  return grid;
}

SchmidtReport schmidt_analysis(const JsaGrid& grid, double entropy_floor) {
  if (!grid.values.allFinite()) {
    throw std::invalid_argument("schmidt_analysis: non-finite grid entries");
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(grid.values);
  Eigen::VectorXd s = svd.singularValues();
  double total = s.squaredNorm();
  if (total <= 0.0) throw std::invalid_argument("schmidt_analysis: zero grid");
  s /= std::sqrt(total);

  SchmidtReport report;
  report.singular_values = s;
  double entropy = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    double lam = s(k) * s(k);
    sum_sq += lam * lam;
    if (lam >= entropy_floor) entropy -= lam * std::log2(lam);
  }
  report.entropy_ebits = std::max(entropy, 0.0);
  report.schmidt_number = 1.0 / sum_sq;
  return report;
}

namespace {

Eigen::MatrixXcd normalized_or_throw(Eigen::MatrixXcd c, const char* context) {
  double n = c.norm();
  if (n <= 0.0) {
    throw std::runtime_error(std::string(context) + ": all bin coefficients vanish");
  }
  return c / n;
}

// Overlap of the mirrored idler bin with a signal bin: the cw support line
// w_i = -w_s crosses the rectangle bin_i x bin_s on this interval of w_s.
struct Interval {
  double lo, hi;
  bool empty() const { return !(hi > lo); }
};

Interval cw_overlap(const FrequencyBin& bin_i, const FrequencyBin& bin_s) {
  FrequencyBin m = bin_i.mirrored();
  return {std::max(m.lower(), bin_s.lower()), std::min(m.upper(), bin_s.upper())};
}

}  // namespace

Eigen::MatrixXcd bin_coefficients(const PumpModel& pump, const CrystalModel& crystal,
                                  const std::vector<FrequencyBin>& bins_i,
                                  const std::vector<FrequencyBin>& bins_s,
                                  const QuadratureOptions& opt) {
  require_disjoint(bins_i, "bin_coefficients (idler)");
  require_disjoint(bins_s, "bin_coefficients (signal)");
  if (opt.samples_per_bin < 1) {
    throw std::invalid_argument("bin_coefficients: samples_per_bin must be >= 1");
  }
  const int ni = static_cast<int>(bins_i.size());
  const int ns = static_cast<int>(bins_s.size());
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(ni, ns);

  if (pump.mode == PumpModel::Mode::ContinuousWave) {
    // Exact delta-function reduction: c_jk = int f_j^i(-w) f_k^s(w) Phi(-w, w) dw.
    for (int j = 0; j < ni; ++j) {
      for (int k = 0; k < ns; ++k) {
        Interval seg = cw_overlap(bins_i[j], bins_s[k]);
        if (seg.empty()) continue;
        const double h = (seg.hi - seg.lo) / opt.samples_per_bin;
        const double amp = bins_i[j].amplitude() * bins_s[k].amplitude();
        Complex acc(0.0, 0.0);
        for (int q = 0; q < opt.samples_per_bin; ++q) {
          double w = seg.lo + (q + 0.5) * h;
          acc += phase_matching(-w, w, crystal);
        }
        c(j, k) = amp * acc * h;
      }
    }
  } else {
    for (int j = 0; j < ni; ++j) {
      for (int k = 0; k < ns; ++k) {
        const FrequencyBin& bi = bins_i[j];
        const FrequencyBin& bs = bins_s[k];
        const int n = opt.samples_per_bin;
        const double hi = bi.width() / n;
        const double hs = bs.width() / n;
        const double amp = bi.amplitude() * bs.amplitude();
        Complex acc(0.0, 0.0);
        for (int qi = 0; qi < n; ++qi) {
          double wi = bi.lower() + (qi + 0.5) * hi;
          for (int qs = 0; qs < n; ++qs) {
            double ws = bs.lower() + (qs + 0.5) * hs;
            acc += pump_envelope(wi, ws, pump) * phase_matching(wi, ws, crystal);
          }
        }
        c(j, k) = amp * acc * hi * hs;
      }
    }
  }
  return normalized_or_throw(std::move(c), "bin_coefficients");
}

Eigen::MatrixXcd bin_coefficients(const JsaGrid& grid, const std::vector<FrequencyBin>& bins_i,
                                  const std::vector<FrequencyBin>& bins_s) {
  require_disjoint(bins_i, "bin_coefficients (idler)");
  require_disjoint(bins_s, "bin_coefficients (signal)");
  require_strictly_increasing(grid.axis_i, "bin_coefficients axis_i");
  require_strictly_increasing(grid.axis_s, "bin_coefficients axis_s");
  if (grid.values.rows() != grid.axis_i.size() || grid.values.cols() != grid.axis_s.size()) {
    throw std::invalid_argument("bin_coefficients: grid/axis size mismatch");
  }
  auto check_support = [](const std::vector<FrequencyBin>& bins, const Eigen::VectorXd& axis,
                          const char* side) {
    for (const auto& b : bins) {
      if (b.lower() < axis(0) || b.upper() > axis(axis.size() - 1)) {
        throw std::invalid_argument(std::string("bin_coefficients: ") + side +
                                    " bin outside grid support");
      }
    }
  };
  check_support(bins_i, grid.axis_i, "idler");
  check_support(bins_s, grid.axis_s, "signal");

  // Samples act as cell centers; cell width is the half-distance to the
  // neighbouring samples.
  auto cell_widths = [](const Eigen::VectorXd& axis) {
    Eigen::VectorXd w(axis.size());
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
      double lo = (i == 0) ? axis(0) : 0.5 * (axis(i - 1) + axis(i));
      double hi = (i == axis.size() - 1) ? axis(axis.size() - 1) : 0.5 * (axis(i) + axis(i + 1));
      w(i) = hi - lo;
    }
    return w;
  };
  Eigen::VectorXd wi = cell_widths(grid.axis_i);
  Eigen::VectorXd ws = cell_widths(grid.axis_s);

  const int ni = static_cast<int>(bins_i.size());
  const int ns = static_cast<int>(bins_s.size());
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(ni, ns);
  for (int j = 0; j < ni; ++j) {
    for (int k = 0; k < ns; ++k) {
      const double amp = bins_i[j].amplitude() * bins_s[k].amplitude();
      Complex acc(0.0, 0.0);
      for (Eigen::Index a = 0; a < grid.axis_i.size(); ++a) {
        if (!bins_i[j].contains(grid.axis_i(a))) continue;
        for (Eigen::Index b = 0; b < grid.axis_s.size(); ++b) {
          if (!bins_s[k].contains(grid.axis_s(b))) continue;
          acc += grid.values(a, b) * wi(a) * ws(b);
        }
      }
      c(j, k) = amp * acc;
    }
  }
  return normalized_or_throw(std::move(c), "bin_coefficients(grid)");
}

Eigen::VectorXcd diagonal_coefficients(const PumpModel& pump, const CrystalModel& crystal,
                                       const std::vector<FrequencyBin>& bins_s,
                                       const QuadratureOptions& opt, double offdiag_tolerance) {
  Eigen::MatrixXcd c = bin_coefficients(pump, crystal, mirrored(bins_s), bins_s, opt);
  return BipartiteStateVector(std::move(c)).diagonal(offdiag_tolerance);
}

}  // namespace fbq
