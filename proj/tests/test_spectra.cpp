#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fbq/spectra.hpp"
#include "fbq/units.hpp"
#include "test_helpers.hpp"

using namespace fbq;

namespace {

Eigen::VectorXd linspace(double lo, double hi, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = lo + (hi - lo) * i / (n - 1);
  return v;
}

// Double-Gaussian amplitude: pump fwhm_plus in (w_i+w_s), crystal fwhm_minus
// in (w_i-w_s); Schmidt number has the Mehler closed form (r + 1/r)/2 with
// r the sigma ratio.
JsaGrid double_gaussian_grid(double ratio, int n) {
  CrystalModel crystal;
  crystal.profile = CrystalModel::Profile::Gaussian;
  crystal.spdc_bandwidth_fwhm = 105e-9;
  const double w_minus = crystal.fwhm_rad();
  PumpModel pump = PumpModel::gaussian_pulse(ratio * w_minus);
  const double span = 3.0 * std::max(1.0, ratio) * w_minus;  // ~7 sigma of the widest direction
  auto axis = linspace(-span, span, n);
  return build_jsa(pump, crystal, axis, axis);
}

std::vector<FrequencyBin> signal_bins(int d, double lo, double hi, double fill = 0.5) {
  std::vector<FrequencyBin> bins;
  const double pitch = (hi - lo) / d;
  for (int j = 0; j < d; ++j) {
    bins.emplace_back(lo + (j + 0.5) * pitch, 0.5 * fill * pitch);
  }
  return bins;
}

}  // namespace

TEST_CASE("pump envelope") {
  PumpModel cw = PumpModel::continuous_wave(1e6);
  CHECK(pump_envelope(0.0, 0.0, cw).real() == doctest::Approx(1.0));
  for (double x : {1e5, -3e6, 7e8}) {
    CHECK(pump_envelope(x, -x, cw).real() == doctest::Approx(1.0));
  }

  const double sigma = 2.0e9;
  PumpModel pulse = PumpModel::gaussian_pulse(fwhm_per_sigma * sigma);
  CHECK(pump_envelope(sigma, 0.0, pulse).real() ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

  PumpModel unresolved = PumpModel::continuous_wave();
  CHECK_THROWS_AS(pump_envelope(0.0, 0.0, unresolved), std::invalid_argument);
}

TEST_CASE("phase matching calibration") {
  for (auto profile : {CrystalModel::Profile::Sinc, CrystalModel::Profile::Gaussian}) {
    CrystalModel crystal;
    crystal.profile = profile;
    const double fwhm = crystal.fwhm_rad();
    CHECK(phase_matching(0.0, 0.0, crystal).real() == doctest::Approx(1.0));

    // Half-maximum sits at detuning w_i - w_s = fwhm/2: bisect the profile
    // and compare with the calibrated width.
    auto value = [&](double delta) { return phase_matching(delta / 2, -delta / 2, crystal).real(); };
    CHECK(value(fwhm / 2) == doctest::Approx(0.5).epsilon(1e-12));
    double lo = 0.0, hi = 2.0 * fwhm;
    for (int i = 0; i < 80; ++i) {
      double mid = 0.5 * (lo + hi);
      (value(mid) > 0.5 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(fwhm / 2).epsilon(1e-9));
  }

  // Sinc first zero at kappa*delta = pi.
  CrystalModel sinc_crystal;
  sinc_crystal.profile = CrystalModel::Profile::Sinc;
  const double first_zero = M_PI * sinc_crystal.fwhm_rad() / (2.0 * 1.8954942670339809);
  CHECK(std::abs(phase_matching(first_zero / 2, -first_zero / 2, sinc_crystal).real()) < 1e-12);
}

TEST_CASE("build_jsa") {
  SUBCASE("unit Frobenius norm and separable limit") {
    auto grid = double_gaussian_grid(1.0, 128);
    CHECK(grid.values.norm() == doctest::Approx(1.0).epsilon(1e-12));
    auto report = schmidt_analysis(grid);
    CHECK(report.schmidt_number == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(report.entropy_ebits < 1e-4);
  }
  SUBCASE("cw support concentrates on the anti-diagonal") {
    CrystalModel crystal;
    crystal.profile = CrystalModel::Profile::Gaussian;
    auto axis = linspace(-2e14, 2e14, 101);
    auto grid = build_jsa(PumpModel::continuous_wave(), crystal, axis, axis);
    double diag_mass = 0.0;
    for (int i = 0; i < 101; ++i) diag_mass += std::norm(grid.values(i, 100 - i));
    CHECK(diag_mass > 0.999);
  }
  SUBCASE("axes must increase strictly") {
    Eigen::VectorXd bad(3);
    bad << 0.0, 1.0, 1.0;
    CrystalModel crystal;
    CHECK_THROWS_AS(build_jsa(PumpModel::continuous_wave(1.0), crystal, bad, bad),
                    std::invalid_argument);
  }
}

TEST_CASE("schmidt_analysis") {
  SUBCASE("product grid") {
    JsaGrid grid;
    grid.axis_i = linspace(0, 1, 4);
    grid.axis_s = linspace(0, 1, 4);
    Eigen::VectorXcd u = Eigen::VectorXcd::Random(4).normalized();
    Eigen::VectorXcd v = Eigen::VectorXcd::Random(4).normalized();
    grid.values = u * v.transpose();
    auto report = schmidt_analysis(grid);
    CHECK(report.entropy_ebits == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(report.schmidt_number == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("flat spectrum of d levels") {
    for (int d : {2, 3, 4, 5}) {
      JsaGrid grid;
      grid.axis_i = linspace(0, 1, d);
      grid.axis_s = linspace(0, 1, d);
      grid.values = Eigen::MatrixXcd::Identity(d, d) / std::sqrt(double(d));
      auto report = schmidt_analysis(grid);
      CHECK(report.entropy_ebits == doctest::Approx(std::log2(double(d))).epsilon(1e-12));
      CHECK(report.schmidt_number == doctest::Approx(double(d)).epsilon(1e-12));
    }
  }
  SUBCASE("double-Gaussian ratio 10 against the refined-grid oracle") {
    auto coarse = schmidt_analysis(double_gaussian_grid(10.0, 160));
    auto oracle = schmidt_analysis(double_gaussian_grid(10.0, 640));
    // Richardson-style check: the oracle itself must have settled.
    auto mid = schmidt_analysis(double_gaussian_grid(10.0, 320));
    CHECK(std::abs(oracle.schmidt_number - mid.schmidt_number) <
          0.1 * std::abs(mid.schmidt_number - coarse.schmidt_number) + 1e-9);
    CHECK(std::abs(coarse.schmidt_number - oracle.schmidt_number) / oracle.schmidt_number < 0.005);
    // Mehler closed form for the sigma ratio r: K = (r + 1/r)/2 = 5.05.
    CHECK(oracle.schmidt_number == doctest::Approx(5.05).epsilon(1e-6));
  }
  SUBCASE("invariants on random grids") {
    auto rng = make_engine(5);
    for (int trial = 0; trial < 10; ++trial) {
      JsaGrid grid;
      grid.axis_i = linspace(-1, 1, 24);
      grid.axis_s = linspace(-1, 1, 24);
      grid.values.resize(24, 24);
      for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 24; ++j)
          grid.values(i, j) = Complex(normal_sample(rng), normal_sample(rng));
      grid.values /= grid.values.norm();
      auto report = schmidt_analysis(grid);
      CHECK(report.schmidt_number >= 1.0);
      CHECK(report.entropy_ebits >= 0.0);
      CHECK(report.schmidt_number <= std::pow(2.0, report.entropy_ebits) * (1 + 1e-12));
    }
  }
  SUBCASE("equality K = 2^E only for flat spectra") {
    JsaGrid grid;
    grid.axis_i = linspace(0, 1, 3);
    grid.axis_s = linspace(0, 1, 3);
    grid.values = Eigen::MatrixXcd::Zero(3, 3);
    grid.values.diagonal() << 0.8, 0.5, std::sqrt(1.0 - 0.64 - 0.25);
    auto report = schmidt_analysis(grid);
    CHECK(report.schmidt_number < std::pow(2.0, report.entropy_ebits) - 1e-6);
  }
  SUBCASE("non-finite grid throws") {
    JsaGrid grid;
    grid.axis_i = linspace(0, 1, 2);
    grid.axis_s = linspace(0, 1, 2);
    grid.values = Eigen::MatrixXcd::Zero(2, 2);
    grid.values(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(schmidt_analysis(grid), std::invalid_argument);
  }
}

TEST_CASE("bin coefficients, cw path") {
  CrystalModel crystal;  // sinc, 105 nm
  const double unit = crystal.fwhm_rad();
  auto bins = signal_bins(3, 0.05 * unit, 0.35 * unit);

  SUBCASE("mirror-paired bins give a diagonal matrix") {
    auto c = bin_coefficients(PumpModel::continuous_wave(), crystal, mirrored(bins), bins);
    double offdiag = c.squaredNorm() - c.diagonal().squaredNorm();
    CHECK(offdiag < 1e-15);
    CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("unpaired signal bin gets a zero column") {
    auto bins_i = mirrored(bins);
    auto bins_s = bins;
    bins_s.emplace_back(0.6 * unit, 0.01 * unit);  // no idler partner
    auto c = bin_coefficients(PumpModel::continuous_wave(), crystal, bins_i, bins_s);
    CHECK(c.col(3).norm() == 0.0);
  }
  SUBCASE("flat amplitude across bins equalizes the diagonal") {
    CrystalModel wide = crystal;
    wide.spdc_bandwidth_fwhm = 105e-3;  // 1e6 x wider than the bin span: flat
    auto c = bin_coefficients(PumpModel::continuous_wave(), wide, mirrored(bins), bins);
    Eigen::VectorXd mags = c.diagonal().cwiseAbs();
    CHECK((mags.maxCoeff() - mags.minCoeff()) / mags.maxCoeff() < 1e-9);
  }
  SUBCASE("overlapping bins throw") {
    auto bad = bins;
    bad.push_back(bins[1]);
    CHECK_THROWS_AS(bin_coefficients(PumpModel::continuous_wave(), crystal, mirrored(bad), bad),
                    std::invalid_argument);
  }
  SUBCASE("doubling quadrature resolution is converged") {
    QuadratureOptions base{64}, fine{128};
    auto c1 = bin_coefficients(PumpModel::continuous_wave(), crystal, mirrored(bins), bins, base);
    auto c2 = bin_coefficients(PumpModel::continuous_wave(), crystal, mirrored(bins), bins, fine);
    CHECK(((c1 - c2).cwiseAbs().maxCoeff()) < 1e-6 * c2.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("bin coefficients, pulsed and grid paths") {
  CrystalModel crystal;
  crystal.profile = CrystalModel::Profile::Gaussian;
  const double w = crystal.fwhm_rad();
  PumpModel pump = PumpModel::gaussian_pulse(2.0 * w);
  auto bins_s = signal_bins(2, 0.02 * w, 0.3 * w);
  auto bins_i = mirrored(bins_s);

  SUBCASE("analytic and sampled-grid quadratures agree") {
    auto c_analytic = bin_coefficients(pump, crystal, bins_i, bins_s);
    auto axis = linspace(-1.2 * w, 1.2 * w, 601);
    auto grid = build_jsa(pump, crystal, axis, axis);
    auto c_grid = bin_coefficients(grid, bins_i, bins_s);
    CHECK((c_analytic - c_grid).cwiseAbs().maxCoeff() < 2e-3);
  }
  SUBCASE("global complex rescaling of the amplitude is irrelevant") {
    auto axis = linspace(-1.2 * w, 1.2 * w, 201);
    auto grid = build_jsa(pump, crystal, axis, axis);
    auto c1 = bin_coefficients(grid, bins_i, bins_s);
    JsaGrid scaled = grid;
    scaled.values *= Complex(0.3, -1.7);
    auto c2 = bin_coefficients(scaled, bins_i, bins_s);
    Eigen::VectorXcd v1 = Eigen::Map<Eigen::VectorXcd>(c1.data(), c1.size());
    Eigen::VectorXcd v2 = Eigen::Map<Eigen::VectorXcd>(c2.data(), c2.size());
    CHECK(std::abs(std::abs(v1.dot(v2)) - 1.0) < 1e-12);
  }
  SUBCASE("bins outside the grid support throw") {
    auto axis = linspace(-0.1 * w, 0.1 * w, 32);
    auto grid = build_jsa(pump, crystal, axis, axis);
    CHECK_THROWS_AS(bin_coefficients(grid, bins_i, bins_s), std::invalid_argument);
  }
}

TEST_CASE("diagonal coefficients") {
  CrystalModel crystal;
  const double w = crystal.fwhm_rad();
  auto bins = signal_bins(3, 0.05 * w, 0.3 * w);

  auto diag = diagonal_coefficients(PumpModel::continuous_wave(), crystal, bins);
  CHECK(diag.size() == 3);
  CHECK(diag.norm() == doctest::Approx(1.0).epsilon(1e-12));
  auto full = bin_coefficients(PumpModel::continuous_wave(), crystal, mirrored(bins), bins);
  CHECK((diag - full.diagonal() / full.diagonal().norm()).norm() < 1e-12);

  // A broadband pulse has genuine off-diagonal mass: the wrapper must refuse.
  CrystalModel narrow = crystal;
  narrow.profile = CrystalModel::Profile::Gaussian;
  PumpModel broad = PumpModel::gaussian_pulse(40.0 * w);
  CHECK_THROWS_AS(diagonal_coefficients(broad, narrow, bins), std::runtime_error);
}

TEST_CASE("rectangular bins are orthonormal") {
  auto bins = signal_bins(4, 1.0, 9.0, 0.7);
  for (std::size_t j = 0; j < bins.size(); ++j) {
    for (std::size_t k = 0; k < bins.size(); ++k) {
      // Analytic integral of f_j f_k: amplitude product times overlap length.
      double lo = std::max(bins[j].lower(), bins[k].lower());
      double hi = std::min(bins[j].upper(), bins[k].upper());
      double overlap = std::max(hi - lo, 0.0);
      double integral = bins[j].amplitude() * bins[k].amplitude() * overlap;
      CHECK(integral == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-12));
    }
  }
}
