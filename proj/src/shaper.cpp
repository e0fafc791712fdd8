#include "fbq/shaper.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "fbq/rng.hpp"

namespace fbq {

TransferFunction::TransferFunction(Side side, std::vector<FrequencyBin> bins,
                                   Eigen::VectorXcd weights, double blur_sigma)
    : side_(side), bins_(std::move(bins)), weights_(std::move(weights)), blur_sigma_(blur_sigma) {
  if (static_cast<Eigen::Index>(bins_.size()) != weights_.size()) {
    throw std::invalid_argument("TransferFunction: weights/bins length mismatch");
  }
  if (!(blur_sigma_ >= 0.0) || !std::isfinite(blur_sigma_)) {
    throw std::invalid_argument("TransferFunction: blur_sigma must be finite and >= 0");
  }
  require_disjoint(bins_, "TransferFunction");
  for (const auto& b : bins_) {
    bool ok = (side_ == Side::Idler) ? (b.upper() <= 0.0) : (b.lower() >= 0.0);
    if (!ok) {
      throw std::invalid_argument(
          "TransferFunction: bin outside its spectral half (idler < 0 < signal)");
    }
  }
  for (Eigen::Index j = 0; j < weights_.size(); ++j) {
    if (std::abs(weights_(j)) > 1.0 + 1e-12) {
      throw std::invalid_argument("TransferFunction: |u_j| must be <= 1 (SLM attenuates only)");
    }
  }
}

namespace {

// Indicator of [lo, hi] convolved with a zero-mean Gaussian of width sigma.
double smoothed_indicator(double omega, double lo, double hi, double sigma) {
  if (sigma <= 0.0) return (omega >= lo && omega < hi) ? 1.0 : 0.0;
  const double inv = 1.0 / (sigma * M_SQRT2);
  return 0.5 * (std::erf((hi - omega) * inv) - std::erf((lo - omega) * inv));
}

}  // namespace

Complex evaluate_transfer(const TransferFunction& m, double omega) {
  Complex acc(0.0, 0.0);
  const auto& bins = m.bins();
  for (std::size_t j = 0; j < bins.size(); ++j) {
    double g = smoothed_indicator(omega, bins[j].lower(), bins[j].upper(), m.blur_sigma());
    if (g != 0.0) acc += m.weights()(static_cast<Eigen::Index>(j)) * bins[j].amplitude() * g;
  }
  return acc;
}

namespace {

// Composite 4-point Gauss-Legendre; nodes are interior, so jump
// discontinuities aligned with panel boundaries never get sampled.
Complex gauss_segment(const std::function<Complex(double)>& f, double lo, double hi, int panels) {
  static const double node[2] = {0.3399810435848563, 0.8611363115940526};
  static const double wgt[2] = {0.6521451548625461, 0.3478548451374538};
  const double h = (hi - lo) / panels;
  Complex acc(0.0, 0.0);
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (int q = 0; q < 2; ++q) {
      acc += wgt[q] * (f(mid - half * node[q]) + f(mid + half * node[q]));
    }
  }
  return acc * (0.5 * h);
}

}  // namespace

double coincidence_signal_continuum(const TransferFunction& m_i, const TransferFunction& m_s,
                                    const std::function<Complex(double)>& gamma,
                                    const SignalQuadrature& quad) {
  // Integrand support in w: idler bins directly, signal bins mirrored
  // (M_s is evaluated at -w), padded for blur tails.
  const double pad = quad.blur_padding_sigmas * std::max(m_i.blur_sigma(), m_s.blur_sigma());
  std::set<double> edges;
  for (const auto& b : m_i.bins()) {
    edges.insert(b.lower() - pad);
    edges.insert(b.lower() + pad);
    edges.insert(b.upper() - pad);
    edges.insert(b.upper() + pad);
  }
  for (const auto& b : m_s.bins()) {
    // -[lower, upper] = [-upper, -lower]
    edges.insert(-b.upper() - pad);
    edges.insert(-b.upper() + pad);
    edges.insert(-b.lower() - pad);
    edges.insert(-b.lower() + pad);
  }
  if (edges.size() < 2) return 0.0;
  std::vector<double> breakpoints(edges.begin(), edges.end());

  auto integrand = [&](double w) -> Complex {
    Complex mi = evaluate_transfer(m_i, w);
    if (mi == Complex(0.0, 0.0) && m_i.blur_sigma() <= 0.0) return {0.0, 0.0};
    Complex ms = evaluate_transfer(m_s, -w);
    if (ms == Complex(0.0, 0.0)) return {0.0, 0.0};
    return gamma(w) * mi * ms;
  };

  int panels = quad.initial_points_per_segment;
  Complex prev(0.0, 0.0);
  for (int pass = 0; pass <= quad.max_doublings; ++pass) {
    Complex total(0.0, 0.0);
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
      if (breakpoints[i + 1] - breakpoints[i] <= 0.0) continue;
      total += gauss_segment(integrand, breakpoints[i], breakpoints[i + 1], panels);
    }
    if (pass > 0) {
      double delta = std::abs(total - prev);
      double scale = std::max(std::abs(total), 1e-300);
      if (delta <= quad.rel_tolerance * scale || delta == 0.0) {
        double amp = std::abs(total);
        return amp * amp;
      }
    }
    prev = total;
    panels *= 2;
  }
  throw std::runtime_error(
      "coincidence_signal_continuum: quadrature did not converge to the requested tolerance");
}

double projective_signal(const Eigen::VectorXcd& u_i, const Eigen::VectorXcd& u_s,
                         const Eigen::VectorXcd& c) {
  if (u_i.size() != u_s.size() || u_i.size() != c.size()) {
    throw std::invalid_argument("projective_signal: vector length mismatch");
  }
  Complex amp = (u_i.array() * u_s.array() * c.array()).sum();
  return std::norm(amp);
}

CountRecord sample_counts(double signal, const DetectorModel& detector,
                          const std::string& projector_id) {
  if (!(signal >= 0.0) || !std::isfinite(signal)) {
    throw std::invalid_argument("sample_counts: signal must be finite and >= 0");
  }
  if (!(detector.integration_time > 0.0) || detector.peak_pair_rate < 0.0 ||
      detector.background_rate < 0.0) {
    throw std::invalid_argument("sample_counts: invalid detector model");
  }
  auto rng = make_engine(detector.rng_seed);
  const double t = detector.integration_time;
  CountRecord rec;
  rec.projector_id = projector_id;
  rec.integration_time = t;
  rec.raw_counts =
      poisson_sample(rng, signal * detector.peak_pair_rate * t + detector.background_rate * t);
  rec.background_counts = poisson_sample(rng, detector.background_rate * t);
  return rec;
}

Eigen::VectorXd procrustean_scalings(const Eigen::VectorXcd& c) {
  if (c.size() == 0) throw std::invalid_argument("procrustean_scalings: empty coefficients");
  Eigen::VectorXd mag = c.cwiseAbs();
  double lo = mag.minCoeff();
  if (lo <= 0.0) {
    throw std::invalid_argument(
        "procrustean_scalings: a coefficient is zero; that level cannot be equalized");
  }
  return (lo / mag.array()).matrix();
}

ProcrusteanResult procrustean_iterative(
    const std::function<std::vector<std::int64_t>(const Eigen::VectorXd&)>& measure, int levels,
    const ProcrusteanOptions& options) {
  if (levels < 2) throw std::invalid_argument("procrustean_iterative: need at least 2 levels");
  ProcrusteanResult result;
  result.scalings = Eigen::VectorXd::Ones(levels);

  auto balanced = [](const std::vector<std::int64_t>& n) {
    auto [lo, hi] = std::minmax_element(n.begin(), n.end());
    double diff = static_cast<double>(*hi - *lo);
    return diff <= 2.0 * std::sqrt(static_cast<double>(*hi + *lo));
  };

  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd intensity = result.scalings.array().square();
    std::vector<std::int64_t> counts = measure(intensity);
    if (static_cast<int>(counts.size()) != levels) {
      throw std::runtime_error("procrustean_iterative: measurement returned wrong level count");
    }
    result.iterations = it;
    result.final_counts = counts;
    if (balanced(counts)) {
      result.converged = true;
      break;
    }
    std::int64_t lo = *std::min_element(counts.begin(), counts.end());
    double lo_rate = std::max<double>(static_cast<double>(lo), 1.0);
    for (int j = 0; j < levels; ++j) {
      double nj = std::max<double>(static_cast<double>(counts[j]), 1.0);
      result.scalings(j) *= std::sqrt(lo_rate / nj);
    }
    result.scalings /= result.scalings.maxCoeff();  // weakest level at full transmission
  }
  return result;
}

}  // namespace fbq
