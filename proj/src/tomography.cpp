#include "fbq/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fbq/optim.hpp"
#include "fbq/rng.hpp"

namespace fbq {

PhotonProjector PhotonProjector::single(int j) {
  PhotonProjector p;
  p.kind = Kind::SingleBin;
  p.j1 = j;
  return p;
}

PhotonProjector PhotonProjector::superposition(int j1, int j2, double alpha) {
  if (j1 >= j2) throw std::invalid_argument("PhotonProjector: need j1 < j2");
  PhotonProjector p;
  p.kind = Kind::TwoBinSuperposition;
  p.j1 = j1;
  p.j2 = j2;
  p.alpha = alpha;
  return p;
}

Eigen::VectorXcd PhotonProjector::ket(int d) const {
  if (j1 < 0 || j1 >= d || (kind == Kind::TwoBinSuperposition && (j2 < 0 || j2 >= d))) {
    throw std::invalid_argument("PhotonProjector: bin index out of range");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
  if (kind == Kind::SingleBin) {
    v(j1) = Complex(1.0, 0.0);
  } else {
    const double inv = 1.0 / std::sqrt(2.0);
    v(j1) = Complex(inv, 0.0);
    v(j2) = std::polar(inv, alpha);
  }
  return v;
}

std::string PhotonProjector::id() const {
  if (kind == Kind::SingleBin) return "b" + std::to_string(j1);
  const char* phase = (alpha == 0.0) ? "p0" : "p1";
  return "s" + std::to_string(j1) + std::to_string(j2) + phase;
}

Eigen::VectorXcd ProjectorSpec::ket(int d) const {
  Eigen::VectorXcd ki = idler.ket(d);
  Eigen::VectorXcd ks = signal.ket(d);
  Eigen::VectorXcd out(d * d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) out(j * d + k) = ki(j) * ks(k);
  return out;
}

std::string ProjectorSpec::id() const { return idler.id() + "x" + signal.id(); }

namespace {

std::vector<PhotonProjector> photon_basis(int d) {
  std::vector<PhotonProjector> out;
  for (int j = 0; j < d; ++j) out.push_back(PhotonProjector::single(j));
  for (int j1 = 0; j1 < d; ++j1) {
    for (int j2 = j1 + 1; j2 < d; ++j2) {
      out.push_back(PhotonProjector::superposition(j1, j2, 0.0));
      out.push_back(PhotonProjector::superposition(j1, j2, M_PI / 2.0));
    }
  }
  return out;
}

}  // namespace

std::vector<ProjectorSpec> tomography_basis(int d) {
  if (d < 2) throw std::invalid_argument("tomography_basis: d must be >= 2");
  auto per_photon = photon_basis(d);
  std::vector<ProjectorSpec> out;
  out.reserve(per_photon.size() * per_photon.size());
  for (const auto& pi : per_photon)
    for (const auto& ps : per_photon) out.push_back(ProjectorSpec{pi, ps});
  return out;
}

int measurement_rank(const std::vector<ProjectorSpec>& basis, int d) {
  const int D = d * d;
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(basis.size()), D * D);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Eigen::VectorXcd chi = basis[k].ket(d);
    Eigen::MatrixXcd proj = chi * chi.adjoint();
    for (int c = 0; c < D; ++c)
      for (int r = 0; r < D; ++r) A(static_cast<Eigen::Index>(k), c * D + r) = proj(r, c);
  }
  return static_cast<int>(A.colPivHouseholderQr().rank());
}

void TomographyRun::validate() const {
  if (dim < 2) throw std::invalid_argument("TomographyRun: dim must be >= 2");
  if (projectors.size() != counts.size() || projectors.empty()) {
    throw std::invalid_argument("TomographyRun: projector/count lists misaligned");
  }
  for (const auto& r : counts) {
    if (r.raw_counts < 0 || r.background_counts < 0) {
      throw std::invalid_argument("TomographyRun: negative counts");
    }
  }
  const int want = dim * dim * dim * dim;
  if (measurement_rank(projectors, dim) != want) {
    throw std::invalid_argument("TomographyRun: measurement set is informationally incomplete");
  }
}

Eigen::VectorXd TomographyRun::net_counts() const {
  Eigen::VectorXd n(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    n(static_cast<Eigen::Index>(k)) = static_cast<double>(counts[k].net());
  }
  return n;
}

namespace {

TomographyRun simulate_impl(const DensityMatrix& state, const std::vector<ProjectorSpec>& basis,
                            const DetectorModel& detector, bool poisson) {
  const int d = state.qudit_dim();
  Eigen::VectorXd p(static_cast<Eigen::Index>(basis.size()));
  double peak = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Eigen::VectorXcd chi = basis[k].ket(d);
    double pk = std::real(chi.dot(state.matrix() * chi));  // <chi|rho|chi>
    p(static_cast<Eigen::Index>(k)) = std::max(pk, 0.0);
    bool single_pair = basis[k].idler.kind == PhotonProjector::Kind::SingleBin &&
                       basis[k].signal.kind == PhotonProjector::Kind::SingleBin;
    if (single_pair) peak = std::max(peak, pk);
  }
  if (peak <= 0.0) peak = p.maxCoeff();
  if (peak <= 0.0) throw std::runtime_error("simulate_tomography: state has no signal support");

  TomographyRun run;
  run.dim = d;
  run.projectors = basis;
  run.counts.reserve(basis.size());
  const double t = detector.integration_time;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    double signal = p(static_cast<Eigen::Index>(k)) / peak;
    if (poisson) {
      DetectorModel det_k = detector;
      det_k.rng_seed = derive_seed(detector.rng_seed, k);
      run.counts.push_back(sample_counts(signal, det_k, basis[k].id()));
    } else {
      CountRecord rec;
      rec.projector_id = basis[k].id();
      rec.integration_time = t;
      rec.raw_counts = std::llround(signal * detector.peak_pair_rate * t +
                                    detector.background_rate * t);
      rec.background_counts = std::llround(detector.background_rate * t);
      run.counts.push_back(rec);
    }
  }
  return run;
}

}  // namespace

TomographyRun simulate_tomography(const DensityMatrix& state,
                                  const std::vector<ProjectorSpec>& basis,
                                  const DetectorModel& detector) {
  return simulate_impl(state, basis, detector, true);
}

TomographyRun expected_tomography(const DensityMatrix& state,
                                  const std::vector<ProjectorSpec>& basis,
                                  const DetectorModel& detector) {
  return simulate_impl(state, basis, detector, false);
}

namespace {

// Packing of the complex lower-triangular T into real parameters:
// D real diagonal entries, then (Re, Im) per strictly-lower entry.
Eigen::MatrixXcd unpack_t(const Eigen::VectorXd& theta, int D) {
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(D, D);
  int idx = 0;
  for (int r = 0; r < D; ++r) T(r, r) = Complex(theta(idx++), 0.0);
  for (int r = 0; r < D; ++r) {
    for (int c = 0; c < r; ++c) {
      double re = theta(idx++);
      double im = theta(idx++);
      T(r, c) = Complex(re, im);
    }
  }
  return T;
}

Eigen::VectorXd pack_t(const Eigen::MatrixXcd& T) {
  const int D = static_cast<int>(T.rows());
  Eigen::VectorXd theta(D * D);
  int idx = 0;
  for (int r = 0; r < D; ++r) theta(idx++) = T(r, r).real();
  for (int r = 0; r < D; ++r) {
    for (int c = 0; c < r; ++c) {
      theta(idx++) = T(r, c).real();
      theta(idx++) = T(r, c).imag();
    }
  }
  return theta;
}

Eigen::VectorXd pack_gradient(const Eigen::MatrixXcd& G) {
  const int D = static_cast<int>(G.rows());
  Eigen::VectorXd g(D * D);
  int idx = 0;
  for (int r = 0; r < D; ++r) g(idx++) = 2.0 * G(r, r).real();
  for (int r = 0; r < D; ++r) {
    for (int c = 0; c < r; ++c) {
      g(idx++) = 2.0 * G(r, c).real();
      g(idx++) = 2.0 * G(r, c).imag();
    }
  }
  return g;
}

// Factor rho = T^dag T with T lower-triangular, via Cholesky of the
// index-reversed matrix.
Eigen::MatrixXcd reverse_cholesky_lower(const Eigen::MatrixXcd& rho) {
  const int D = static_cast<int>(rho.rows());
  Eigen::MatrixXcd rev(D, D);
  for (int r = 0; r < D; ++r)
    for (int c = 0; c < D; ++c) rev(r, c) = rho(D - 1 - r, D - 1 - c);
  Eigen::LLT<Eigen::MatrixXcd> llt(rev);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("reverse_cholesky_lower: factorization failed");
  }
  Eigen::MatrixXcd L = llt.matrixL();
  Eigen::MatrixXcd R(D, D);  // upper triangular, rho = R R^dag
  for (int r = 0; r < D; ++r)
    for (int c = 0; c < D; ++c) R(r, c) = L(D - 1 - r, D - 1 - c);
  return R.adjoint();  // lower triangular T with T^dag T = R R^dag = rho
}

Eigen::MatrixXcd initial_t(int D, const Eigen::MatrixXcd& X, const Eigen::VectorXd& q) {
  // Linear-inversion estimate: least-squares solve of Tr(rho Pi_k) = q_k.
  const Eigen::Index K = X.cols();
  Eigen::MatrixXcd A(K, D * D);
  for (Eigen::Index k = 0; k < K; ++k) {
    Eigen::MatrixXcd proj = X.col(k) * X.col(k).adjoint();
    for (int c = 0; c < D; ++c)
      for (int r = 0; r < D; ++r) A(k, c * D + r) = std::conj(proj(r, c));
  }
  Eigen::VectorXcd x = A.colPivHouseholderQr().solve(q.cast<Complex>());
  Eigen::MatrixXcd rho(D, D);
  for (int c = 0; c < D; ++c)
    for (int r = 0; r < D; ++r) rho(r, c) = x(c * D + r);
  rho = 0.5 * (rho + rho.adjoint().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  double floor = 1e-6;
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
  rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  rho /= rho.trace().real();
  try {
    return reverse_cholesky_lower(rho);
  } catch (const std::exception&) {
    return Eigen::MatrixXcd::Identity(D, D) * std::sqrt(1.0 / D);
  }
}

}  // namespace

MleObjective::MleObjective(int d, const std::vector<ProjectorSpec>& projectors,
                           const Eigen::VectorXd& net_counts)
    : D_(d * d), counts_(net_counts) {
  const Eigen::Index K = static_cast<Eigen::Index>(projectors.size());
  if (net_counts.size() != K || K == 0) {
    throw std::invalid_argument("mle_reconstruct: counts/projectors misaligned");
  }
  if (net_counts.minCoeff() < 0.0) {
    throw std::invalid_argument("mle_reconstruct: negative counts");
  }
  total_ = net_counts.sum();
  if (!(total_ > 0.0)) throw std::invalid_argument("mle_reconstruct: no counts recorded");
  X_.resize(D_, K);
  for (Eigen::Index k = 0; k < K; ++k) X_.col(k) = projectors[k].ket(d);
}

// Count-normalized negative profile log-likelihood; the count scale is
// profiled out exactly: mu_k = N w_k / W with w_k = |T chi_k|^2.
double MleObjective::operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  const Eigen::Index K = X_.cols();
  Eigen::MatrixXcd T = unpack_t(theta, D_);
  Eigen::MatrixXcd TX = T * X_;
  Eigen::VectorXd w = TX.colwise().squaredNorm().real().transpose();
  w = w.cwiseMax(1e-300);
  const double W = w.sum();
  double f = std::log(W);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (counts_(k) > 0.0) f -= (counts_(k) / total_) * std::log(w(k));
  }
  Eigen::VectorXd beta(K);
  for (Eigen::Index k = 0; k < K; ++k) beta(k) = 1.0 / W - counts_(k) / (total_ * w(k));
  Eigen::MatrixXcd G = TX * beta.asDiagonal() * X_.adjoint();
  grad = pack_gradient(G);
  return f;
}

double MleObjective::log_likelihood(double objective_value) const {
  return -total_ * objective_value + total_ * std::log(total_) - total_;
}

MleResult mle_reconstruct_counts(int d, const std::vector<ProjectorSpec>& projectors,
                                 const Eigen::VectorXd& net_counts, const MleOptions& options) {
  const int D = d * d;
  MleObjective objective(d, projectors, net_counts);
  const double N = net_counts.sum();

  Eigen::MatrixXcd X(D, static_cast<Eigen::Index>(projectors.size()));
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    X.col(static_cast<Eigen::Index>(k)) = projectors[k].ket(d);
  }
  Eigen::VectorXd q = net_counts / N;
  Eigen::VectorXd theta0 = pack_t(initial_t(D, X, q));

  LbfgsOptions lopt;
  lopt.max_iterations = options.max_iterations;
  lopt.f_tolerance = options.tolerance;
  lopt.gradient_tolerance = options.gradient_tolerance;
  LbfgsResult sol = minimize_lbfgs(
      [&objective](const Eigen::VectorXd& th, Eigen::VectorXd& g) { return objective(th, g); },
      std::move(theta0), lopt);

  // The accepted-iterate trace must be monotone in the likelihood.
  for (std::size_t i = 1; i < sol.f_trace.size(); ++i) {
    if (sol.f_trace[i] > sol.f_trace[i - 1] + 1e-12 * (std::abs(sol.f_trace[i - 1]) + 1.0)) {
      throw std::logic_error("mle_reconstruct: log-likelihood decreased across iterations");
    }
  }
  if (!sol.converged) {
    throw std::runtime_error("mle_reconstruct: optimizer did not converge (gradient norm " +
                             std::to_string(sol.gradient_norm) + ")");
  }

  Eigen::MatrixXcd T = unpack_t(sol.x, D);
  Eigen::MatrixXcd rho = T.adjoint() * T;
  double tau = rho.trace().real();
  rho /= tau;

  Eigen::MatrixXcd TX = T * X;
  Eigen::VectorXd w = TX.colwise().squaredNorm().real().transpose().cwiseMax(1e-300);
  const double W = w.sum();

  MleResult result{DensityMatrix(0.5 * (rho + rho.adjoint().eval()))};
  result.iterations = sol.iterations;
  result.final_gradient_norm = sol.gradient_norm;
  result.scale = N * tau / W;
  result.likelihood_trace.reserve(sol.f_trace.size());
  for (double f : sol.f_trace) result.likelihood_trace.push_back(objective.log_likelihood(f));
  result.log_likelihood = result.likelihood_trace.back();
  return result;
}

MleResult mle_reconstruct(const TomographyRun& run) {
  run.validate();
  return mle_reconstruct_counts(run.dim, run.projectors, run.net_counts(), run.options);
}

MonteCarloError monte_carlo_error(const TomographyRun& run,
                                  const std::function<double(const DensityMatrix&)>& statistic,
                                  int n_samples, std::uint64_t seed, int threads,
                                  double noise_scale) {
  if (n_samples < 2) throw std::invalid_argument("monte_carlo_error: need n_samples >= 2");
  run.validate();
  const Eigen::VectorXd base = run.net_counts();

  std::vector<double> values(n_samples, 0.0);
  std::vector<char> failed(n_samples, 0);

  auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      auto rng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
      Eigen::VectorXd noisy(base.size());
      for (Eigen::Index k = 0; k < base.size(); ++k) {
        double sigma = noise_scale * std::sqrt(std::max(base(k), 0.0));
        double n = base(k) + (sigma > 0.0 ? normal_sample(rng, 0.0, sigma) : 0.0);
        noisy(k) = std::max(n, 0.0);
      }
      try {
        MleResult res = mle_reconstruct_counts(run.dim, run.projectors, noisy, run.options);
        values[static_cast<std::size_t>(i)] = statistic(res.rho);
      } catch (const std::exception&) {
        failed[static_cast<std::size_t>(i)] = 1;
      }
    }
  };

  if (threads <= 1) {
    worker(0, n_samples);
  } else {
    int n_threads = std::min(threads, n_samples);
    std::vector<std::thread> pool;
    int chunk = (n_samples + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      int b = t * chunk;
      int e = std::min(n_samples, b + chunk);
      if (b < e) pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
  }

  MonteCarloError out;
  std::vector<double> good;
  good.reserve(values.size());
  for (int i = 0; i < n_samples; ++i) {
    if (failed[static_cast<std::size_t>(i)]) {
      ++out.n_failures;
    } else {
      good.push_back(values[static_cast<std::size_t>(i)]);
    }
  }
  if (out.n_failures > n_samples / 10) {
    throw std::runtime_error("monte_carlo_error: more than 10% of resamples failed (" +
                             std::to_string(out.n_failures) + "/" + std::to_string(n_samples) +
                             ")");
  }
  double mean = 0.0;
  for (double v : good) mean += v;
  mean /= static_cast<double>(good.size());
  double var = 0.0;
  for (double v : good) var += (v - mean) * (v - mean);
  var /= static_cast<double>(good.size() - 1);
  out.mean = mean;
  out.two_sigma = 2.0 * std::sqrt(var);
  return out;
}

}  // namespace fbq
