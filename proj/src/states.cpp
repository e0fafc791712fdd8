#include "fbq/states.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fbq {

namespace {

int qudit_dim_from_total(Eigen::Index total) {
  int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(total))));
  if (d < 2 || static_cast<Eigen::Index>(d) * d != total) {
    throw std::invalid_argument("DensityMatrix: dimension must be d^2 with d >= 2");
  }
  return d;
}

}  // namespace

BipartiteStateVector::BipartiteStateVector(Eigen::MatrixXcd coefficients)
    : coeffs_(std::move(coefficients)) {
  if (coeffs_.rows() != coeffs_.cols() || coeffs_.rows() < 2) {
    throw std::invalid_argument("BipartiteStateVector: coefficients must be d x d, d >= 2");
  }
  if (!coeffs_.allFinite()) {
    throw std::invalid_argument("BipartiteStateVector: non-finite coefficients");
  }
  double n = coeffs_.norm();
  if (n <= 0.0) throw std::invalid_argument("BipartiteStateVector: zero state");
  coeffs_ /= n;
}

BipartiteStateVector BipartiteStateVector::from_diagonal(const Eigen::VectorXcd& diagonal) {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(diagonal.size(), diagonal.size());
  c.diagonal() = diagonal;
  return BipartiteStateVector(std::move(c));
}

Eigen::VectorXcd BipartiteStateVector::ket() const {
  const int d = dim();
  Eigen::VectorXcd v(d * d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) v(j * d + k) = coeffs_(j, k);
  return v;
}

double BipartiteStateVector::offdiagonal_mass() const {
  double off = coeffs_.squaredNorm() - coeffs_.diagonal().squaredNorm();
  return std::max(off, 0.0);
}

Eigen::VectorXcd BipartiteStateVector::diagonal(double offdiag_tolerance) const {
  if (offdiagonal_mass() > offdiag_tolerance) {
    throw std::runtime_error("BipartiteStateVector: off-diagonal mass " +
                             std::to_string(offdiagonal_mass()) +
                             " exceeds tolerance; bins are not mirror-paired");
  }
  Eigen::VectorXcd diag = coeffs_.diagonal();
  return diag / diag.norm();
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd elements) : m_(std::move(elements)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("DensityMatrix: not square");
  qudit_dim_ = qudit_dim_from_total(m_.rows());
  if (!m_.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
  double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > hermiticity_tolerance) {
    throw std::invalid_argument("DensityMatrix: not Hermitian (deviation " +
                                std::to_string(herm) + ")");
  }
  m_ = 0.5 * (m_ + m_.adjoint().eval());  // exact Hermitian from here on
  double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > trace_tolerance) {
    throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < eigenvalue_floor) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::from_pure(const BipartiteStateVector& psi) {
  Eigen::VectorXcd k = psi.ket();
  return DensityMatrix(k * k.adjoint());
}

BipartiteStateVector maximally_entangled(int d) {
  if (d < 2) throw std::invalid_argument("maximally_entangled: d must be >= 2");
  Eigen::VectorXcd diag = Eigen::VectorXcd::Constant(d, Complex(1.0 / std::sqrt(double(d)), 0.0));
  return BipartiteStateVector::from_diagonal(diag);
}

BipartiteStateVector gamma_state(int d, double gamma) {
  if (d != 2 && d != 3) throw std::invalid_argument("gamma_state: d must be 2 or 3");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma_state: gamma must be in [0,1]");
  }
  Eigen::VectorXcd diag(d);
  if (d == 2) {
    diag << Complex(1.0, 0.0), Complex(gamma, 0.0);
  } else {
    diag << Complex(1.0, 0.0), Complex(gamma, 0.0), Complex(1.0, 0.0);
  }
  return BipartiteStateVector::from_diagonal(diag);  // ctor normalizes
}

DensityMatrix symmetric_noise(const BipartiteStateVector& psi, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("symmetric_noise: lambda must be in [0,1]");
  }
  Eigen::VectorXcd k = psi.ket();
  const Eigen::Index n = k.size();
  Eigen::MatrixXcd m = lambda * (k * k.adjoint());
  m += ((1.0 - lambda) / static_cast<double>(n)) * Eigen::MatrixXcd::Identity(n, n);
  return DensityMatrix(std::move(m));
}

Eigen::MatrixXcd sqrt_psd(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian);
  if (es.info() != Eigen::Success) throw std::runtime_error("sqrt_psd: eigensolver failed");
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < DensityMatrix::eigenvalue_floor) {
    throw std::invalid_argument("sqrt_psd: matrix is not PSD (eigenvalue " +
                                std::to_string(ev.minCoeff()) + ")");
  }
  Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.total_dim() != sigma.total_dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  Eigen::MatrixXcd sr = sqrt_psd(rho.matrix());
  Eigen::MatrixXcd inner = sr * sigma.matrix() * sr;
  inner = 0.5 * (inner + inner.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inner, Eigen::EigenvaluesOnly);
  double f = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(f, 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

namespace {

Eigen::MatrixXcd reduce(const Eigen::MatrixXcd& m, int d, Subsystem keep) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  if (keep == Subsystem::Idler) {
    for (int j = 0; j < d; ++j)
      for (int jp = 0; jp < d; ++jp)
        for (int k = 0; k < d; ++k) out(j, jp) += m(j * d + k, jp * d + k);
  } else {
    for (int k = 0; k < d; ++k)
      for (int kp = 0; kp < d; ++kp)
        for (int j = 0; j < d; ++j) out(k, kp) += m(j * d + k, j * d + kp);
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd reduced_density(const BipartiteStateVector& psi, Subsystem keep) {
  const Eigen::MatrixXcd& c = psi.coefficients();
  if (keep == Subsystem::Idler) return c * c.adjoint();
  return (c.adjoint() * c).transpose();
}

Eigen::MatrixXcd reduced_density(const DensityMatrix& rho, Subsystem keep) {
  return reduce(rho.matrix(), rho.qudit_dim(), keep);
}

}  // namespace fbq
