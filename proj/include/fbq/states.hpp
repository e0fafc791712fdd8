#pragma once

#include <Eigen/Dense>
#include <complex>

// Discrete d-level bipartite states and density matrices.
//
// Basis ordering of the d^2-dimensional bipartite space is row-major
// |j>_i |k>_s -> index j*d + k, fixed project-wide.

namespace fbq {

using Complex = std::complex<double>;

enum class Subsystem { Idler = 0, Signal = 1 };

// |psi> = sum_jk c_jk |j>_i |k>_s with sum |c_jk|^2 = 1.
class BipartiteStateVector {
 public:
  // Normalizes the coefficient matrix; throws on zero or non-finite input.
  explicit BipartiteStateVector(Eigen::MatrixXcd coefficients);
  static BipartiteStateVector from_diagonal(const Eigen::VectorXcd& diagonal);

  int dim() const { return static_cast<int>(coeffs_.rows()); }
  const Eigen::MatrixXcd& coefficients() const { return coeffs_; }
  // Flattened ket of length d^2, index j*d+k.
  Eigen::VectorXcd ket() const;
  // Diagonal c_j; throws when off-diagonal mass exceeds tolerance.
  Eigen::VectorXcd diagonal(double offdiag_tolerance = 1e-9) const;
  double offdiagonal_mass() const;

 private:
  Eigen::MatrixXcd coeffs_;
};

// Hermitian, positive-semidefinite, unit-trace operator on the d^2 space.
// Eigenvalues down to -1e-10 are treated as numerical jitter and clipped to
// zero wherever a spectral function is taken; below that construction throws.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd elements);
  static DensityMatrix from_pure(const BipartiteStateVector& psi);

  int total_dim() const { return static_cast<int>(m_.rows()); }
  int qudit_dim() const { return qudit_dim_; }
  const Eigen::MatrixXcd& matrix() const { return m_; }

  static constexpr double hermiticity_tolerance = 1e-12;
  static constexpr double trace_tolerance = 1e-12;
  static constexpr double eigenvalue_floor = -1e-10;

 private:
  Eigen::MatrixXcd m_;
  int qudit_dim_ = 0;
};

BipartiteStateVector maximally_entangled(int d);

// (|00> + gamma|11>)/sqrt(1+gamma^2) for d=2,
// (|00> + gamma|11> + |22>)/sqrt(2+gamma^2) for d=3.
BipartiteStateVector gamma_state(int d, double gamma);

// lambda |psi><psi| + (1-lambda) I/d^2.
DensityMatrix symmetric_noise(const BipartiteStateVector& psi, double lambda);

// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), symmetric, in [0,1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

double purity(const DensityMatrix& rho);

Eigen::MatrixXcd reduced_density(const BipartiteStateVector& psi, Subsystem keep);
Eigen::MatrixXcd reduced_density(const DensityMatrix& rho, Subsystem keep);

// PSD-respecting matrix square root: negative eigenvalues within the jitter
// floor are clipped to zero, anything lower throws.
Eigen::MatrixXcd sqrt_psd(const Eigen::MatrixXcd& hermitian);

}  // namespace fbq
