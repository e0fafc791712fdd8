#include "fbq/bell.hpp"

#include <cmath>
#include <stdexcept>

#include "fbq/rng.hpp"

namespace fbq {

double DetectionSettings::alpha(int a) const {
  if (a == 1) return alpha1;
  if (a == 2) return alpha2;
  throw std::invalid_argument("DetectionSettings: setting index must be 1 or 2");
}

double DetectionSettings::beta(int b) const {
  if (b == 1) return beta1;
  if (b == 2) return beta2;
  throw std::invalid_argument("DetectionSettings: setting index must be 1 or 2");
}

Eigen::VectorXcd cglmp_vector(int d, BellSide side, int setting, int outcome,
                              const DetectionSettings& settings) {
  if (d < 2) throw std::invalid_argument("cglmp_vector: d must be >= 2");
  if (outcome < 0 || outcome >= d) throw std::invalid_argument("cglmp_vector: outcome out of range");
  const double phase_offset = (side == BellSide::A) ? (outcome + settings.alpha(setting))
                                                    : (-outcome + settings.beta(setting));
  Eigen::VectorXcd v(d);
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    v(j) = std::polar(inv, 2.0 * M_PI / d * j * phase_offset);
  }
  return v;
}

namespace {

Eigen::MatrixXd normalize_table(Eigen::MatrixXd p, const char* context) {
  double total = p.sum();
  if (!(total > 0.0)) {
    throw std::runtime_error(std::string(context) + ": all-zero probability table");
  }
  return p / total;
}

template <typename AmplitudeFn>
Eigen::MatrixXd table_from(int d, const DetectionSettings& settings, int a, int b,
                           const AmplitudeFn& probability) {
  Eigen::MatrixXd p(d, d);
  for (int m = 0; m < d; ++m) {
    Eigen::VectorXcd va = cglmp_vector(d, BellSide::A, a, m, settings);
    for (int n = 0; n < d; ++n) {
      Eigen::VectorXcd vb = cglmp_vector(d, BellSide::B, b, n, settings);
      p(m, n) = probability(va, vb);
    }
  }
  return normalize_table(std::move(p), "joint_probabilities");
}

}  // namespace

Eigen::MatrixXd joint_probabilities(const BipartiteStateVector& state,
                                    const DetectionSettings& settings, int a, int b) {
  const int d = state.dim();
  const Eigen::MatrixXcd& c = state.coefficients();
  return table_from(d, settings, a, b,
                    [&](const Eigen::VectorXcd& va, const Eigen::VectorXcd& vb) {
                      // <chi_mn | psi> with chi = va x vb
                      Complex amp = va.adjoint() * c * vb.conjugate();
                      return std::norm(amp);
                    });
}

Eigen::MatrixXd joint_probabilities(const DensityMatrix& state, const DetectionSettings& settings,
                                    int a, int b) {
  const int d = state.qudit_dim();
  return table_from(d, settings, a, b,
                    [&](const Eigen::VectorXcd& va, const Eigen::VectorXcd& vb) {
                      Eigen::VectorXcd chi(d * d);
                      for (int j = 0; j < d; ++j)
                        for (int k = 0; k < d; ++k) chi(j * d + k) = va(j) * vb(k);
                      return std::real(chi.dot(state.matrix() * chi));
                    });
}

namespace {

template <typename StateT>
BellTables tables_impl(const StateT& state, int d, const DetectionSettings& settings) {
  BellTables t;
  t.dim = d;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) t.at(a, b) = joint_probabilities(state, settings, a, b);
  return t;
}

}  // namespace

BellTables bell_tables(const BipartiteStateVector& state, const DetectionSettings& settings) {
  return tables_impl(state, state.dim(), settings);
}

BellTables bell_tables(const DensityMatrix& state, const DetectionSettings& settings) {
  return tables_impl(state, state.qudit_dim(), settings);
}

double prob_a_exceeds_b(const Eigen::MatrixXd& table, int k) {
  const int d = static_cast<int>(table.rows());
  const int kk = ((k % d) + d) % d;  // nonnegative residue
  double acc = 0.0;
  for (int j = 0; j < d; ++j) acc += table((j + kk) % d, j);
  return acc;
}

double prob_b_exceeds_a(const Eigen::MatrixXd& table, int k) {
  const int d = static_cast<int>(table.rows());
  const int kk = ((k % d) + d) % d;
  double acc = 0.0;
  for (int j = 0; j < d; ++j) acc += table(j, (j + kk) % d);
  return acc;
}

double cglmp_from_tables(const BellTables& t) {
  const int d = t.dim;
  if (d < 2) throw std::invalid_argument("cglmp_from_tables: d must be >= 2");
  double total = 0.0;
  for (int k = 0; k < d / 2; ++k) {
    const double weight = static_cast<double>(d - 1 - 2 * k) / static_cast<double>(d - 1);
    const double plus = prob_a_exceeds_b(t.at(1, 1), k) + prob_b_exceeds_a(t.at(2, 1), k + 1) +
                        prob_a_exceeds_b(t.at(2, 2), k) + prob_b_exceeds_a(t.at(1, 2), k);
    const double minus = prob_a_exceeds_b(t.at(1, 1), -k - 1) +
                         prob_b_exceeds_a(t.at(2, 1), -k) +
                         prob_a_exceeds_b(t.at(2, 2), -k - 1) +
                         prob_b_exceeds_a(t.at(1, 2), -k - 1);
    total += weight * (plus - minus);
  }
  return total;
}

double cglmp_parameter(const BipartiteStateVector& state, const DetectionSettings& settings) {
  return cglmp_from_tables(bell_tables(state, settings));
}

double cglmp_parameter(const DensityMatrix& state, const DetectionSettings& settings) {
  return cglmp_from_tables(bell_tables(state, settings));
}

double cglmp_explicit_qubit_qutrit(const BellTables& t) {
  if (t.dim != 2 && t.dim != 3) {
    throw std::invalid_argument("cglmp_explicit_qubit_qutrit: d must be 2 or 3");
  }
  return prob_a_exceeds_b(t.at(1, 1), 0) + prob_b_exceeds_a(t.at(2, 1), 1) +
         prob_a_exceeds_b(t.at(2, 2), 0) + prob_b_exceeds_a(t.at(1, 2), 0) -
         prob_a_exceeds_b(t.at(1, 1), -1) - prob_b_exceeds_a(t.at(2, 1), 0) -
         prob_a_exceeds_b(t.at(2, 2), -1) - prob_b_exceeds_a(t.at(1, 2), -1);
}

BellEstimate cglmp_from_counts(const BellTables& counts, int n_resamples, std::uint64_t seed) {
  const int d = counts.dim;
  if (d < 2) throw std::invalid_argument("cglmp_from_counts: d must be >= 2");
  for (const auto& table : counts.tables) {
    if (table.rows() != d || table.cols() != d) {
      throw std::invalid_argument("cglmp_from_counts: table dimension mismatch");
    }
    if (table.minCoeff() < 0.0) {
      throw std::invalid_argument("cglmp_from_counts: negative counts");
    }
    if (!(table.sum() > 0.0)) {
      throw std::runtime_error("cglmp_from_counts: zero-total count table");
    }
  }

  auto evaluate = [&](const BellTables& raw) {
    BellTables norm = raw;
    for (auto& table : norm.tables) table /= table.sum();
    return cglmp_from_tables(norm);
  };

  BellEstimate est;
  est.value = evaluate(counts);
  if (n_resamples < 2) return est;

  double mean = 0.0, m2 = 0.0;
  int n = 0;
  for (int r = 0; r < n_resamples; ++r) {
    auto rng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(r)));
    BellTables resampled = counts;
    for (auto& table : resampled.tables) {
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          table(i, j) = static_cast<double>(poisson_sample(rng, table(i, j)));
        }
      if (!(table.sum() > 0.0)) table(0, 0) = 1.0;  // degenerate resample; keep it usable
    }
    double v = evaluate(resampled);
    ++n;
    double delta = v - mean;
    mean += delta / n;
    m2 += delta * (v - mean);
  }
  est.two_sigma = 2.0 * std::sqrt(m2 / (n - 1));
  return est;
}

double local_deterministic_bound(int d) {
  if (d < 2) throw std::invalid_argument("local_deterministic_bound: d must be >= 2");
  if (d > 8) throw std::invalid_argument("local_deterministic_bound: enumeration capped at d = 8");

  // For a deterministic assignment the probability groups are indicators;
  // accumulate the integer-valued bracket per k, then weight.
  double best = -1e300;
  for (int a1 = 0; a1 < d; ++a1) {
    for (int a2 = 0; a2 < d; ++a2) {
      for (int b1 = 0; b1 < d; ++b1) {
        for (int b2 = 0; b2 < d; ++b2) {
          double value = 0.0;
          for (int k = 0; k < d / 2; ++k) {
            auto eq = [&](int lhs, int rhs, int shift) {
              return ((lhs - rhs - shift) % d + d) % d == 0 ? 1 : 0;
            };
            int plus = eq(a1, b1, k) + eq(b1, a2, k + 1) + eq(a2, b2, k) + eq(b2, a1, k);
            int minus = eq(a1, b1, -k - 1) + eq(b1, a2, -k) + eq(a2, b2, -k - 1) +
                        eq(b2, a1, -k - 1);
            const double weight = static_cast<double>(d - 1 - 2 * k) / (d - 1);
            value += weight * static_cast<double>(plus - minus);
          }
          best = std::max(best, value);
        }
      }
    }
  }
  return best;
}

double horodecki_chsh(const DensityMatrix& rho) {
  if (rho.total_dim() != 4) {
    throw std::invalid_argument("horodecki_chsh: requires a two-qubit state");
  }
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  const Eigen::Matrix2cd pauli[3] = {sx, sy, sz};

  Eigen::Matrix3d corr;
  for (int u = 0; u < 3; ++u) {
    for (int v = 0; v < 3; ++v) {
      Eigen::Matrix4cd op;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          op.block<2, 2>(2 * r, 2 * c) = pauli[u](r, c) * pauli[v];
      corr(u, v) = (rho.matrix() * op).trace().real();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(corr.transpose() * corr, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending
  return 2.0 * std::sqrt(std::max(ev(1) + ev(2), 0.0));
}

std::vector<GammaScanPoint> gamma_scan(int d, const std::vector<double>& gammas, double lambda,
                                       const DetectionSettings& settings) {
  std::vector<GammaScanPoint> curve;
  curve.reserve(gammas.size());
  for (double g : gammas) {
    DensityMatrix rho = symmetric_noise(gamma_state(d, g), lambda);
    curve.push_back({g, cglmp_parameter(rho, settings)});
  }
  return curve;
}

GammaOptimum bell_scan_argmax(int d, double lambda, const DetectionSettings& settings,
                              int grid_points, double tolerance) {
  if (grid_points < 3) throw std::invalid_argument("bell_scan_argmax: need >= 3 grid points");
  std::vector<double> gammas(grid_points);
  for (int i = 0; i < grid_points; ++i) gammas[i] = static_cast<double>(i) / (grid_points - 1);
  auto curve = gamma_scan(d, gammas, lambda, settings);

  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].bell > curve[best].bell) best = i;
  }
  double lo = (best == 0) ? gammas.front() : curve[best - 1].gamma;
  double hi = (best + 1 == curve.size()) ? gammas.back() : curve[best + 1].gamma;

  auto value_at = [&](double g) {
    return cglmp_parameter(symmetric_noise(gamma_state(d, g), lambda), settings);
  };

  // Golden-section search on [lo, hi].
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = value_at(x1);
  double f2 = value_at(x2);
  while (hi - lo > tolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = value_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = value_at(x1);
    }
  }
  double g = 0.5 * (lo + hi);
  return {g, value_at(g)};
}

}  // namespace fbq
