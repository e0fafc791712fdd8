#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fbq/bell.hpp"
#include "fbq/rng.hpp"
#include "fbq/shaper.hpp"
#include "test_helpers.hpp"

using namespace fbq;

namespace {

constexpr double kTwoSqrtTwo = 2.8284271247461903;
// 4/(6 sqrt 3 - 9): the qutrit value on the maximally entangled state.
constexpr double kQutritMax = 2.8729340511723347;
constexpr double kGammaMax = 0.7922869913932613;  // (sqrt 11 - sqrt 3)/2
constexpr double kQutritAtGammaMax = 2.914854215512676;

BipartiteStateVector random_product_state(std::mt19937_64& rng, int d) {
  Eigen::VectorXcd a = testing::random_unit_vector(rng, d);
  Eigen::VectorXcd b = testing::random_unit_vector(rng, d);
  return BipartiteStateVector(a * b.transpose());
}

}  // namespace

TEST_CASE("cglmp basis vectors") {
  SUBCASE("qubit A-side, first setting, outcome 0") {
    auto v = cglmp_vector(2, BellSide::A, 1, 0);
    CHECK(std::abs(v(0) - Complex(1 / std::sqrt(2.0), 0)) < 1e-15);
    CHECK(std::abs(v(1) - Complex(1 / std::sqrt(2.0), 0)) < 1e-15);
  }
  SUBCASE("qutrit B-side phases at beta = 1/4") {
    auto v = cglmp_vector(3, BellSide::B, 1, 0);
    CHECK(std::arg(v(0)) == doctest::Approx(0.0));
    CHECK(std::arg(v(1)) == doctest::Approx(M_PI / 6).epsilon(1e-12));
    CHECK(std::arg(v(2)) == doctest::Approx(M_PI / 3).epsilon(1e-12));
    for (int j = 0; j < 3; ++j) CHECK(std::abs(v(j)) == doctest::Approx(1 / std::sqrt(3.0)));
  }
  SUBCASE("every setting forms an orthonormal basis") {
    for (int d : {2, 3, 4, 5}) {
      for (auto side : {BellSide::A, BellSide::B}) {
        for (int setting : {1, 2}) {
          Eigen::MatrixXcd basis(d, d);
          for (int m = 0; m < d; ++m) basis.col(m) = cglmp_vector(d, side, setting, m);
          Eigen::MatrixXcd gram = basis.adjoint() * basis;
          CHECK((gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
        }
      }
    }
  }
  CHECK_THROWS_AS(cglmp_vector(3, BellSide::A, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(cglmp_vector(3, BellSide::A, 3, 0), std::invalid_argument);
}

TEST_CASE("joint probabilities") {
  SUBCASE("product state gives a rank-1 table") {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 2);
    c(0, 0) = 1.0;
    auto table = joint_probabilities(BipartiteStateVector(c), {}, 1, 2);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(table);
    CHECK(svd.singularValues()(1) < 1e-14);
    CHECK(table.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Bell state correlation at the paper settings") {
    auto table = joint_probabilities(maximally_entangled(2), {}, 1, 1);
    double p_same = table(0, 0) + table(1, 1);
    CHECK(p_same == doctest::Approx((2.0 + std::sqrt(2.0)) / 4.0).epsilon(1e-12));
  }
  SUBCASE("maximally mixed state is uniform") {
    auto rho = symmetric_noise(maximally_entangled(3), 0.0);
    auto table = joint_probabilities(rho, {}, 2, 1);
    CHECK((table.array() - 1.0 / 9.0).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("pure-state and density-matrix paths agree") {
    auto rng = make_engine(3);
    for (int trial = 0; trial < 5; ++trial) {
      auto psi = testing::random_pure_state(rng, 3);
      auto t1 = joint_probabilities(psi, {}, 2, 2);
      auto t2 = joint_probabilities(DensityMatrix::from_pure(psi), {}, 2, 2);
      CHECK((t1 - t2).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("cglmp parameter on reference states") {
  SUBCASE("qubit Bell state reaches 2 sqrt 2") {
    CHECK(cglmp_parameter(maximally_entangled(2)) == doctest::Approx(kTwoSqrtTwo).epsilon(1e-12));
  }
  SUBCASE("qutrit maximally entangled state") {
    CHECK(cglmp_parameter(maximally_entangled(3)) == doctest::Approx(kQutritMax).epsilon(1e-12));
  }
  SUBCASE("qutrit optimum sits at gamma_max") {
    CHECK(cglmp_parameter(gamma_state(3, kGammaMax)) ==
          doctest::Approx(kQutritAtGammaMax).epsilon(1e-12));
    auto opt = bell_scan_argmax(3, 1.0);
    CHECK(opt.gamma == doctest::Approx(kGammaMax).epsilon(2e-3));
    CHECK(opt.bell == doctest::Approx(kQutritAtGammaMax).epsilon(1e-6));
  }
  SUBCASE("general evaluator equals the explicit eight-term form") {
    auto rng = make_engine(11);
    for (int trial = 0; trial < 100; ++trial) {
      int d = (trial % 2 == 0) ? 2 : 3;
      auto psi = testing::random_pure_state(rng, d);
      auto tables = bell_tables(psi, {});
      CHECK(std::abs(cglmp_from_tables(tables) - cglmp_explicit_qubit_qutrit(tables)) < 1e-12);
    }
  }
  SUBCASE("noise linearity is exact") {
    auto rng = make_engine(19);
    for (int trial = 0; trial < 12; ++trial) {
      int d = (trial % 2 == 0) ? 2 : 3;
      double g = uniform_double(rng);
      double lam = uniform_double(rng);
      double ideal = cglmp_parameter(gamma_state(d, g));
      double mixed = cglmp_parameter(symmetric_noise(gamma_state(d, g), lam));
      CHECK(std::abs(mixed - lam * ideal) < 1e-12);
    }
  }
  SUBCASE("qubit curve is monotone, qutrit peaks strictly inside") {
    double prev2 = -1.0;
    for (int i = 0; i <= 100; ++i) {
      double g = i / 100.0;
      double v = cglmp_parameter(gamma_state(2, g));
      CHECK(v >= prev2 - 1e-12);
      prev2 = v;
    }
    double at_max = cglmp_parameter(gamma_state(3, kGammaMax));
    int rising = 0, falling = 0;
    double prev3 = 0.0;
    for (int i = 0; i <= 200; ++i) {
      double g = i / 200.0;
      double v = cglmp_parameter(gamma_state(3, g));
      CHECK(v <= at_max + 1e-9);
      if (i > 0) (v >= prev3 ? rising : falling) += 1;
      prev3 = v;
    }
    CHECK(rising > 0);
    CHECK(falling > 0);
  }
}

TEST_CASE("cglmp from count tables") {
  SUBCASE("counts proportional to ideal probabilities reproduce the state value") {
    auto tables = bell_tables(maximally_entangled(2), {});
    BellTables counts = tables;
    for (auto& t : counts.tables) t *= 8192.0;  // common scale cancels
    auto est = cglmp_from_counts(counts, 0, 1);
    CHECK(est.value == doctest::Approx(kTwoSqrtTwo).epsilon(1e-12));
  }
  SUBCASE("uniform counts give zero") {
    BellTables counts;
    counts.dim = 3;
    for (auto& t : counts.tables) t = Eigen::MatrixXd::Constant(3, 3, 57.0);
    auto est = cglmp_from_counts(counts, 0, 1);
    CHECK(est.value == doctest::Approx(0.0));
  }
  SUBCASE("noisy qutrit run lands within its error bar") {
    // Simulated counts at the paper's 13 Hz qutrit rate, 10 s per projector.
    auto ideal = bell_tables(maximally_entangled(3), {});
    double peak = 0.0;
    for (const auto& t : ideal.tables) peak = std::max(peak, t.maxCoeff());
    BellTables counts;
    counts.dim = 3;
    std::uint64_t stream = 0;
    for (int idx = 0; idx < 4; ++idx) {
      counts.tables[idx].resize(3, 3);
      for (int m = 0; m < 3; ++m) {
        for (int n = 0; n < 3; ++n) {
          DetectorModel det{13.0, 0.0, 10.0, derive_seed(515151, stream++)};
          counts.tables[idx](m, n) = static_cast<double>(
              sample_counts(ideal.tables[idx](m, n) / peak, det).net());
        }
      }
    }
    auto est = cglmp_from_counts(counts, 400, 99);
    CHECK(est.two_sigma > 0.0);
    CHECK(std::abs(est.value - kQutritMax) <= 2.0 * est.two_sigma);
  }
  SUBCASE("zero-total table throws") {
    BellTables counts;
    counts.dim = 2;
    for (auto& t : counts.tables) t = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(cglmp_from_counts(counts, 0, 1), std::runtime_error);
  }
}

TEST_CASE("local realistic bound") {
  CHECK(local_deterministic_bound(2) == 2.0);
  CHECK(local_deterministic_bound(3) == 2.0);
  CHECK(local_deterministic_bound(4) == 2.0);

  // Sampled product states never violate it.
  auto rng = make_engine(23);
  for (int trial = 0; trial < 40; ++trial) {
    int d = 2 + trial % 3;
    CHECK(cglmp_parameter(random_product_state(rng, d)) <= 2.0 + 1e-9);
  }
}

TEST_CASE("horodecki chsh") {
  SUBCASE("reference values") {
    auto me = DensityMatrix::from_pure(maximally_entangled(2));
    CHECK(horodecki_chsh(me) == doctest::Approx(kTwoSqrtTwo).epsilon(1e-12));

    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 2);
    c(0, 0) = 1.0;
    auto product = DensityMatrix::from_pure(BipartiteStateVector(c));
    CHECK(horodecki_chsh(product) == doctest::Approx(2.0).epsilon(1e-12));

    double g = 0.5;
    auto gs = DensityMatrix::from_pure(gamma_state(2, g));
    CHECK(horodecki_chsh(gs) == doctest::Approx(2.0 * std::sqrt(1.64)).epsilon(1e-12));
  }
  SUBCASE("closed form across the gamma range, monotone, dominates paper settings") {
    double prev = -1.0;
    for (int i = 0; i <= 50; ++i) {
      double g = i / 50.0;
      auto state = gamma_state(2, g);
      double h = horodecki_chsh(DensityMatrix::from_pure(state));
      double s = 1.0 + g * g;
      CHECK(h == doctest::Approx(2.0 * std::sqrt(1.0 + 4.0 * g * g / (s * s))).epsilon(1e-9));
      CHECK(h >= prev - 1e-12);  // increasing in gamma = decreasing away from 1
      CHECK(h + 1e-9 >= cglmp_parameter(state));
      prev = h;
    }
  }
  SUBCASE("optimal settings dominate the fixed settings on random states") {
    auto rng = make_engine(31);
    for (int trial = 0; trial < 25; ++trial) {
      auto rho = testing::random_density(rng, 2);
      CHECK(cglmp_parameter(rho) <= horodecki_chsh(rho) + 1e-9);
    }
  }
  SUBCASE("pauli ordering does not matter") {
    // Independent evaluation with a permuted operator ordering.
    auto rng = make_engine(41);
    auto rho = testing::random_density(rng, 2);
    Eigen::Matrix2cd sx, sy, sz;
    sx << 0, 1, 1, 0;
    sy << 0, Complex(0, -1), Complex(0, 1), 0;
    sz << 1, 0, 0, -1;
    const Eigen::Matrix2cd pauli[3] = {sz, sx, sy};  // permuted order
    Eigen::Matrix3d corr;
    for (int u = 0; u < 3; ++u) {
      for (int v = 0; v < 3; ++v) {
        Eigen::Matrix4cd op;
        for (int r = 0; r < 2; ++r)
          for (int c2 = 0; c2 < 2; ++c2)
            op.block<2, 2>(2 * r, 2 * c2) = pauli[u](r, c2) * pauli[v];
        corr(u, v) = (rho.matrix() * op).trace().real();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(corr.transpose() * corr,
                                                      Eigen::EigenvaluesOnly);
    double expected = 2.0 * std::sqrt(es.eigenvalues()(1) + es.eigenvalues()(2));
    CHECK(horodecki_chsh(rho) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("wrong dimension throws") {
    CHECK_THROWS_AS(horodecki_chsh(DensityMatrix::from_pure(maximally_entangled(3))),
                    std::invalid_argument);
  }
}

TEST_CASE("gamma scans") {
  SUBCASE("lambda zero flattens the curve") {
    std::vector<double> gammas{0.0, 0.3, 0.6, 1.0};
    for (auto& pt : gamma_scan(2, gammas, 0.0)) CHECK(std::abs(pt.bell) < 1e-12);
  }
  SUBCASE("scaled endpoint at gamma = 1") {
    auto curve = gamma_scan(2, {1.0}, 0.920);
    CHECK(curve[0].bell == doctest::Approx(0.920 * kTwoSqrtTwo).epsilon(1e-12));
  }
  SUBCASE("argmax under noise stays at gamma_max for qutrits") {
    auto opt = bell_scan_argmax(3, 0.807);
    CHECK(opt.gamma == doctest::Approx(kGammaMax).epsilon(2e-3));
    CHECK(opt.bell == doctest::Approx(0.807 * kQutritAtGammaMax).epsilon(1e-6));
  }
}
