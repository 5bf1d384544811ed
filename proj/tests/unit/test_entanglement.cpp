#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "crossdamp/entanglement.hpp"
#include "gaussian_fock.hpp"
#include "random_states.hpp"

using namespace crossdamp;

namespace {

CovarianceReal conjugate(const CovarianceReal& s, const Eigen::Matrix4d& sym) {
  CovarianceReal out;
  out.matrix = sym * s.matrix * sym.transpose();
  return out;
}

}  // namespace

TEST(Covariance, VacuumAndThermal) {
  EXPECT_EQ(to_real_covariance(MomentState{}).matrix, Eigen::Matrix4d::Identity() / 2.0);
  const CovarianceReal t = to_real_covariance(MomentState::thermal(0.7, 2.0));
  EXPECT_EQ(t.local1(), Eigen::Matrix2d::Identity() * 1.2);
  EXPECT_EQ(t.local2(), Eigen::Matrix2d::Identity() * 2.5);
  EXPECT_EQ(t.cross(), Eigen::Matrix2d::Zero());
}

TEST(Covariance, SqueezedThermalLocalBlock) {
  const SqueezedThermalSpec spec{0.4, 0.8};
  const CovarianceReal s = to_real_covariance(thermal_squeezed_product(0.0, spec));
  EXPECT_NEAR(s.matrix(2, 2), 0.9 * std::exp(-1.6), 1e-14);
  EXPECT_NEAR(s.matrix(3, 3), 0.9 * std::exp(1.6), 1e-14);
  EXPECT_EQ(s.matrix(2, 3), 0.0);
}

TEST(Covariance, SqueezedThermalMatchesFockQuadratures) {
  const int dim = 200;
  for (auto [nbar, r, phi] : {std::tuple{0.4, 0.8, 0.0}, {0.0, 0.5, 0.0}, {1.0, 0.3, 0.9}}) {
    const Eigen::MatrixXcd rho = oracle::squeezed_thermal(nbar, r, dim, phi);
    const Eigen::MatrixXd a = oracle::annihilation(dim);
    const Eigen::MatrixXcd x = (a + a.transpose()).cast<cplx>() / std::sqrt(2.0);
    const Eigen::MatrixXcd p = cplx(0, 1) * (a.transpose() - a).cast<cplx>() / std::sqrt(2.0);
    const double vxx = (rho * x * x).trace().real(), vpp = (rho * p * p).trace().real();
    const double vxp = 0.5 * (rho * (x * p + p * x)).trace().real();
    MomentState m;
    m.n1 = (rho * (a.transpose() * a).cast<cplx>()).trace().real();
    m.m1 = -(rho * (a * a).cast<cplx>()).trace();
    const CovarianceReal s = to_real_covariance(m);
    EXPECT_NEAR(s.matrix(0, 0), vxx, 1e-10);
    EXPECT_NEAR(s.matrix(1, 1), vpp, 1e-10);
    EXPECT_NEAR(s.matrix(0, 1), vxp, 1e-10);
    if (phi == 0.0) {
      EXPECT_NEAR(vxx, (nbar + 0.5) * std::exp(-2 * r), 1e-10);
      EXPECT_NEAR(m.n1, (SqueezedThermalSpec{nbar, r}.n()), 1e-10);
      EXPECT_NEAR(m.m1.real(), (SqueezedThermalSpec{nbar, r}.m()), 1e-10);
    }
  }
}

TEST(Covariance, CrossBlockMatchesFock) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 3; ++trial) {
    const auto t = oracle::build_mixed_state(oracle::random_mixed_spec(rng), 20);
    const MomentState m = oracle::moment_state(t);
    const CovarianceReal s = detail::covariance_from_moments(m);
    // Direct quadrature expectation <x1 x2>, <x1 p2>, <p1 x2>, <p1 p2>.
    const int d = t.dim;
    const Eigen::MatrixXd a = oracle::annihilation(d);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXcd x = (a + a.transpose()).cast<cplx>() / std::sqrt(2.0);
    const Eigen::MatrixXcd p = cplx(0, 1) * (a.transpose() - a).cast<cplx>() / std::sqrt(2.0);
    auto kron = [&](const Eigen::MatrixXcd& l, const Eigen::MatrixXcd& r) {
      Eigen::MatrixXcd k(d * d, d * d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) k.block(i * d, j * d, d, d) = l(i, j) * r;
      return k;
    };
    const Eigen::MatrixXcd one = id.cast<cplx>();
    const Eigen::MatrixXcd q1[2] = {kron(x, one), kron(p, one)};
    const Eigen::MatrixXcd q2[2] = {kron(one, x), kron(one, p)};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        EXPECT_NEAR(s.matrix(i, 2 + j), (t.rho * q1[i] * q2[j]).trace().real(), 1e-8) << i << j;
  }
}

TEST(Covariance, RoundTripAndRejection) {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 20; ++i) {
    const CovarianceReal c = testing_states::random_covariance(rng);
    EXPECT_LT((to_real_covariance(from_real_covariance(c)).matrix - c.matrix).norm(), 1e-12 * c.matrix.norm());
  }
  MomentState bad = MomentState::thermal(0.1, 0.1);
  bad.m1 = 2.0;
  EXPECT_THROW(to_real_covariance(bad), std::invalid_argument);
}

TEST(YInvariant, ProductStatesFactorize) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    CovarianceReal c;
    // Equal Williamson values per mode keep the state physical.
    c.matrix = testing_states::local_symplectic(u(rng), 6 * u(rng), u(rng), 6 * u(rng));
    const double n1 = 0.5 + u(rng), n2 = 0.5 + u(rng);
    c.matrix = c.matrix * Eigen::Vector4d(n1, n1, n2, n2).asDiagonal() * c.matrix.transpose();
    const YInvariant y = y_invariant(c);
    EXPECT_EQ(y.i3, 0.0);
    EXPECT_EQ(y.i4, 0.0);
    EXPECT_NEAR(y.y, (y.i1 - 0.25) * (y.i2 - 0.25), 1e-12 * std::max(1.0, y.i1 * y.i2));
    EXPECT_GE(y.y, -1e-12);
  }
}

TEST(YInvariant, TwoModeSqueezedVacuum) {
  for (double r : {0.25, 0.5, 1.0}) {
    const auto t = oracle::two_mode_squeezed_vacuum(r, 60);
    const YInvariant y = y_invariant(to_real_covariance(oracle::moment_state(t)));
    EXPECT_TRUE(y.entangled()) << r;
    EXPECT_TRUE(oracle::ppt_entangled(t)) << r;
    EXPECT_LT(pt_symplectic_min(to_real_covariance(oracle::moment_state(t))), 0.5);
  }
  const auto vac = oracle::two_mode_squeezed_vacuum(0.0, 60);
  EXPECT_NEAR(y_invariant(to_real_covariance(oracle::moment_state(vac))).y, 0.0, 1e-12);
}

TEST(YInvariant, LocalSymplecticInvariance) {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const CovarianceReal c = testing_states::random_covariance(rng);
    const double y0 = y_invariant(c).y;
    const CovarianceReal c2 = conjugate(c, testing_states::local_symplectic(u(rng), 6 * u(rng), u(rng), 6 * u(rng)));
    EXPECT_NEAR(y_invariant(c2).y, y0, 1e-10 * std::max(1.0, std::abs(y0)));
  }
}

TEST(YInvariant, SignMatchesPptOracle) {
  std::mt19937_64 rng(55);
  int checked = 0;
  for (int i = 0; i < 12; ++i) {
    const auto t = oracle::build_mixed_state(oracle::random_mixed_spec(rng));
    const YInvariant y = y_invariant(to_real_covariance(oracle::moment_state(t)));
    if (std::abs(y.y) <= 1e-6) continue;
    ++checked;
    EXPECT_EQ(y.entangled(), oracle::ppt_entangled(t)) << i << " Y=" << y.y;
  }
  EXPECT_GE(checked, 10);
}

TEST(YInvariant, SymplecticEigenvalueModeAgrees) {
  std::mt19937_64 rng(56);
  for (int i = 0; i < 200; ++i) {
    const CovarianceReal c = testing_states::random_covariance(rng);
    const YInvariant y = y_invariant(c);
    if (std::abs(y.y) < 1e-9) continue;
    EXPECT_EQ(y.entangled(), pt_symplectic_min(c) < 0.5) << i;
  }
}

TEST(EvolveY, ClassicalStartNeverEntangles) {
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(i * 0.1);
  for (double g12 : {0.0, 0.5, 1.0}) {
    for (double w : {0.0, 1.0}) {
      const auto ys = evolve_y(0.35, {0.35, 0.0}, ModelParams(0.0, w, 1.0, g12, 0.3), grid);
      for (const auto& y : ys) EXPECT_GE(y.y, -1e-12);
    }
  }
}

TEST(EvolveY, ContinuityAlongSeries) {
  std::vector<double> grid;
  for (int i = 0; i <= 2000; ++i) grid.push_back(i * 0.005);
  const auto ys = evolve_y(0.35, {0.35, 2.0}, ModelParams(0.0, 1.0, 0.05, 0.05, bose_occupation(3.0)), grid);
  // Second differences bound the jump a smooth series can make.
  for (std::size_t i = 2; i + 2 < ys.size(); ++i) {
    const double local = std::abs(ys[i - 1].y - ys[i - 2].y) + std::abs(ys[i + 2].y - ys[i + 1].y);
    EXPECT_LE(std::abs(ys[i].y - ys[i - 1].y), 2.0 * local + 1e-9) << i;
  }
}

TEST(EvolveY, RejectsBadGrid) {
  const ModelParams p(0, 1, 1, 0, 0);
  EXPECT_THROW(evolve_y(0.1, {0.1, 1.0}, p, {1.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(evolve_y(0.1, {0.1, 1.0}, p, {-1.0}), std::invalid_argument);
  EXPECT_THROW(evolve_y(-0.1, {0.1, 1.0}, p, {1.0}), std::invalid_argument);
}

TEST(Scan, SinglePointReproducesEvolve) {
  ScanFixed f;
  f.coupling = 1.0;
  f.gamma = 0.05;
  f.gamma12_ratio = 0.7;
  f.temperature_ratio = 2.0;
  f.r = 1.5;
  f.nbar1 = 0.35;
  f.nbar2 = 0.35;
  const auto rows = scan({{ScanAxis::time, {12.5}}}, f);
  ASSERT_EQ(rows.size(), 1u);
  const auto ys = evolve_y(0.35, {0.35, 1.5}, ModelParams(0, 1.0, 0.05, 0.7 * 0.05, bose_occupation(2.0)), {12.5});
  EXPECT_EQ(rows[0].y.y, ys[0].y);
}

TEST(Scan, GridOrderAndParallelDeterminism) {
  ScanFixed f;
  f.nbar1 = f.nbar2 = 0.35;
  f.coupling = 0.0;
  const std::vector<ScanAxisGrid> axes = {{ScanAxis::temperature_ratio, {0.5, 1.0, 3.0}},
                                          {ScanAxis::gamma12_ratio, {0.0, 0.5, 1.0}},
                                          {ScanAxis::time, {0.5, 1.0, 2.0, 4.0}}};
  std::vector<ScanRow> serial, streamed;
  serial = scan(axes, f, 1);
  scan(axes, f, [&](const ScanRow& r) { streamed.push_back(r); }, 4, 5);
  ASSERT_EQ(serial.size(), 36u);
  ASSERT_EQ(streamed.size(), 36u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].index, i);
    EXPECT_EQ(streamed[i].index, i);
    EXPECT_EQ(serial[i].y.y, streamed[i].y.y);
    EXPECT_EQ(serial[i].coords, streamed[i].coords);
  }
  EXPECT_EQ(serial[1].coords[2], 1.0);
  EXPECT_EQ(serial[4].coords[1], 0.5);
  EXPECT_EQ(serial[12].coords[0], 1.0);
}

TEST(Scan, NoEntanglementWithoutCouplingOrCorrelatedBath) {
  ScanFixed f;
  f.coupling = 0.0;
  f.gamma12_ratio = 0.0;
  f.nbar1 = f.nbar2 = 0.35;
  std::vector<double> times, temps, rs;
  for (int i = 0; i < 40; ++i) times.push_back(i * 0.25);
  for (double x = 0.2; x < 6.0; x += 0.4) temps.push_back(x);
  for (double r = 0.0; r <= 3.0; r += 0.5) rs.push_back(r);
  for (const auto& row : scan({{ScanAxis::temperature_ratio, temps}, {ScanAxis::time, times},
                               {ScanAxis::squeeze_r, rs}}, f))
    EXPECT_FALSE(row.y.entangled());
}

TEST(Scan, EntangledRegionGrowsAtLowerTemperature) {
  ScanFixed f;
  f.coupling = 0.0;
  f.r = 2.0;
  f.nbar1 = f.nbar2 = 0.35;
  std::vector<double> times, ratios, temps = {0.5, 1.0, 2.0, 3.0, 5.0};
  for (int i = 1; i <= 80; ++i) times.push_back(i * 0.1);
  for (double x = 0.1; x <= 1.0001; x += 0.1) ratios.push_back(x);
  std::vector<int> measure(temps.size(), 0);
  scan({{ScanAxis::temperature_ratio, temps}, {ScanAxis::gamma12_ratio, ratios}, {ScanAxis::time, times}}, f,
       [&](const ScanRow& r) {
         if (r.y.entangled()) ++measure[r.index / (ratios.size() * times.size())];
       });
  for (std::size_t i = 1; i < measure.size(); ++i) EXPECT_GE(measure[i], measure[i - 1]);
  EXPECT_GT(measure.back(), measure.front());
}

TEST(Scan, Validation) {
  ScanFixed f;
  EXPECT_THROW(scan({}, f), std::invalid_argument);
  EXPECT_THROW(scan({{ScanAxis::time, {}}}, f), std::invalid_argument);
  EXPECT_THROW(scan({{ScanAxis::time, {2.0, 1.0}}}, f), std::invalid_argument);
  EXPECT_THROW(scan({{ScanAxis::time, {1.0}}, {ScanAxis::time, {2.0}}}, f), std::invalid_argument);
  EXPECT_THROW(scan({{ScanAxis::gamma12_ratio, {0.5, 1.5}}}, f), std::invalid_argument);
}
