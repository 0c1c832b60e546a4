#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nhqm/metric.hpp"
#include "test_util.hpp"

using namespace nhqm;
using nhqm::test::max_abs;

TEST(Metric, BrachistochroneGoldenValues) {
  const double r = 1.0, s = 2.0, theta = std::numbers::pi / 2;
  const double sin_a = r / s * std::sin(theta);
  const double cos_a = std::sqrt(1.0 - sin_a * sin_a);
  const Operator h = brachistochrone(r, s, theta);
  const MetricPair mp = normalize_unit_determinant(metric_from_spectrum(eig_general(h)));

  Operator eta(2, 2);
  eta << 1.0, Complex(0, -sin_a), Complex(0, sin_a), 1.0;
  eta /= cos_a;
  EXPECT_LT(max_abs(mp.eta - eta), 1e-12);

  const int signs[2] = {-1, 1};
  const MetricPair branch = with_root_signature(mp, signs);
  Operator rho(2, 2);
  const double half = std::asin(sin_a) / 2;
  rho << std::sin(half), Complex(0, -std::cos(half)), Complex(0, std::cos(half)), std::sin(half);
  rho /= std::sqrt(cos_a);
  EXPECT_LT(max_abs(branch.rho - rho), 1e-12);
  EXPECT_LT(max_abs(branch.rho.adjoint() * branch.rho - mp.eta), 1e-12);

  const double omega = 2.0 * std::sqrt(s * s - r * r * std::sin(theta) * std::sin(theta));
  Operator hh(2, 2);
  hh << r * std::cos(theta), -omega / 2, -omega / 2, r * std::cos(theta);
  EXPECT_LT(max_abs(hermitian_equivalent(h, branch).h - hh), 1e-12);
  EXPECT_LT(pseudo_hermiticity_residual(h, mp.eta), 1e-12);
}

TEST(Metric, PositiveRootGivesHermitianEquivalentWithSameSpectrum) {
  const Operator h = brachistochrone(1.0, 2.0, std::numbers::pi / 2);
  const MetricPair mp = metric_from_spectrum(eig_general(h));
  const HermitianEquivalent he = hermitian_equivalent(h, mp);
  EXPECT_LT(he.transform_residual, 1e-14);
  Eigen::SelfAdjointEigenSolver<Operator> es(he.h);
  EXPECT_NEAR(es.eigenvalues()[0], -std::sqrt(3.0), 1e-13);
  EXPECT_NEAR(es.eigenvalues()[1], std::sqrt(3.0), 1e-13);
  EXPECT_NEAR(normalize_unit_determinant(mp).eta.determinant().real(), 1.0, 1e-14);
}

TEST(Metric, RandomQuasiHermitianMatrices) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator h = test::random_quasi_hermitian(rng, 5);
    const MetricPair mp = metric_from_spectrum(eig_general(h));
    EXPECT_LT(max_abs(mp.eta - mp.eta.adjoint()), 1e-12 * mp.eta.norm());
    Eigen::SelfAdjointEigenSolver<Operator> es(mp.eta);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    EXPECT_LT(pseudo_hermiticity_residual(h, mp.eta), 1e-10);
    EXPECT_LT(max_abs(mp.eta * mp.eta_inv - Operator::Identity(5, 5)), 1e-9);
    EXPECT_LT(max_abs(mp.rho * mp.rho - mp.eta), 1e-10 * mp.eta.norm());
    const HermitianEquivalent he = hermitian_equivalent(h, mp);
    EXPECT_LT(he.transform_residual, 1e-10);
  }
}

TEST(Metric, PseudoInnerProductIsConservedByEvolution) {
  std::mt19937 rng(15);
  const Operator h = test::random_quasi_hermitian(rng, 4);
  const MetricPair mp = metric_from_spectrum(eig_general(h));
  const StateVector psi = test::random_state(rng, 4);
  const Complex before = pseudo_inner(psi, psi, mp.eta);
  const StateVector later = expm(h, Complex(0.0, -3.7)) * psi;
  EXPECT_LT(std::abs(pseudo_inner(later, later, mp.eta) - before), 1e-10 * std::abs(before));
}

TEST(Metric, ComplexSpectrumIsRejected) {
  try {
    metric_from_spectrum(eig_general(brachistochrone(2.0, 1.0, std::numbers::pi / 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ComplexSpectrum);
  }
}

TEST(Metric, WrongMetricIsRejected) {
  const Operator h = brachistochrone(1.0, 2.0, std::numbers::pi / 2);
  MetricPair mp = metric_from_spectrum(eig_general(h));
  mp.eta = Operator::Identity(2, 2);
  try {
    hermitian_equivalent(h, mp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MetricMismatch);
  }
}

TEST(Metric, ParityTimesChargeIsAValidMetric) {
  const ParityOperator p = ParityOperator::sigma_x();
  for (double theta : {0.2, 0.9, std::numbers::pi / 2}) {
    const Operator h = brachistochrone(1.0, 2.0, theta);
    const ChargeOperator c = build_charge_operator(eig_general(h), p);
    const Operator eta = metric_from_pc(p, c);
    EXPECT_LT(max_abs(eta - eta.adjoint()), 1e-12);
    Eigen::SelfAdjointEigenSolver<Operator> es(eta);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    EXPECT_LT(pseudo_hermiticity_residual(h, eta), 1e-12);
  }
}
