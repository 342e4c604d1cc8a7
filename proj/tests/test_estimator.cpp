#include "holab/estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace holab;

namespace {

Model make(Family f, int rank, double k = 1.0) {
  auto sys = RootSystem::build(f, rank);
  auto m = MultiplicityFunction::uniform(sys, k);
  return Model(std::move(sys), std::move(m));
}

JumpConfig config(double horizon) {
  JumpConfig cfg;
  cfg.stepper.t_horizon = horizon;
  return cfg;
}

}  // namespace

TEST(Method, Names) {
  EXPECT_EQ(method_from_string("thinning"), Method::kThinning);
  EXPECT_EQ(method_from_string("skew"), Method::kSkewProduct);
  EXPECT_EQ(method_from_string(to_string(Method::kSkewProduct)), Method::kSkewProduct);
  EXPECT_THROW(method_from_string("euler"), std::invalid_argument);
}

TEST(Hw, RowSumsToOneAndDeepStartStays) {
  const Model m = make(Family::Rank1, 1);
  const HwTable t = estimate_hw(m, make_vec({5.0}), config(20.0), 400);
  EXPECT_NEAR(t.sum(), 1.0, 1e-12);
  EXPECT_EQ(t.per_w.size(), m.group().size());
  EXPECT_GE(t.per_w.at(WeylGroup::identity()).value, 0.99);
  for (const auto& [w, e] : t.per_w) {
    EXPECT_GE(e.value, 0.0);
    EXPECT_LE(e.value, 1.0);
    EXPECT_EQ(e.n, t.determined);
  }
}

TEST(Hw, B2RowSumsToOne) {
  const Model m = make(Family::B, 2);
  const HwTable t = estimate_hw(m, make_vec({0.6, 0.2}), config(40.0), 300);
  EXPECT_NEAR(t.sum(), 1.0, 1e-12);
  EXPECT_EQ(t.per_w.size(), 8u);
  EXPECT_LT(t.excluded_fraction(), 0.2);
}

TEST(Hw, Equivariance) {
  const Model m = make(Family::Rank1, 1);
  const int s = m.group().reflection(0);
  EstimatorOptions a, b;
  b.trajectory_offset = 1000;
  const HwTable at_x = estimate_hw(m, make_vec({0.5}), config(20.0), 1000, a);
  const HwTable at_sx = estimate_hw(m, make_vec({-0.5}), config(20.0), 1000, b);
  EXPECT_LT(equivariance_z(m, s, at_sx, at_x), 3.0);
  // Mismatched pairing is detected.
  EXPECT_GT(equivariance_z(m, WeylGroup::identity(), at_sx, at_x), 3.0);
}

TEST(Hw, RejectsUnsettledEnsembles) {
  const Model m = make(Family::Rank1, 1);
  EXPECT_THROW(estimate_hw(m, make_vec({0.05}), config(0.2), 200), std::runtime_error);
  EXPECT_THROW(estimate_hw(m, make_vec({5.0}), config(20.0), 99), std::invalid_argument);
  EXPECT_THROW(estimate_hw(m, make_vec({0.0}), config(20.0), 200), std::invalid_argument);
}

TEST(Hw, MethodsAgree) {
  const Model m = make(Family::Rank1, 1);
  EstimatorOptions skew;
  skew.method = Method::kSkewProduct;
  skew.trajectory_offset = 5000;
  const HwTable a = estimate_hw(m, make_vec({0.5}), config(20.0), 1000);
  const HwTable b = estimate_hw(m, make_vec({0.5}), config(20.0), 1000, skew);
  EXPECT_LT(equivariance_z(m, WeylGroup::identity(), a, b), 3.0);
}

TEST(Martingale, ConstantIsDegenerate) {
  const Model m = make(Family::Rank1, 1);
  const ScalarField one{[](const Vec&) { return 1.0; }};
  const auto r = martingale_check(one, m, make_vec({1.0}), 2.0, config(2.0), 200);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.z, 0.0);
  EXPECT_TRUE(r.pass());
}

TEST(Martingale, HarmonicFunctionPasses) {
  const Model m = make(Family::Rank1, 1);
  const Rank1Params p;
  const Rank1Table g(p, p.rho());
  const ScalarField f{[&g](const Vec& x) { return g(x(0)); }};
  const auto r = martingale_check(f, m, make_vec({0.5}), 2.0, config(2.0), 5000);
  EXPECT_NEAR(r.target, rank1_G(p, p.rho(), 0.5), 1e-9);
  EXPECT_TRUE(r.pass()) << r.z;
  EXPECT_EQ(r.estimate.n, 5000u);
}

TEST(Martingale, NonHarmonicControlFails) {
  const Model m = make(Family::Rank1, 1);
  const ScalarField id{[](const Vec& x) { return x(0); }};
  const auto r = martingale_check(id, m, make_vec({0.5}), 2.0, config(2.0), 2000);
  EXPECT_GT(std::abs(r.z), 3.0);
  EXPECT_THROW(martingale_check(id, m, make_vec({0.5}), 0.0, config(2.0), 100), std::invalid_argument);
}

TEST(Theorem1, PanelAndBound) {
  const auto panel = theorem1_panel(2);
  ASSERT_EQ(panel.size(), 6u);
  EXPECT_EQ(panel[0].first, "tanh_x1");
  EXPECT_EQ(panel.back().first, "constant");

  const Model m = make(Family::Rank1, 1);
  StepperConfig cfg;
  cfg.t_horizon = 50.0;
  const auto r = theorem1_experiment(m, make_vec({1.0}), make_vec({3.0}), cfg, 500);
  EXPECT_TRUE(r.pass());
  for (const auto& e : r.panel) {
    EXPECT_NEAR(e.bound, 2.0 * (1.0 - r.coupled_fraction), 1e-15);
    if (e.name == "constant") {
      EXPECT_EQ(e.difference, 0.0);
    }
    if (e.name == "cos_x1") {
      EXPECT_GT(e.std_error, 0.0);  // not saturated at the horizon
    }
  }
  double prev = r.bound_at(0.0);
  EXPECT_LE(prev, 2.0);
  for (double t = 1.0; t <= 50.0; t += 1.0) {
    const double b = r.bound_at(t);
    EXPECT_LE(b, prev);
    prev = b;
  }
  EXPECT_NEAR(r.bound_at(50.0), 2.0 * (1.0 - r.coupled_fraction), 1e-15);
}

TEST(BasisFit, RecoversSyntheticMatrix) {
  const Rank1Params p;
  const auto grid = default_basis_grid();
  ASSERT_EQ(grid.size(), 8u);
  std::vector<double> gp, gm, hid, hs, se;
  for (double x : grid) {
    gp.push_back(rank1_G(p, p.rho(), x));
    gm.push_back(1.0);
    hid.push_back(gp.back() / 2);
    hs.push_back(1.0 - gp.back() / 2);
    se.push_back(0.01);
  }
  const BasisFit f = fit_basis_change(grid, hid, hs, se, gp, gm);
  EXPECT_NEAR(f.matrix(0, 0), 2.0, 1e-10);
  EXPECT_NEAR(f.matrix(0, 1), 0.0, 1e-10);
  EXPECT_NEAR(f.matrix(1, 0), 1.0, 1e-10);
  EXPECT_NEAR(f.matrix(1, 1), 1.0, 1e-10);
  EXPECT_NEAR(f.det, 2.0, 1e-10);
  EXPECT_TRUE(f.pass());
  for (double v : f.origin_values) EXPECT_NEAR(v, 1.0, 1e-10);
  EXPECT_LT(f.condition, 100.0);
}

TEST(BasisFit, DetectsMisfitAndBadDesign) {
  const Rank1Params p;
  const auto grid = default_basis_grid();
  std::vector<double> gp, gm, hid, hs, se;
  for (double x : grid) {
    gp.push_back(rank1_G(p, p.rho(), x));
    gm.push_back(1.0);
    hid.push_back(gp.back() / 2 + 0.05 * x * x);  // not in the span
    hs.push_back(1.0 - gp.back() / 2);
    se.push_back(0.001);
  }
  EXPECT_FALSE(fit_basis_change(grid, hid, hs, se, gp, gm).residual_pass);

  const std::vector<double> one_sided = {0.5, 1.0, 2.0, 4.0};
  const std::vector<double> v(4, 0.5), s(4, 0.01), ones(4, 1.0);
  EXPECT_THROW(fit_basis_change(one_sided, v, v, s, ones, ones), std::invalid_argument);
}

TEST(BasisChange, Rank1MonteCarlo) {
  const Rank1Params p;
  const auto grid = default_basis_grid();
  const auto r = basis_change_rank1(p, grid, config(20.0), 1000);
  EXPECT_TRUE(r.fit.pass());
  // G_-rho = 1 = h_id + h_s.
  EXPECT_NEAR(r.fit.matrix(1, 0), 1.0, 0.1);
  EXPECT_NEAR(r.fit.matrix(1, 1), 1.0, 0.1);
  EXPECT_EQ(r.tables.size(), grid.size());
}
