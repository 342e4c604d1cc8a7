#include "holab/diffusion.hpp"
#include "holab/estimator.hpp"
#include "holab/ho_operators.hpp"
#include "holab/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace holab;

namespace {

Model make(Family f, int rank, double k = 1.0) {
  auto sys = RootSystem::build(f, rank);
  auto m = MultiplicityFunction::uniform(sys, k);
  return Model(std::move(sys), std::move(m));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST(Stepper, ZeroNoiseIsDriftMove) {
  const Model m = make(Family::B, 2);
  const Vec x = make_vec({8.0, 3.0});
  const Vec g = Vec::Zero(2);
  EXPECT_LT((euler_step(m, x, 1e-3, g) - (x + 1e-3 * drift(m, x))).norm(), 1e-15);
}

TEST(Stepper, Rank1DriftNearRho) {
  const Model m = make(Family::Rank1, 1);
  EXPECT_NEAR(drift(m, make_vec({5.0}))(0), 1.0001, 1e-4);
}

TEST(Stepper, EffectiveDt) {
  const Model m = make(Family::Rank1, 1);
  StepperConfig cfg;
  EXPECT_DOUBLE_EQ(effective_dt(m, make_vec({5.0}), cfg, 1.0), cfg.dt_max);
  // Wall distance <alpha,x>/|alpha| = 0.1.
  EXPECT_DOUBLE_EQ(effective_dt(m, make_vec({0.1}), cfg, 1.0), cfg.wall_safety * 0.01);
  EXPECT_DOUBLE_EQ(effective_dt(m, make_vec({5.0}), cfg, 1e-4), 1e-4);
  EXPECT_DOUBLE_EQ(effective_dt(m, make_vec({5.0}), cfg, 1.0, 100.0), cfg.intensity_cap / 100.0);
}

TEST(Stepper, ConfigValidation) {
  StepperConfig cfg;
  cfg.dt_max = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.t_horizon = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SimulateRadial, StaysInChamberAndDeterministic) {
  const Model m = make(Family::B, 2);
  StepperConfig cfg;
  cfg.t_horizon = 5.0;
  cfg.store_path = true;
  const Vec x0 = make_vec({0.3, 0.1});
  const auto a = simulate_radial(m, x0, cfg, 7);
  const auto b = simulate_radial(m, x0, cfg, 7);
  ASSERT_EQ(a.positions.size(), b.positions.size());
  for (std::size_t i = 0; i < a.positions.size(); ++i) {
    EXPECT_EQ(a.positions[i], b.positions[i]);
    EXPECT_TRUE(m.system().in_open_chamber(a.positions[i]));
  }
  EXPECT_EQ(a.times.front(), 0.0);
  EXPECT_EQ(a.times.back(), cfg.t_horizon);
  EXPECT_TRUE(std::is_sorted(a.times.begin(), a.times.end()));
  EXPECT_GT(a.wall_min, 0.0);
  const auto c = simulate_radial(m, x0, cfg, 8);
  EXPECT_NE(a.terminal, c.terminal);
  EXPECT_THROW(simulate_radial(m, make_vec({-1.0, 0.5}), cfg), std::invalid_argument);
}

TEST(SimulateRadial, NoWallContactAtHalfMultiplicity) {
  for (auto [f, r] : {std::pair{Family::Rank1, 1}, {Family::B, 2}}) {
    const Model m = make(f, r, 0.5);
    StepperConfig cfg;
    cfg.t_horizon = 1.0;
    Vec x0 = f == Family::Rank1 ? make_vec({0.01}) : make_vec({0.02, 0.01});
    for (std::uint64_t i = 0; i < 200; ++i) {
      const auto rec = simulate_radial(m, x0, cfg, i);
      EXPECT_GT(rec.wall_min, 0.0);
    }
  }
}

TEST(SimulateRadial, StartsCloseToWall) {
  // Far below the time resolution of the step rule.
  const Model m = make(Family::B, 2, 0.5);
  StepperConfig cfg;
  cfg.t_horizon = 0.5;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto rec = simulate_radial(m, make_vec({0.7, 1e-30}), cfg, i);
    EXPECT_GT(rec.wall_min, 0.0);
    EXPECT_EQ(rec.terminal_time, cfg.t_horizon);
  }
}

TEST(SimulateRadial, StartsCloseToDiagonalWall) {
  // <e1 - e2, x> is a difference of O(1) coordinates, so it carries rounding
  // error far above 1e-12 of its value.
  const Model m = make(Family::B, 2, 0.5);
  StepperConfig cfg;
  cfg.t_horizon = 0.5;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto rec = simulate_radial(m, make_vec({0.7 + 1e-10, 0.7}), cfg, i);
    EXPECT_GT(rec.wall_min, 0.0);
    EXPECT_EQ(rec.terminal_time, cfg.t_horizon);
  }
}

TEST(SimulateRadial, WEquivariantInLaw) {
  // The process started at w x0 in the w-chamber, folded back by w^-1, has the
  // law of the radial process from x0.
  const Model m = make(Family::B, 2);
  StepperConfig cfg;
  cfg.t_horizon = 2.0;
  const Vec x0 = make_vec({1.0, 0.4});
  const auto& g = m.group();
  const std::size_t n = 400;
  int w = 5;
  const Mat& mw = g[static_cast<std::size_t>(w)].matrix;
  std::vector<std::vector<double>> a(2), b(2);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec xa = simulate_radial(m, x0, cfg, i).terminal;
    const Vec xb = mw.transpose() * simulate_in_chamber(m, mw * x0, 0.0, cfg, n + i, 0).terminal;
    for (int c = 0; c < 2; ++c) {
      a[c].push_back(xa(c));
      b[c].push_back(xb(c));
    }
  }
  for (int c = 0; c < 2; ++c) EXPECT_GT(ks_two_sample("x", a[c], b[c], 0.0).p_value, 0.01 / 2);
}

TEST(SimulateRadial, WeakSelfConvergence) {
  const Model m = make(Family::B, 2);
  StepperConfig coarse;
  coarse.t_horizon = 2.0;
  StepperConfig fine = coarse;
  fine.dt_max = coarse.dt_max / 2;
  const Vec x0 = make_vec({0.8, 0.3});
  const Vec theta = make_vec({0.6, 0.8});
  std::vector<double> a, b;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    a.push_back(theta.dot(simulate_radial(m, x0, coarse, i).terminal));
    b.push_back(theta.dot(simulate_radial(m, x0, fine, 5000 + i).terminal));
  }
  const auto ma = moments(a), mb = moments(b);
  EXPECT_LT(std::abs(ma.mean - mb.mean), 3 * std::hypot(ma.stderr_mean, mb.stderr_mean));
}

TEST(Lln, SmallEnsembleWithinStderr) {
  // Few paths: the O(1/T) offset of X_T / T stays below the stderr.
  const Model m = make(Family::B, 2);
  StepperConfig cfg;
  cfg.t_horizon = 200.0;
  const LlnReport r = lln_check(m, make_vec({0.1, 0.05}), cfg, 40);
  EXPECT_TRUE(r.pass()) << r.z.transpose();
  EXPECT_DOUBLE_EQ(r.rho(0), 1.5);
  EXPECT_DOUBLE_EQ(r.rho(1), 0.5);
}

TEST(Lln, OffsetIsConstantInT) {
  // X_T - rho T converges in mean: the same offset at T = 25 and T = 100.
  const Model m = make(Family::B, 2);
  StepperConfig cfg;
  const Vec x0 = make_vec({0.1, 0.05});
  std::vector<Vec> offsets;
  std::vector<Vec> errors;
  for (double t : {25.0, 100.0}) {
    cfg.t_horizon = t;
    const LlnReport r = lln_check(m, x0, cfg, 400);
    offsets.push_back((r.mean - r.rho) * t);
    errors.push_back(r.std_error * t);
  }
  for (int c = 0; c < 2; ++c) {
    EXPECT_GT(offsets[1](c), 0.0);
    EXPECT_LT(std::abs(offsets[0](c) - offsets[1](c)), 3 * std::hypot(errors[0](c), errors[1](c)));
  }
}

TEST(Lln, VarianceScalesLikeInverseT) {
  const Model m = make(Family::B, 2);
  StepperConfig cfg;
  const Vec x0 = make_vec({0.5, 0.2});
  cfg.t_horizon = 10.0;
  const LlnReport a = lln_check(m, x0, cfg, 500);
  cfg.t_horizon = 40.0;
  const LlnReport b = lln_check(m, x0, cfg, 500);
  for (int c = 0; c < 2; ++c) {
    const double ratio = a.variance(c) / (4.0 * b.variance(c));
    EXPECT_GE(ratio, 0.5);
    EXPECT_LE(ratio, 2.0);
  }
}

TEST(DriftFlow, ConvergesToRhoRay) {
  const Model m = make(Family::B, 2);
  const Vec x = drift_flow(m, make_vec({0.3, 0.1}), 100.0, 1e-2);
  EXPECT_LT((x / 100.0 - m.rho()).norm(), 0.03);
  const Vec y = drift_flow(m, make_vec({0.3, 0.1}), 400.0, 1e-2);
  // Offset from the ray converges: x(t) - rho t is eventually constant.
  EXPECT_LT(((y - 400.0 * m.rho()) - (x - 100.0 * m.rho())).norm(), 1e-6);
}

TEST(MirrorCouple, TinyGapCouplesImmediately) {
  const Model m = make(Family::Rank1, 1);
  StepperConfig cfg;
  cfg.t_horizon = 1.0;
  const auto r = mirror_couple(m, make_vec({1.0}), make_vec({1.0 + 1e-8}), cfg, 0);
  ASSERT_TRUE(r.coupling_time.has_value());
  EXPECT_EQ(*r.coupling_time, 0.0);
  EXPECT_EQ(r.x_path.terminal, r.y_path.terminal);
}

TEST(MirrorCouple, PathsIdenticalAfterCoupling) {
  const Model m = make(Family::B, 2);
  StepperConfig cfg;
  cfg.t_horizon = 30.0;
  cfg.store_path = true;
  int coupled = 0;
  for (std::uint64_t p = 0; p < 20; ++p) {
    const auto r = mirror_couple(m, make_vec({1.0, 0.5}), make_vec({1.4, 0.2}), cfg, p);
    ASSERT_EQ(r.x_path.times.size(), r.z.size());
    for (double z : r.z) EXPECT_GE(z, 0.0);
    if (!r.coupling_time) continue;
    ++coupled;
    for (std::size_t i = 0; i < r.z.size(); ++i) {
      if (r.x_path.times[i] < *r.coupling_time) continue;
      EXPECT_EQ(r.z[i], 0.0);
      EXPECT_EQ(r.x_path.positions[i], r.y_path.positions[i]);
    }
  }
  EXPECT_GT(coupled, 10);
}

TEST(MirrorCouple, DistanceQuadraticVariationRateIsFour) {
  // z = |Y - X| has d<z> = 4 dt under the mirror coupling with generator 1/2 L.
  const Model m = make(Family::Rank1, 1);
  StepperConfig cfg;
  cfg.t_horizon = 100.0;
  cfg.stop_at_coupling = true;
  std::vector<double> rates;
  for (std::uint64_t p = 0; p < 300; ++p) {
    const auto r = mirror_couple(m, make_vec({1.0}), make_vec({3.0}), cfg, p);
    if (r.qv_time > 0.5) rates.push_back(r.qv / r.qv_time);
  }
  const double med = median(rates);
  EXPECT_GT(med, 3.6);
  EXPECT_LT(med, 4.4);
}

TEST(MirrorCouple, DriftGapBoundedAcrossHorizons) {
  const Model m = make(Family::Rank1, 1);
  StepperConfig cfg;
  cfg.stop_at_coupling = true;
  std::vector<double> medians;
  for (double h : {100.0, 200.0, 400.0}) {
    cfg.t_horizon = h;
    std::vector<double> gaps;
    for (std::uint64_t p = 0; p < 200; ++p)
      gaps.push_back(mirror_couple(m, make_vec({1.0}), make_vec({3.0}), cfg, p).drift_gap_sup);
    medians.push_back(median(gaps));
  }
  const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
  EXPECT_LE(*hi, 2.0 * *lo);
}

TEST(MirrorCouple, FractionMonotoneInHorizon) {
  const Model m = make(Family::Rank1, 1);
  StepperConfig cfg;
  cfg.stop_at_coupling = true;
  std::vector<std::optional<double>> short_run, long_run;
  for (std::uint64_t p = 0; p < 200; ++p) {
    cfg.t_horizon = 10.0;
    short_run.push_back(mirror_couple(m, make_vec({1.0}), make_vec({3.0}), cfg, p).coupling_time);
    cfg.t_horizon = 20.0;
    long_run.push_back(mirror_couple(m, make_vec({1.0}), make_vec({3.0}), cfg, p).coupling_time);
  }
  for (std::size_t i = 0; i < short_run.size(); ++i) {
    if (short_run[i]) {
      ASSERT_TRUE(long_run[i].has_value());
      EXPECT_EQ(*short_run[i], *long_run[i]);
    }
  }
  const auto s = coupling_statistics(short_run, 10.0);
  const auto l = coupling_statistics(long_run, 20.0);
  EXPECT_LE(s.fraction_coupled(), l.fraction_coupled());
  EXPECT_GT(s.n_coupled, 0u);
}

TEST(MirrorCouple, RejectsOutOfChamber) {
  const Model m = make(Family::Rank1, 1);
  EXPECT_THROW(mirror_couple(m, make_vec({-1.0}), make_vec({1.0}), {}, 0), std::invalid_argument);
}

TEST(CouplingStatistics, StepAtCommonTime) {
  std::vector<std::optional<double>> t(5, 2.5);
  const auto s = coupling_statistics(t, 10.0);
  EXPECT_EQ(s.ecdf(2.4), 0.0);
  EXPECT_EQ(s.ecdf(2.5), 1.0);
  ASSERT_EQ(s.survival.size(), 1u);
  EXPECT_EQ(s.survival[0].second, 0.0);
}

TEST(CouplingStatistics, CensoringAndErrors) {
  std::vector<std::optional<double>> t = {1.0, std::nullopt, 3.0, std::nullopt};
  const auto s = coupling_statistics(t, 5.0);
  EXPECT_DOUBLE_EQ(s.fraction_coupled(), 0.5);
  ASSERT_EQ(s.survival.size(), 2u);
  EXPECT_DOUBLE_EQ(s.survival[0].second, 0.75);
  EXPECT_DOUBLE_EQ(s.survival[1].second, 0.75 * (2.0 / 3.0));
  std::vector<std::optional<double>> one = {1.0};
  EXPECT_THROW(coupling_statistics(one, 5.0), std::invalid_argument);
}
