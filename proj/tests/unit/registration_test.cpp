#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cwmeas/kinetic.hpp"
#include "cwmeas/registration.hpp"
#include "support/test_oracles.hpp"

namespace cwmeas {
namespace {

ModelParams params_with(int N, double T = 0.2, double g = 0.05) {
  ModelParams p;
  p.N = N;
  p.T = T;
  p.g = g;
  return p;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

std::vector<double> reversed(std::span<const double> p) {
  return {p.rbegin(), p.rend()};
}

TEST(Distribution, Validation) {
  EXPECT_THROW(MagnetizationDistribution(2, {0.5, 0.5}), ValidationError);
  EXPECT_THROW(MagnetizationDistribution(1, {0.7, 0.7}), ValidationError);
  EXPECT_THROW(MagnetizationDistribution(1, {1.1, -0.1}), ValidationError);
  EXPECT_NO_THROW(MagnetizationDistribution(1, {1.0 + 5e-10, 0.0}));
  EXPECT_THROW(MagnetizationDistribution::point_mass(4, 5), ValidationError);
}

TEST(Distribution, Moments) {
  const MagnetizationDistribution d(2, {0.25, 0.25, 0.5});
  EXPECT_EQ(d.m_at(0), -1.0);
  EXPECT_EQ(d.m_at(1), 0.0);
  EXPECT_DOUBLE_EQ(d.mean(), 0.25);
  EXPECT_DOUBLE_EQ(d.variance(), 0.75 - 0.0625);
  EXPECT_EQ(d.mass_above(0.5), 0.5);
  EXPECT_EQ(d.mass_below(-0.5), 0.25);
  EXPECT_EQ(d.mass_within(0.5), 0.25);
  const auto m = d.mirrored();
  EXPECT_EQ(m[0], 0.5);
  EXPECT_EQ(m.mean(), -0.25);
}

TEST(InitialDistribution, TwoSpinsMatchesHandEnumeration) {
  const auto d = initial_distribution(params_with(2));
  const auto ref = testing::enumerate_equilibrium(2, 0.2, 1.0, 0.0, 1);
  ASSERT_EQ(d.p().size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(d[i], ref[i], 1e-14);
  EXPECT_NEAR(d[0], 0.46207091, 1e-8);
  EXPECT_NEAR(d[1], 0.07585818, 1e-8);
}

TEST(InitialDistribution, NarrowSymmetricPeakAtHundredSpins) {
  const auto d = initial_distribution(params_with(100));
  EXPECT_EQ(reversed(d.p()), std::vector<double>(d.p().begin(), d.p().end()));
  EXPECT_EQ(paramagnetic_basin(params_with(100)), std::make_pair(27, 73));
  EXPECT_NEAR(std::sqrt(d.variance()), 0.11303114242961794, 1e-12);
  EXPECT_NEAR(d.mass_within(0.25), 0.9677337553659703, 1e-12);
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-14);
}

TEST(InitialDistribution, BasinWeightsAreBoltzmannWeights) {
  // Inside the basin the ratios must match the full equilibrium.
  const auto params = params_with(16);
  const auto d = initial_distribution(params);
  const auto ref = testing::enumerate_equilibrium(16, 0.2, 1.0, 0.0, 1);
  const auto [lo, hi] = paramagnetic_basin(params);
  for (int i = lo; i < hi; ++i) {
    EXPECT_NEAR(d[i + 1] / d[i], ref[i + 1] / ref[i], 1e-12 * ref[i + 1] / ref[i]);
  }
  for (int i = 0; i < lo; ++i) EXPECT_EQ(d[i], 0.0);
}

TEST(Equilibrium, MatchesConfigurationEnumeration) {
  for (int N : {4, 9, 16}) {
    for (double g : {0.0, 0.05}) {
      for (Sector s : {Sector::Up, Sector::Down}) {
        const auto d = equilibrium_distribution(params_with(N), s, g);
        const auto ref = testing::enumerate_equilibrium(N, 0.2, 1.0, g, sign(s));
        EXPECT_LE(max_abs_diff(d.p(), ref), 1e-13) << N << ' ' << g;
      }
    }
  }
}

TEST(Generator, DetailedBalance) {
  const auto params = params_with(20, 0.2, 0.05);
  for (Sector s : {Sector::Up, Sector::Down}) {
    const auto rates = build_generator(params, s, params.g);
    const auto eq = testing::enumerate_equilibrium(20, 0.2, 1.0, 0.05, sign(s));
    for (int i = 0; i < 20; ++i) {
      const double forward = rates.up[i] * eq[i];
      const double backward = rates.down[i + 1] * eq[i + 1];
      EXPECT_NEAR(forward, backward, 1e-12 * std::max(forward, backward)) << i;
    }
  }
}

TEST(Generator, BoundaryRatesAndMirror) {
  const auto params = params_with(30, 0.2, 0.05);
  const auto up = build_generator(params, Sector::Up, params.g);
  const auto down = build_generator(params, Sector::Down, params.g);
  EXPECT_EQ(up.up[30], 0.0);
  EXPECT_EQ(up.down[0], 0.0);
  for (int i = 0; i <= 30; ++i) {
    EXPECT_EQ(up.up[i], down.down[30 - i]);
    EXPECT_EQ(up.down[i], down.up[30 - i]);
  }
  // heat-bath rates are bounded by gamma times the flip count
  for (int i = 0; i <= 30; ++i) {
    EXPECT_LE(up.up[i], params.gamma * (30 - i));
    EXPECT_LE(up.down[i], params.gamma * i);
  }
}

TEST(Evolve, EquilibriumIsStationary) {
  const auto params = params_with(100);
  const double t = 10.0 / params.gamma;
  for (double g : {0.0, 0.05}) {
    for (Sector s : {Sector::Up, Sector::Down}) {
      const auto eq = equilibrium_distribution(params, s, g);
      const auto rates = build_generator(params, s, g);
      const auto out = evolve(eq, rates, t, 0.05);
      EXPECT_LE(max_abs_diff(out.p(), eq.p()), 1e-9) << g;
    }
  }
}

TEST(Evolve, RandomEquilibriaAreFixedPoints) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> T(0.05, 0.7);
  std::uniform_real_distribution<double> g(0.0, 0.1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto params = params_with(60, T(rng), g(rng));
    const auto eq = equilibrium_distribution(params, Sector::Up, params.g);
    const auto rates = build_generator(params, Sector::Up, params.g);
    const double dt = 0.05 / rates.max_total_rate();
    const auto out = evolve(eq, rates, 10.0 / params.gamma, dt);
    EXPECT_LE(max_abs_diff(out.p(), eq.p()), 1e-9)
        << params.T << ' ' << params.g;
  }
}

TEST(Evolve, ConservesMassAndPositivity) {
  const auto params = params_with(100);
  const auto rates = build_generator(params, Sector::Up, params.g);
  const auto start = initial_distribution(params).with_weight(0.3);
  double worst_mass = 0.0;
  double most_negative = 0.0;
  const auto out = evolve(start, rates, 2000.0, 0.05,
                          [&](double, std::span<const double> p) {
                            double total = 0.0;
                            for (double x : p) {
                              total += x;
                              most_negative = std::min(most_negative, x);
                            }
                            worst_mass = std::max(worst_mass, std::abs(total - 1.0));
                          });
  EXPECT_LE(worst_mass, 1e-9);
  EXPECT_GE(most_negative, -1e-12);
  EXPECT_EQ(out.sector_weight(), 0.3);
}

TEST(Evolve, AgreesWithMatrixExponential) {
  const auto params = params_with(100);
  const auto rates = build_generator(params, Sector::Up, params.g);
  const auto start = initial_distribution(params);
  for (double t : {100.0, 300.0, 1000.0}) {
    const auto rk4 = evolve(start, rates, t, 0.05);
    const auto exact = testing::master_equation_exact(rates, start.p(), t);
    EXPECT_LE(max_abs_diff(rk4.p(), exact), 1e-10) << t;
  }
}

TEST(Evolve, RegistrationProgressRegression) {
  // Mean magnetization of the coupled N=100 paramagnet, frozen from an
  // independent dense matrix-exponential solution.
  const auto params = params_with(100);
  const auto rates = build_generator(params, Sector::Up, params.g);
  auto d = initial_distribution(params);
  const std::pair<double, double> expected[] = {
      {100.0, 0.17345899302926682},
      {300.0, 0.4237041909795917},
      {1000.0, 0.9577910569186738},
      {2000.0, 0.9992829882682204}};
  double t_now = 0.0;
  for (const auto& [t, mean] : expected) {
    d = evolve(d, rates, t - t_now, 0.05);
    t_now = t;
    EXPECT_NEAR(d.mean(), mean, 1e-9) << t;
  }
}

TEST(Evolve, MirrorCovarianceIsExact) {
  const auto params = params_with(100);
  const auto up = build_generator(params, Sector::Up, params.g);
  const auto down = build_generator(params, Sector::Down, params.g);
  const auto start = MagnetizationDistribution::point_mass(100, 40);
  const auto a = evolve(start, up, 500.0, 0.05);
  const auto b = evolve(start.mirrored(), down, 500.0, 0.05);
  EXPECT_EQ(reversed(a.p()), std::vector<double>(b.p().begin(), b.p().end()));
}

TEST(Evolve, StabilityGuard) {
  const auto params = params_with(100);
  const auto rates = build_generator(params, Sector::Up, params.g);
  const auto start = initial_distribution(params);
  EXPECT_THROW(evolve(start, rates, 10.0, 1.0), GuardError);
  EXPECT_THROW(evolve(start, rates, -1.0, 0.05), ValidationError);
  const auto same = evolve(start, rates, 0.0, 0.05);
  EXPECT_EQ(same.p()[50], start.p()[50]);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(MagnetizationDistribution::point_mass(100, 100), 0.5),
            (Classification{Status::Registered, Sector::Up}));
  EXPECT_EQ(classify(MagnetizationDistribution::point_mass(100, 0), 0.5),
            (Classification{Status::Registered, Sector::Down}));
  EXPECT_EQ(classify(MagnetizationDistribution::point_mass(100, 50), 0.5).status,
            Status::Relaxed);
  EXPECT_EQ(classify(MagnetizationDistribution(2, {1 / 3.0, 1 / 3.0, 1 / 3.0}),
                     0.5)
                .status,
            Status::Undecided);
  EXPECT_THROW(classify(MagnetizationDistribution::point_mass(4, 2), 1.0),
               ValidationError);
}

TEST(Classify, FiniteSizeParamagnet) {
  // At N = 100 only 0.968 of the ready-state mass sits inside |m| < 0.25,
  // short of the 0.99 needed for Relaxed; the peak narrows as 1/sqrt(N).
  const auto small = initial_distribution(params_with(100));
  EXPECT_EQ(classify(small, 0.5).status, Status::Undecided);
  const auto large = initial_distribution(params_with(400));
  EXPECT_GT(large.mass_within(0.25), 0.99999);
  EXPECT_EQ(classify(large, 0.5).status, Status::Relaxed);
}

TEST(Classify, PointAndThreshold) {
  EXPECT_EQ(classify_point(0.9, 0.5).pointer, Sector::Up);
  EXPECT_EQ(classify_point(-0.9, 0.5).pointer, Sector::Down);
  EXPECT_EQ(classify_point(0.1, 0.5).status, Status::Relaxed);
  EXPECT_EQ(classify_point(0.3, 0.5).status, Status::Undecided);
  EXPECT_NEAR(default_threshold(params_with(100)), 0.9999089559652065 / 2,
              1e-12);
  EXPECT_EQ(default_threshold(params_with(100, 0.6)), 0.5);
}

TEST(Schedule, Defaults) {
  const auto s = Schedule::defaults_for(params_with(100));
  EXPECT_DOUBLE_EQ(s.t_couple, 2000.0);
  EXPECT_DOUBLE_EQ(s.t_relax, 1000.0);
  EXPECT_DOUBLE_EQ(s.dt, 0.05);
  EXPECT_THROW((Schedule{0.0, 1.0, 0.1}.validate()), ValidationError);
}

TEST(Measurement, RegistersBothSectorsAsMirrorImages) {
  const auto params = params_with(100);
  const auto rho0 = SpinDensityMatrix::from_elements(0.3, Complex(0.2, 0.1));
  const auto out =
      run_measurement(rho0, params, Schedule::defaults_for(params));
  const double mF = ferromagnetic_magnetization({0.2, 0.0, Sector::Up});
  EXPECT_EQ(out.up.classification, (Classification{Status::Registered, Sector::Up}));
  EXPECT_EQ(out.down.classification,
            (Classification{Status::Registered, Sector::Down}));
  EXPECT_NEAR(out.up.mean_m, mF, 0.05);
  EXPECT_EQ(reversed(out.up.final_dist.p()),
            std::vector<double>(out.down.final_dist.p().begin(),
                                out.down.final_dist.p().end()));
  EXPECT_NEAR(out.up.mean_m, 0.9993745123283163, 1e-9);
  EXPECT_EQ(out.up.weight, rho0.r_uu());
  EXPECT_EQ(out.down.weight, rho0.r_dd());
  EXPECT_NEAR(out.up.final_dist.total_mass(), 1.0, 1e-9);
  EXPECT_GT(out.up.dissipated_free_energy, 0.0);
  EXPECT_EQ(out.up.dissipated_free_energy, out.down.dissipated_free_energy);
  // the off-diagonal blocks are gone by the decoupling time
  EXPECT_LT(out.off_diagonal_weight, 1e-100);
}

TEST(Measurement, DiagonalStateRegistersOnlyOneSector) {
  const auto params = params_with(100);
  const auto out = run_measurement(pure_state({0, 0, 1}), params,
                                   Schedule::defaults_for(params));
  EXPECT_EQ(out.up.weight, 1.0);
  EXPECT_EQ(out.down.weight, 0.0);
  EXPECT_EQ(out.off_diagonal_weight, 0.0);
}

TEST(Measurement, ShortWeakCouplingOnlyTruncates) {
  // Below g_c a short coupling window leaves the paramagnet in place.
  const auto params = params_with(100, 0.2, 0.02);
  const auto out = run_measurement(pure_state({1, 0, 0}), params,
                                   Schedule{200.0, 1000.0, 0.05});
  EXPECT_LT(std::abs(out.up.mean_m), 0.1);
  EXPECT_LT(std::abs(out.down.mean_m), 0.1);
  EXPECT_NE(out.up.classification.status, Status::Registered);
  EXPECT_LT(out.off_diagonal_weight, 1e-3);
}

TEST(Measurement, RegistrationThresholdInCouplingLiesNearCritical) {
  auto params = params_with(100);
  const auto registers = [&](double g) {
    params.g = g;
    const auto out = run_measurement(pure_state({0, 0, 1}), params,
                                     Schedule::defaults_for(params));
    return out.up.classification.status == Status::Registered;
  };
  double lo = 0.03;
  double hi = 0.06;
  ASSERT_FALSE(registers(lo));
  ASSERT_TRUE(registers(hi));
  for (int i = 0; i < 10; ++i) {
    const double mid = 0.5 * (lo + hi);
    (registers(mid) ? hi : lo) = mid;
  }
  EXPECT_GE(lo, 0.03);
  EXPECT_LE(hi, 0.045);
  EXPECT_GT(lo, 0.040);
  EXPECT_LT(hi, 0.042);
}

TEST(Sampling, DeterministicAndThreadIndependent) {
  const auto params = params_with(100);
  const auto schedule = Schedule::defaults_for(params);
  const auto rho0 = SpinDensityMatrix::from_elements(0.3, 0.0);
  const auto a = sample_trajectories(rho0, params, schedule, 300, 42);
  const auto b = sample_trajectories(rho0, params, schedule, 300, 42, {4, {}});
  const auto c = sample_trajectories(rho0, params, schedule, 300, 43, {3, {}});
  EXPECT_EQ(a.counts, b.counts);
  ASSERT_EQ(a.records.size(), b.records.size());
  bool any_difference = false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].final_m, b.records[i].final_m);
    EXPECT_EQ(a.records[i].seed, b.records[i].seed);
    EXPECT_EQ(a.records[i].sector, b.records[i].sector);
    any_difference |= a.records[i].final_m != c.records[i].final_m;
  }
  EXPECT_TRUE(any_difference);
  EXPECT_EQ(csv::to_string(records_table(a.records)),
            csv::to_string(records_table(b.records)));
}

TEST(Sampling, BornFrequencies) {
  const auto params = params_with(100);
  const auto rho0 = SpinDensityMatrix::from_elements(0.3, Complex(0.4, 0.0));
  const auto result = sample_trajectories(
      rho0, params, Schedule::defaults_for(params), 2000, 7, {4, {}});
  std::uint64_t drawn_up = 0;
  for (const auto& r : result.records) {
    drawn_up += r.sector == Sector::Up;
    if (r.outcome.status == Status::Registered) {
      EXPECT_EQ(*r.outcome.pointer, r.sector);
    }
    EXPECT_EQ(r.t_f, 2000.0);
  }
  EXPECT_EQ(result.counts.total(), 2000u);
  // about 5e-4 of the mass is still short of the threshold at t_f, so one
  // or two runs may end unregistered
  EXPECT_LE(result.counts.registered_up, drawn_up);
  EXPECT_GE(result.counts.registered_up + 10, drawn_up);
  EXPECT_GE(result.counts.registered_up + result.counts.registered_down, 1990u);
  const double sigma = std::sqrt(0.3 * 0.7 / 2000);
  EXPECT_NEAR(result.counts.registered_up / 2000.0, 0.3, 4 * sigma);
}

TEST(Sampling, MirrorImageTrajectories) {
  const auto params = params_with(100);
  const auto schedule = Schedule::defaults_for(params);
  const auto up = sample_trajectories(pure_state({0, 0, 1}), params, schedule, 50, 9);
  const auto down =
      sample_trajectories(pure_state({0, 0, -1}), params, schedule, 50, 9);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(up.records[i].sector, Sector::Up);
    EXPECT_EQ(down.records[i].sector, Sector::Down);
    EXPECT_EQ(up.records[i].final_m, -down.records[i].final_m);
    EXPECT_EQ(up.records[i].dissipated_free_energy,
              down.records[i].dissipated_free_energy);
  }
}

TEST(Sampling, RecordsTableColumns) {
  const auto params = params_with(20);
  const auto result = sample_trajectories(pure_state({1, 0, 0}), params,
                                          Schedule::defaults_for(params), 3, 1);
  const auto table = records_table(result.records);
  EXPECT_EQ(table.columns, (std::vector<std::string>{"run", "sector", "pointer",
                                                     "status", "dissipated_F",
                                                     "seed"}));
  EXPECT_EQ(table.rows.size(), 3u);
  EXPECT_THROW(sample_trajectories(pure_state({1, 0, 0}), params,
                                   Schedule::defaults_for(params), 0, 1),
               ValidationError);
}

}  // namespace
}  // namespace cwmeas
