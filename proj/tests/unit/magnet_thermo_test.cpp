#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "cwmeas/csv.hpp"
#include "cwmeas/magnet_thermo.hpp"
#include "support/test_oracles.hpp"

namespace cwmeas {
namespace {

// Values frozen from an independent high-precision evaluation.
constexpr double kGcT01 = 0.012384224101269624;
constexpr double kGcT02 = 0.035692730110037325;
constexpr double kGcT03 = 0.06693999830419525;
constexpr double kMF = 0.9999089559652065;        // T=0.2, g=0
constexpr double kMFCoupled = 0.999944837413474;  // T=0.2, g=0.05
constexpr double kBarrierTop = 0.46548148462124334;

int count(const std::vector<StationaryPoint>& pts, StationaryKind kind,
          double lo, double hi) {
  int n = 0;
  for (const auto& p : pts) n += p.kind == kind && p.m > lo && p.m < hi;
  return n;
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy_per_spin(0.0), std::numbers::ln2, 1e-15);
  EXPECT_EQ(entropy_per_spin(1.0), 0.0);
  EXPECT_EQ(entropy_per_spin(-1.0), 0.0);
  EXPECT_NEAR(entropy_per_spin(0.5), 0.5623351446188083, 1e-15);
  EXPECT_THROW(entropy_per_spin(1.0001), DomainError);
  EXPECT_THROW(entropy_per_spin(-2.0), DomainError);
}

TEST(FreeEnergy, Examples) {
  for (double g : {0.0, 0.02, 0.05, 1.0}) {
    EXPECT_NEAR(free_energy_per_spin(0.0, 0.2, g, Sector::Up),
                -0.2 * std::numbers::ln2, 1e-15);
  }
  EXPECT_NEAR(free_energy_per_spin(1.0, 0.2, 0.0, Sector::Up), -0.25, 1e-15);
  EXPECT_THROW(free_energy_per_spin(1.5, 0.2, 0.0, Sector::Up), DomainError);
}

TEST(FreeEnergy, DerivativesMatchFiniteDifferences) {
  const Landscape land{0.2, 0.03, Sector::Down, 1.0};
  for (double m = -0.95; m <= 0.95; m += 0.05) {
    const double h = 1e-5;
    const double fd1 =
        (land.free_energy(m + h) - land.free_energy(m - h)) / (2 * h);
    const double fd2 = (land.slope(m + h) - land.slope(m - h)) / (2 * h);
    EXPECT_NEAR(land.slope(m), fd1, 1e-8) << m;
    EXPECT_NEAR(land.curvature(m), fd2, 1e-6) << m;
  }
}

TEST(FreeEnergy, ShapeAtFigureCouplings) {
  EXPECT_TRUE(has_barrier_toward_positive({0.2, 0.02, Sector::Up}));
  EXPECT_FALSE(has_barrier_toward_positive({0.2, 0.05, Sector::Up}));
}

TEST(StationaryPoints, ZeroCouplingAtT02) {
  const auto pts = stationary_points({0.2, 0.0, Sector::Up});
  ASSERT_EQ(pts.size(), 5u);
  EXPECT_EQ(pts[0].kind, StationaryKind::Minimum);
  EXPECT_EQ(pts[1].kind, StationaryKind::Maximum);
  EXPECT_EQ(pts[2].kind, StationaryKind::Minimum);
  EXPECT_EQ(pts[3].kind, StationaryKind::Maximum);
  EXPECT_EQ(pts[4].kind, StationaryKind::Minimum);
  EXPECT_NEAR(pts[0].m, -kMF, 1e-10);
  EXPECT_NEAR(pts[1].m, -kBarrierTop, 1e-10);
  EXPECT_EQ(pts[2].m, 0.0);
  EXPECT_NEAR(pts[3].m, kBarrierTop, 1e-10);
  EXPECT_NEAR(pts[4].m, kMF, 1e-10);
}

TEST(StationaryPoints, StrongCouplingLeavesOnlyTheFerromagneticMinimum) {
  const auto pts = stationary_points({0.2, 0.05, Sector::Up});
  EXPECT_EQ(count(pts, StationaryKind::Minimum, 0.0, 1.0), 1);
  EXPECT_EQ(count(pts, StationaryKind::Maximum, 0.0, 1.0), 0);
  for (const auto& p : pts) {
    if (p.m > 0) {
      EXPECT_NEAR(p.m, kMFCoupled, 1e-10);
    }
  }
}

TEST(StationaryPoints, BarrierIffBelowCriticalCoupling) {
  const double gc = critical_coupling(0.2);
  for (double g : {0.02, 0.0356, 0.0358, 0.05}) {
    const auto pts = stationary_points({0.2, g, Sector::Up});
    const bool has_max = count(pts, StationaryKind::Maximum, 0.0, 1.0) > 0;
    EXPECT_EQ(has_max, g < gc) << g;
  }
}

// The window of couplings with three positive stationary points closes as
// the two inflection points of the landscape merge at T = 3/4.
// Three positive stationary points exist for g between max(h(m2), 0) and
// h(m1), with m1 < m2 the inflection points. The window closes as T -> 3/4.
TEST(StationaryPoints, ThreeRootWindowClosesTowardThreeQuarters) {
  double previous_width = 1.0;
  for (double T : {0.3, 0.5, 0.6, 0.7, 0.74, 0.749}) {
    const double m1 = inflection_magnetization(T);
    const double m2 = std::sqrt(1.0 - m1 * m1);
    const auto h = [&](double m) { return T * std::atanh(m) - m * m * m; };
    const double lo = std::max(h(m2), 0.0);
    const double hi = h(m1);
    ASSERT_LT(lo, hi) << T;
    const double width = hi - lo;
    if (T > 0.3) {
      EXPECT_GT(lo, 0.0) << T;
      EXPECT_LT(width, previous_width) << T;
      previous_width = width;
    }
    const auto pts = stationary_points({T, 0.5 * (lo + hi), Sector::Up});
    EXPECT_EQ(count(pts, StationaryKind::Minimum, 0.0, 1.0) +
                  count(pts, StationaryKind::Maximum, 0.0, 1.0),
              3)
        << T;
  }
  EXPECT_LT(previous_width, 1e-4);
  EXPECT_THROW(inflection_magnetization(0.75 + 1e-9), PhaseError);
}

TEST(StationaryPoints, OnlyParamagnetAboveTheFerromagneticPhase) {
  const auto pts = stationary_points({0.74, 0.0, Sector::Up});
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].m, 0.0);
  EXPECT_EQ(pts[0].kind, StationaryKind::Minimum);
}

TEST(Ferromagnet, Magnetization) {
  EXPECT_NEAR(ferromagnetic_magnetization({0.2, 0.0, Sector::Up}), kMF, 1e-12);
  EXPECT_NEAR(ferromagnetic_magnetization({0.2, 0.0, Sector::Down}), -kMF,
              1e-12);
  const double coupled = ferromagnetic_magnetization({0.2, 0.05, Sector::Up});
  EXPECT_NEAR(coupled, kMFCoupled, 1e-12);
  EXPECT_GT(coupled, kMF);
  EXPECT_THROW(ferromagnetic_magnetization({0.6, 0.0, Sector::Up}), PhaseError);
}

TEST(Ferromagnet, AgreesWithTanhIteration) {
  for (double T : {0.1, 0.2, 0.3, 0.4}) {
    for (double g : {0.0, 0.01, 0.05, 0.1}) {
      EXPECT_NEAR(ferromagnetic_magnetization({T, g, Sector::Up}),
                  testing::fixed_point_magnetization(T, g), 1e-12)
          << T << ' ' << g;
    }
  }
}

TEST(CriticalCoupling, Values) {
  EXPECT_NEAR(critical_coupling(0.2), kGcT02, 1e-12);
  EXPECT_NEAR(critical_coupling(0.1), kGcT01, 1e-12);
  EXPECT_NEAR(critical_coupling(0.3), kGcT03, 1e-12);
  EXPECT_NEAR(inflection_magnetization(0.1), 0.18581, 1e-5);
  EXPECT_NEAR(inflection_magnetization(0.2), 0.26800, 1e-5);
  EXPECT_NEAR(inflection_magnetization(0.3), 0.33571, 1e-5);
}

TEST(CriticalCoupling, AgreesWithScannedMaximum) {
  for (double T = 0.05; T < 0.74; T += 0.05) {
    EXPECT_NEAR(critical_coupling(T), testing::scanned_critical_coupling(T),
                1e-11)
        << T;
  }
}

TEST(CriticalCoupling, Errors) {
  EXPECT_THROW(critical_coupling(0.75), PhaseError);
  EXPECT_THROW(critical_coupling(1.0), PhaseError);
  EXPECT_THROW(critical_coupling(0.0), DomainError);
  EXPECT_THROW(critical_coupling(-0.1), DomainError);
}

TEST(CriticalCouplingProperty, StrictlyIncreasing) {
  double prev = critical_coupling(0.05);
  for (int i = 1; i <= 90; ++i) {
    const double T = 0.05 + 0.005 * i;
    const double gc = critical_coupling(T);
    EXPECT_GT(gc, prev) << T;
    prev = gc;
  }
}

TEST(LandscapeProperty, SectorMirrorIsExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> m(-1.0, 1.0);
  std::uniform_real_distribution<double> T(0.01, 1.0);
  std::uniform_real_distribution<double> g(0.0, 0.2);
  for (int i = 0; i < 2000; ++i) {
    const double mm = m(rng);
    const double TT = T(rng);
    const double gg = g(rng);
    ASSERT_EQ(free_energy_per_spin(mm, TT, gg, Sector::Up),
              free_energy_per_spin(-mm, TT, gg, Sector::Down));
    ASSERT_EQ(free_energy_per_spin(mm, TT, 0.0, Sector::Up),
              free_energy_per_spin(-mm, TT, 0.0, Sector::Up));
  }
}

TEST(LandscapeProperty, ParamagnetCurvatureIsT) {
  for (double T = 0.01; T < 2.0; T += 0.07) {
    EXPECT_EQ(Landscape({T, 0.0, Sector::Up}).curvature(0.0), T);
  }
}

TEST(LandscapeProperty, MinimaSolveTheTanhEquation) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> T(0.05, 0.7);
  std::uniform_real_distribution<double> g(0.0, 0.1);
  for (int i = 0; i < 100; ++i) {
    const Landscape land{T(rng), g(rng), Sector::Up};
    for (const auto& p : stationary_points(land)) {
      if (p.kind != StationaryKind::Minimum) continue;
      const double rhs = std::tanh((p.m * p.m * p.m + land.g) / land.T);
      EXPECT_NEAR(p.m, rhs, 1e-10) << land.T << ' ' << land.g;
      EXPECT_GT(land.curvature(p.m), 0.0);
    }
  }
}

TEST(ExportCurve, ShapeProperties) {
  const auto flat = export_curve({0.2, 0.0, Sector::Up}, 401);
  const auto coupled = export_curve({0.2, 0.05, Sector::Up}, 401);
  ASSERT_EQ(flat.m_grid.size(), 401u);
  EXPECT_EQ(flat.m_grid.front(), -0.999999);
  EXPECT_EQ(flat.m_grid.back(), 0.999999);
  for (std::size_t i = 0; i < flat.m_grid.size(); ++i) {
    const std::size_t j = flat.m_grid.size() - 1 - i;
    EXPECT_EQ(flat.m_grid[i], -flat.m_grid[j]);
    EXPECT_EQ(flat.f_values[i], flat.f_values[j]);
    EXPECT_NEAR(coupled.f_values[i] - flat.f_values[i],
                -0.05 * flat.m_grid[i], 1e-15);
  }
  const auto has_interior_max = [](const FreeEnergyCurve& c) {
    for (auto i : sampled_local_maxima(c)) {
      if (c.m_grid[i] > 0.0 && c.m_grid[i] < 1.0) return true;
    }
    return false;
  };
  EXPECT_TRUE(has_interior_max(export_curve({0.2, 0.02, Sector::Up}, 401)));
  EXPECT_FALSE(has_interior_max(coupled));
  EXPECT_THROW(export_curve({0.2, 0.0, Sector::Up}, 2), ValidationError);
}

TEST(ExportCurve, CsvLayout) {
  const auto path = std::filesystem::temp_directory_path() / "cwmeas_curve.csv";
  write_curve_csv(export_curve({0.2, 0.02, Sector::Up}, 5), path);
  const auto parsed = csv::read_file(path);
  ASSERT_EQ(parsed.comments.size(), 1u);
  EXPECT_NE(parsed.comments[0].find("g=0.02"), std::string::npos);
  EXPECT_EQ(parsed.columns, (std::vector<std::string>{"m", "F_per_spin"}));
  ASSERT_EQ(parsed.rows.size(), 5u);
  EXPECT_EQ(csv::parse_double(parsed.rows[2][0]), 0.0);
  EXPECT_EQ(csv::parse_double(parsed.rows[2][1]),
            free_energy_per_spin(0.0, 0.2, 0.02, Sector::Up));
  std::filesystem::remove(path);
}

TEST(ModelParams, ViolationsNameTheField) {
  ModelParams p;
  EXPECT_TRUE(p.violations().empty());
  p.g = -0.1;
  p.N = 0;
  const auto v = p.violations();
  EXPECT_NE(std::find(v.begin(), v.end(), "g"), v.end());
  EXPECT_NE(std::find(v.begin(), v.end(), "N"), v.end());
  EXPECT_THROW(p.validate(), ValidationError);
  EXPECT_EQ(to_string(Sector::Up), "+1");
  EXPECT_EQ(to_string(Sector::Down), "-1");
}

}  // namespace
}  // namespace cwmeas
