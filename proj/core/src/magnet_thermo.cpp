#include "cwmeas/magnet_thermo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cwmeas/csv.hpp"

namespace cwmeas {
namespace {

constexpr double kAtanhClamp = 1.0 - 1e-15;
constexpr int kRootGridIntervals = 2000;
constexpr double kRootTolerance = 1e-13;

double clamped_atanh(double m) {
  return std::atanh(std::clamp(m, -kAtanhClamp, kAtanhClamp));
}

double x_log_x(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

template <class F>
double bisect(F&& f, double lo, double hi, double flo) {
  while (hi - lo > kRootTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// 4T/(3J) as the argument of the inflection-point quadratic.
double inflection_discriminant(double T, double J) {
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
  const double x = 4.0 * T / (3.0 * J);
  if (x >= 1.0) {
    throw PhaseError("no barrier regime: T >= 3J/4 leaves F convex");
  }
  return std::sqrt(1.0 - x);
}

}  // namespace

std::string to_string(Sector s) { return s == Sector::Up ? "+1" : "-1"; }

std::vector<std::string> ModelParams::violations() const {
  std::vector<std::string> bad;
  if (N < 2) bad.emplace_back("N");
  if (!(J > 0.0) || !std::isfinite(J)) bad.emplace_back("J");
  if (!(T > 0.0) || !std::isfinite(T)) bad.emplace_back("T");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) bad.emplace_back("gamma");
  if (!(Gamma > 0.0) || !std::isfinite(Gamma)) bad.emplace_back("Gamma");
  if (!(g >= 0.0) || !std::isfinite(g)) bad.emplace_back("g");
  if (n < 1) bad.emplace_back("n");
  if (!std::isfinite(b_x)) bad.emplace_back("b_x");
  return bad;
}

void ModelParams::validate() const {
  const auto bad = violations();
  if (bad.empty()) return;
  std::string msg = "invalid model parameters:";
  for (const auto& name : bad) msg += " " + name;
  throw ValidationError(msg);
}

double entropy_per_spin(double m) {
  if (!(std::abs(m) <= 1.0)) {
    throw DomainError("entropy_per_spin: |m| must not exceed 1");
  }
  return -(x_log_x(0.5 * (1.0 + m)) + x_log_x(0.5 * (1.0 - m)));
}

double Landscape::free_energy(double m) const {
  const double m2 = m * m;
  return -0.25 * J * m2 * m2 - g * sign(s) * m - T * entropy_per_spin(m);
}

double Landscape::slope(double m) const {
  return -J * m * m * m - g * sign(s) + T * clamped_atanh(m);
}

double Landscape::curvature(double m) const {
  const double m2 = std::min(m * m, kAtanhClamp);
  return -3.0 * J * m2 + T / (1.0 - m2);
}

double free_energy_per_spin(double m, double T, double g, Sector s,
                            double J) {
  if (!(T > 0.0)) throw DomainError("free_energy_per_spin: T must be > 0");
  return Landscape{T, g, s, J}.free_energy(m);
}

std::vector<StationaryPoint> stationary_points(const Landscape& landscape) {
  if (!(landscape.T > 0.0)) {
    throw DomainError("stationary_points: T must be > 0");
  }
  const auto f = [&](double m) { return landscape.slope(m); };
  const int half = kRootGridIntervals / 2;
  const auto node = [&](int i) {
    return kAtanhClamp * static_cast<double>(i - half) / half;
  };

  std::vector<double> roots;
  double m_prev = node(0);
  double f_prev = f(m_prev);
  if (f_prev == 0.0) roots.push_back(m_prev);
  for (int i = 1; i <= kRootGridIntervals; ++i) {
    const double m = node(i);
    const double fm = f(m);
    if (fm == 0.0) {
      roots.push_back(m);
    } else if (f_prev != 0.0 && (f_prev < 0.0) != (fm < 0.0)) {
      roots.push_back(bisect(f, m_prev, m, f_prev));
    }
    m_prev = m;
    f_prev = fm;
  }

  std::vector<StationaryPoint> out;
  out.reserve(roots.size());
  for (double r : roots) {
    out.push_back({r, landscape.curvature(r) < 0.0 ? StationaryKind::Maximum
                                                   : StationaryKind::Minimum});
  }
  return out;
}

bool has_barrier_toward_positive(const Landscape& landscape) {
  for (const auto& p : stationary_points(landscape)) {
    if (p.kind == StationaryKind::Maximum && p.m > 0.0) return true;
  }
  return false;
}

double ferromagnetic_magnetization(const Landscape& landscape) {
  // The ordered branch lies beyond the outer inflection point; a minimum
  // inside it is the (field-shifted) paramagnet.
  double outer = 0.0;
  try {
    const double root = inflection_discriminant(landscape.T, landscape.J);
    outer = std::sqrt(0.5 * (1.0 + root));
  } catch (const PhaseError&) {
    throw PhaseError("no ferromagnetic phase at T = " +
                     csv::format_double(landscape.T));
  }
  const int s = sign(landscape.s);
  double best = 0.0;
  bool found = false;
  for (const auto& p : stationary_points(landscape)) {
    if (p.kind != StationaryKind::Minimum) continue;
    const double aligned = p.m * s;
    if (aligned > outer && aligned > best) {
      best = aligned;
      found = true;
    }
  }
  if (!found) {
    throw PhaseError("no ferromagnetic phase at T = " +
                     csv::format_double(landscape.T) +
                     ", g = " + csv::format_double(landscape.g));
  }
  return best * s;
}

double inflection_magnetization(double T, double J) {
  const double root = inflection_discriminant(T, J);
  const double x = 4.0 * T / (3.0 * J);
  // (1 - sqrt(1 - x)) / 2 without cancellation.
  return std::sqrt(x / (2.0 * (1.0 + root)));
}

double critical_coupling(double T, double J) {
  const double m = inflection_magnetization(T, J);
  return T * std::atanh(m) - J * m * m * m;
}

FreeEnergyCurve export_curve(const Landscape& landscape, int grid_size) {
  if (grid_size < 3) {
    throw ValidationError("export_curve: grid_size must be at least 3");
  }
  constexpr double kEdge = 0.999999;
  FreeEnergyCurve curve;
  curve.T = landscape.T;
  curve.g = landscape.g;
  curve.s = landscape.s;
  curve.m_grid.reserve(grid_size);
  curve.f_values.reserve(grid_size);
  const int last = grid_size - 1;
  for (int i = 0; i < grid_size; ++i) {
    const double m = kEdge * static_cast<double>(2 * i - last) / last;
    curve.m_grid.push_back(m);
    curve.f_values.push_back(landscape.free_energy(m));
  }
  return curve;
}

std::vector<std::size_t> sampled_local_maxima(const FreeEnergyCurve& curve) {
  std::vector<std::size_t> out;
  const auto& f = curve.f_values;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    if (f[i] > f[i - 1] && f[i] > f[i + 1]) out.push_back(i);
  }
  return out;
}

void write_curve_csv(const FreeEnergyCurve& curve,
                     const std::filesystem::path& path) {
  csv::Table table({"m", "F_per_spin"});
  table.comments.push_back("T=" + csv::format_double(curve.T) +
                           ",g=" + csv::format_double(curve.g) +
                           ",s=" + to_string(curve.s));
  for (std::size_t i = 0; i < curve.m_grid.size(); ++i) {
    table.add_row({curve.m_grid[i], curve.f_values[i]});
  }
  csv::emit_csv(table, path);
}

}  // namespace cwmeas
