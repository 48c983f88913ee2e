#ifndef CWMEAS_MAGNET_THERMO_HPP
#define CWMEAS_MAGNET_THERMO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "cwmeas/errors.hpp"

namespace cwmeas {

// Natural units throughout: hbar = k_B = 1 and J sets the energy scale, so
// times are in hbar/J and T, g, b_x in units of J.

/// Eigenvalue s = +1 / -1 of the tested spin's s_z.
enum class Sector : int { Up = 1, Down = -1 };

constexpr int sign(Sector s) { return static_cast<int>(s); }
constexpr Sector opposite(Sector s) {
  return s == Sector::Up ? Sector::Down : Sector::Up;
}
std::string to_string(Sector s);

/// Parameters of the tested spin + magnet + bath model.
struct ModelParams {
  int N = 100;           ///< magnet spins
  double J = 1.0;        ///< quartet coupling energy
  double T = 0.2;        ///< bath temperature
  double gamma = 0.01;   ///< dimensionless magnet-bath coupling
  double Gamma = 10.0;   ///< Debye cutoff frequency
  double g = 0.05;       ///< tested spin - magnet coupling
  int n = 1;             ///< tested-system spin count
  double b_x = 0.0;      ///< transverse field on the tested spin

  /// Names of violated invariants ("N", "T", ...); empty when valid.
  [[nodiscard]] std::vector<std::string> violations() const;
  /// Throws ValidationError naming every violated field.
  void validate() const;
};

/// Binary mixing entropy per spin, 0 ln 0 = 0 at |m| = 1.
double entropy_per_spin(double m);

/**
 * Mean-field free energy per spin of the quartic Curie-Weiss magnet in the
 * sector s, where the coupling acts as a field g*s:
 *
 *   F(m)/N = -J m^4 / 4 - g s m - T S(m)
 */
struct Landscape {
  double T = 0.2;
  double g = 0.0;
  Sector s = Sector::Up;
  double J = 1.0;

  [[nodiscard]] double free_energy(double m) const;
  /// dF/dm = -J m^3 - g s + T atanh(m)
  [[nodiscard]] double slope(double m) const;
  /// d2F/dm2 = -3 J m^2 + T / (1 - m^2)
  [[nodiscard]] double curvature(double m) const;
};

double free_energy_per_spin(double m, double T, double g, Sector s,
                            double J = 1.0);

enum class StationaryKind { Minimum, Maximum };

struct StationaryPoint {
  double m;
  StationaryKind kind;
};

/// All roots of dF/dm on (-1, 1), ascending, located to |dm| <= 1e-10.
std::vector<StationaryPoint> stationary_points(const Landscape& landscape);

/// True if a local maximum lies strictly inside (0, 1) (s = +1 barrier).
bool has_barrier_toward_positive(const Landscape& landscape);

/// Ferromagnetic fixed point m = tanh((J m^3 + g s)/T) nearest |m| = 1 on
/// the side of s. Throws PhaseError when no such minimum exists.
double ferromagnetic_magnetization(const Landscape& landscape);

/// Smaller positive root of 3 J m^2 (1 - m^2) = T: where the barrier
/// maximum and the paramagnetic minimum can merge.
double inflection_magnetization(double T, double J = 1.0);

/// Smallest g >= 0 that removes the barrier between m = 0 and +m_F:
/// g_c = T atanh(m*) - J m*^3. Throws PhaseError for T >= 3J/4.
double critical_coupling(double T, double J = 1.0);

struct FreeEnergyCurve {
  std::vector<double> m_grid;
  std::vector<double> f_values;
  double T = 0.0;
  double g = 0.0;
  Sector s = Sector::Up;
};

/// Uniform samples of F(m)/N on [-0.999999, 0.999999]; grid_size >= 3.
FreeEnergyCurve export_curve(const Landscape& landscape, int grid_size);

/// Interior indices where the sampled curve has a strict local maximum.
std::vector<std::size_t> sampled_local_maxima(const FreeEnergyCurve& curve);

/// `# T=...,g=...,s=...` comment line, then `m,F_per_spin`.
void write_curve_csv(const FreeEnergyCurve& curve,
                     const std::filesystem::path& path);

}  // namespace cwmeas

#endif  // CWMEAS_MAGNET_THERMO_HPP
