#ifndef CWMEAS_ORACLE_HPP
#define CWMEAS_ORACLE_HPP

#include <vector>

#include "cwmeas/csv.hpp"
#include "cwmeas/qm_core.hpp"

namespace cwmeas::oracle {

inline constexpr int kMaxEnumerationSpins = 20;
inline constexpr int kMaxCorrelationSpins = 16;
inline constexpr int kMaxCorrelationOrder = 3;
inline constexpr int kMaxNonidealSpins = 12;

/**
 * r_ud(t) / r_ud(0) by explicit summation over all 2^N magnet
 * configurations of an unpolarized magnet. With include_quartic each
 * configuration also carries its self-energy -J M^4 / (4 N^3) in both
 * sectors, which must cancel. N <= 20.
 */
double enumerate_truncation_factor(int N, double g, double t,
                                   bool include_quartic, double J = 1.0);

/// |<|u><d| sigma_z^(1)...sigma_z^(k)>(t)| / |r_ud(0)| by enumeration over
/// the 2^N configurations. k <= 3, N <= 16.
double correlation_oracle(int k, int N, double g, double t);

/// Amplitudes over (tested spin b in {up, down}) x (magnet index k = 0..N,
/// M = 2k - N), in the order [b * (N+1) + k].
class SymmetricSectorState {
 public:
  SymmetricSectorState(int N, std::vector<Complex> amplitudes);

  [[nodiscard]] int N() const { return N_; }
  [[nodiscard]] const std::vector<Complex>& amplitudes() const { return a_; }
  [[nodiscard]] Complex up(int k) const { return a_[k]; }
  [[nodiscard]] Complex down(int k) const { return a_[N_ + 1 + k]; }
  [[nodiscard]] double norm() const;

 private:
  int N_;
  std::vector<Complex> a_;
};

struct NonidealParams {
  int N = 8;
  double g = 0.05;
  double b_x = 0.0;
  double J = 1.0;
  bool include_quartic = true;
};

struct NonidealTrajectory {
  std::vector<double> times;
  std::vector<SpinDensityMatrix> states;
  std::vector<double> delta;  ///< |r_uu(t) - r_uu(0)|
  double max_norm_drift = 0.0;

  /// Columns t, r_uu, re_r_ud, im_r_ud, delta.
  [[nodiscard]] csv::Table table() const;
};

/// Largest precession frequency sqrt((gN)^2 + b_x^2) over the magnet
/// sectors; pi / (2 * this) is the first quarter period.
double fastest_precession(const NonidealParams& params);

/**
 * Schrodinger evolution of rho0 (x) unpolarized magnet under
 * H = -b_x s_x - g s_z M - J M^4 / (4 N^3), N <= 12, by fixed-step RK4 in
 * the interaction picture of the diagonal part. Samples every
 * `sample_every` steps (and at t_end). Throws GuardError if any state's
 * norm drifts by more than 1e-8.
 */
NonidealTrajectory evolve_nonideal(const NonidealParams& params,
                                   const SpinDensityMatrix& rho0, double t_end,
                                   double dt, int sample_every = 1);

}  // namespace cwmeas::oracle

#endif  // CWMEAS_ORACLE_HPP
