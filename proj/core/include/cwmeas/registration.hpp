#ifndef CWMEAS_REGISTRATION_HPP
#define CWMEAS_REGISTRATION_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwmeas/csv.hpp"
#include "cwmeas/magnet_thermo.hpp"
#include "cwmeas/qm_core.hpp"

namespace cwmeas {

/// m_i = (2i - N) / N; exactly antisymmetric under i -> N - i.
inline double lattice_m(int N, int i) {
  return static_cast<double>(2 * i - N) / N;
}

/// P_s(m) over the N+1 magnetization values, conditioned on the sector
/// whose conserved weight r_ss(0) is carried along.
class MagnetizationDistribution {
 public:
  /// Throws ValidationError on size != N+1, entries < -1e-12 or a total
  /// away from 1 by more than 1e-9.
  MagnetizationDistribution(int N, std::vector<double> p,
                            double sector_weight = 1.0);

  static MagnetizationDistribution point_mass(int N, int index,
                                              double sector_weight = 1.0);

  [[nodiscard]] int N() const { return N_; }
  [[nodiscard]] std::span<const double> p() const { return p_; }
  [[nodiscard]] double operator[](int i) const { return p_[i]; }
  [[nodiscard]] double m_at(int i) const { return lattice_m(N_, i); }
  [[nodiscard]] double sector_weight() const { return sector_weight_; }
  [[nodiscard]] MagnetizationDistribution with_weight(double w) const;

  [[nodiscard]] double total_mass() const;
  [[nodiscard]] double mean() const;
  [[nodiscard]] double variance() const;
  /// Mass on lattice points with m > threshold.
  [[nodiscard]] double mass_above(double threshold) const;
  /// Mass on lattice points with m < threshold.
  [[nodiscard]] double mass_below(double threshold) const;
  /// Mass on lattice points with |m| < radius.
  [[nodiscard]] double mass_within(double radius) const;
  /// The distribution of -m.
  [[nodiscard]] MagnetizationDistribution mirrored() const;

 private:
  int N_;
  std::vector<double> p_;
  double sector_weight_;
};

/// Single-flip rates out of each lattice point: up[i] for m -> m + 2/N,
/// down[i] for m -> m - 2/N. up[N] = down[0] = 0.
struct RateModel {
  std::vector<double> up;
  std::vector<double> down;

  [[nodiscard]] int N() const { return static_cast<int>(up.size()) - 1; }
  [[nodiscard]] double max_total_rate() const;
  /// dP/dt for the master equation with these rates.
  void apply(std::span<const double> p, std::span<double> out) const;
};

/// Magnet energy E(m) = -N J m^4 / 4 - N g s m at lattice point i.
double magnet_energy(const ModelParams& params, Sector s, double g_active,
                     int i);

/**
 * Heat-bath (Glauber) rates with flip-count prefactors and scale gamma:
 *
 *   W+(m) = gamma [N(1-m)/2] / (1 + exp(dE+ / T))
 *   W-(m) = gamma [N(1+m)/2] / (1 + exp(dE- / T))
 *
 * satisfying detailed balance against binomial(N, .) exp(-E/T).
 */
RateModel build_generator(const ModelParams& params, Sector s,
                          double g_active);

/// binomial(N, .) exp(-E/T) over the whole lattice: the exact fixed point
/// of build_generator(params, s, g_active).
MagnetizationDistribution equilibrium_distribution(const ModelParams& params,
                                                   Sector s, double g_active);

/// Index range [first, last] of the metastable well around m = 0 of the
/// lattice free energy at g = 0, out to the barrier tops. The full lattice
/// when m = 0 is not a local minimum (no metastable paramagnet).
std::pair<int, int> paramagnetic_basin(const ModelParams& params);

/// The paramagnetic ready state: equilibrium weights at g = 0 restricted
/// to paramagnetic_basin(params).
MagnetizationDistribution initial_distribution(const ModelParams& params);

/// Largest dt * max_total_rate accepted by evolve.
inline constexpr double kStabilityLimit = 0.1;

using EvolveObserver = std::function<void(double t, std::span<const double>)>;

/// Classic RK4 on dP/dt = generator(P) over [0, t_span] with steps no
/// longer than dt. The observer, when given, sees every completed step.
/// Throws GuardError when dt * max_total_rate > kStabilityLimit.
MagnetizationDistribution evolve(const MagnetizationDistribution& dist,
                                 const RateModel& rates, double t_span,
                                 double dt,
                                 const EvolveObserver& observer = {});

enum class Status { Registered, Relaxed, Undecided };
std::string to_string(Status status);

struct Classification {
  Status status = Status::Undecided;
  std::optional<Sector> pointer;  ///< set iff status == Registered

  friend bool operator==(const Classification&,
                         const Classification&) = default;
};

/// Registered(+/-1) when >= 0.99 of the mass lies beyond +/-m_threshold,
/// Relaxed when >= 0.99 lies within |m| < m_threshold / 2.
Classification classify(const MagnetizationDistribution& dist,
                        double m_threshold);
/// Same criterion applied to a single trajectory endpoint.
Classification classify_point(double m, double m_threshold);

/// m_F(T, g = 0) / 2, or 0.5 when there is no ferromagnetic phase.
double default_threshold(const ModelParams& params);

struct Schedule {
  double t_couple = 0.0;  ///< duration with g_active = g
  double t_relax = 0.0;   ///< duration with g_active = 0 after decoupling
  double dt = 0.0;        ///< RK4 step

  /// t_couple = 20/(gamma J), t_relax = 10/(gamma J), dt = 0.05/(gamma N).
  static Schedule defaults_for(const ModelParams& params);
  void validate() const;
};

/// N [F(0) - F(m)] with the decoupled (g = 0) landscape.
double dissipated_free_energy(const ModelParams& params, double m);

struct SectorOutcome {
  Sector sector = Sector::Up;
  double weight = 0.0;  ///< p_s = r_ss(0)
  MagnetizationDistribution at_decoupling;
  MagnetizationDistribution final_dist;
  double mean_m = 0.0;
  Classification classification;
  double dissipated_free_energy = 0.0;
};

struct MeasurementOutcome {
  SectorOutcome up;
  SectorOutcome down;
  /// |r_ud(0)| times the damped dephasing factor at t_couple.
  double off_diagonal_weight = 0.0;
  double m_threshold = 0.0;

  [[nodiscard]] const SectorOutcome& sector(Sector s) const {
    return s == Sector::Up ? up : down;
  }
};

struct MeasurementOptions {
  std::optional<double> theta;        ///< defaults to 1/(gamma T)
  std::optional<double> m_threshold;  ///< defaults to default_threshold
  /// Called for every RK4 step of each sector with the absolute time.
  std::function<void(Sector, double t, std::span<const double>)> observer;
};

/// Couples each sector for t_couple, decouples (g -> 0) and relaxes for
/// t_relax. The result has the post-measurement form
/// sum_s r_ss(0) |s><s| (x) R_s, with R_s the final P_s(m).
MeasurementOutcome run_measurement(const SpinDensityMatrix& rho0,
                                   const ModelParams& params,
                                   const Schedule& schedule,
                                   const MeasurementOptions& options = {});

struct MeasurementRecord {
  std::uint64_t run = 0;
  Sector sector = Sector::Up;
  Classification outcome;
  double final_m = 0.0;
  double dissipated_free_energy = 0.0;
  double t_f = 0.0;  ///< decoupling time
  std::uint64_t seed = 0;
};

struct OutcomeCounts {
  std::uint64_t registered_up = 0;
  std::uint64_t registered_down = 0;
  std::uint64_t relaxed = 0;
  std::uint64_t undecided = 0;

  [[nodiscard]] std::uint64_t total() const {
    return registered_up + registered_down + relaxed + undecided;
  }
  friend bool operator==(const OutcomeCounts&, const OutcomeCounts&) = default;
};

struct SamplingResult {
  OutcomeCounts counts;
  std::vector<MeasurementRecord> records;
};

struct SamplingOptions {
  unsigned threads = 1;               ///< never affects the results
  std::optional<double> m_threshold;  ///< defaults to default_threshold
};

/// Per-run RNG seed derived from (seed, run); independent of scheduling.
std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run);

/// n_runs independent exact-jump trajectories: sector drawn with
/// probability r_ss(0), start drawn from initial_distribution, then the
/// couple / decouple protocol. Deterministic in seed.
SamplingResult sample_trajectories(const SpinDensityMatrix& rho0,
                                   const ModelParams& params,
                                   const Schedule& schedule,
                                   std::uint64_t n_runs, std::uint64_t seed,
                                   const SamplingOptions& options = {});

/// Columns run, sector, pointer, status, dissipated_F, seed.
csv::Table records_table(std::span<const MeasurementRecord> records);

}  // namespace cwmeas

#endif  // CWMEAS_REGISTRATION_HPP
