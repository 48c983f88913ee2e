#include "cwmeas/registration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "cwmeas/dephasing.hpp"
#include "cwmeas/kinetic.hpp"

namespace cwmeas {
namespace {

constexpr double kMassTolerance = 1e-9;
constexpr double kDecisiveMass = 0.99;

// Ordered so that k and N - k give bitwise equal results.
double log_binomial(int N, int k) {
  const int lo = std::min(k, N - k);
  return std::lgamma(N + 1.0) - (std::lgamma(lo + 1.0) + std::lgamma(N - lo + 1.0));
}

// Lattice free energy at g = 0 in units of T: E_i / T - ln C(N, i).
std::vector<double> lattice_free_energy(const ModelParams& params) {
  std::vector<double> f(params.N + 1);
  for (int i = 0; i <= params.N; ++i) {
    f[i] = magnet_energy(params, Sector::Up, 0.0, i) / params.T -
           log_binomial(params.N, i);
  }
  return f;
}

std::vector<double> boltzmann_weights(std::span<const double> reduced_f) {
  const double f_min = *std::min_element(reduced_f.begin(), reduced_f.end());
  std::vector<double> w(reduced_f.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-(reduced_f[i] - f_min));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

double logistic_down(double x) { return 1.0 / (1.0 + std::exp(x)); }

}  // namespace

MagnetizationDistribution::MagnetizationDistribution(int N,
                                                     std::vector<double> p,
                                                     double sector_weight)
    : N_(N), p_(std::move(p)), sector_weight_(sector_weight) {
  if (N_ < 1 || p_.size() != static_cast<std::size_t>(N_) + 1) {
    throw ValidationError("magnetization distribution: expected N+1 = " +
                          std::to_string(N_ + 1) + " entries, got " +
                          std::to_string(p_.size()));
  }
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= -1e-12) || !std::isfinite(p_[i])) {
      throw ValidationError("magnetization distribution: p[" +
                            std::to_string(i) + "] is negative");
    }
  }
  if (std::abs(total_mass() - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os << "magnetization distribution: total mass " << total_mass()
       << " differs from 1";
    throw ValidationError(os.str());
  }
  if (!(sector_weight_ >= 0.0 && sector_weight_ <= 1.0)) {
    throw ValidationError("magnetization distribution: sector weight must "
                          "lie in [0, 1]");
  }
}

MagnetizationDistribution MagnetizationDistribution::point_mass(
    int N, int index, double sector_weight) {
  if (index < 0 || index > N) {
    throw ValidationError("point_mass: index outside the lattice");
  }
  std::vector<double> p(N + 1, 0.0);
  p[index] = 1.0;
  return {N, std::move(p), sector_weight};
}

MagnetizationDistribution MagnetizationDistribution::with_weight(
    double w) const {
  return {N_, p_, w};
}

double MagnetizationDistribution::total_mass() const {
  return std::accumulate(p_.begin(), p_.end(), 0.0);
}

// Pairs i with N - i so that a mirrored distribution gives exactly -mean.
double MagnetizationDistribution::mean() const {
  double acc = 0.0;
  for (int i = 0; 2 * i < N_; ++i) acc += (p_[i] - p_[N_ - i]) * m_at(i);
  return acc;
}

double MagnetizationDistribution::variance() const {
  const double mu = mean();
  double acc = 0.0;
  for (int i = 0; i <= N_; ++i) {
    const double d = m_at(i) - mu;
    acc += p_[i] * d * d;
  }
  return acc;
}

double MagnetizationDistribution::mass_above(double threshold) const {
  double acc = 0.0;
  for (int i = 0; i <= N_; ++i) {
    if (m_at(i) > threshold) acc += p_[i];
  }
  return acc;
}

double MagnetizationDistribution::mass_below(double threshold) const {
  double acc = 0.0;
  for (int i = 0; i <= N_; ++i) {
    if (m_at(i) < threshold) acc += p_[i];
  }
  return acc;
}

double MagnetizationDistribution::mass_within(double radius) const {
  double acc = 0.0;
  for (int i = 0; i <= N_; ++i) {
    if (std::abs(m_at(i)) < radius) acc += p_[i];
  }
  return acc;
}

MagnetizationDistribution MagnetizationDistribution::mirrored() const {
  return {N_, std::vector<double>(p_.rbegin(), p_.rend()), sector_weight_};
}

double RateModel::max_total_rate() const {
  double best = 0.0;
  for (std::size_t i = 0; i < up.size(); ++i) {
    best = std::max(best, up[i] + down[i]);
  }
  return best;
}

void RateModel::apply(std::span<const double> p, std::span<double> out) const {
  const std::size_t last = up.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const double from_below = i > 0 ? up[i - 1] * p[i - 1] : 0.0;
    const double from_above = i < last ? down[i + 1] * p[i + 1] : 0.0;
    out[i] = (from_below + from_above) - (up[i] + down[i]) * p[i];
  }
}

double magnet_energy(const ModelParams& params, Sector s, double g_active,
                     int i) {
  const double m = lattice_m(params.N, i);
  const double m2 = m * m;
  return -params.N * (0.25 * params.J * m2 * m2 + g_active * sign(s) * m);
}

RateModel build_generator(const ModelParams& params, Sector s,
                          double g_active) {
  params.validate();
  const int N = params.N;
  std::vector<double> energy(N + 1);
  for (int i = 0; i <= N; ++i) energy[i] = magnet_energy(params, s, g_active, i);

  RateModel rates;
  rates.up.assign(N + 1, 0.0);
  rates.down.assign(N + 1, 0.0);
  for (int i = 0; i <= N; ++i) {
    if (i < N) {
      const double dE = energy[i + 1] - energy[i];
      rates.up[i] = params.gamma * (N - i) * logistic_down(dE / params.T);
    }
    if (i > 0) {
      const double dE = energy[i - 1] - energy[i];
      rates.down[i] = params.gamma * i * logistic_down(dE / params.T);
    }
  }
  return rates;
}

MagnetizationDistribution equilibrium_distribution(const ModelParams& params,
                                                   Sector s, double g_active) {
  params.validate();
  std::vector<double> f(params.N + 1);
  for (int i = 0; i <= params.N; ++i) {
    f[i] = magnet_energy(params, s, g_active, i) / params.T -
           log_binomial(params.N, i);
  }
  return {params.N, boltzmann_weights(f)};
}

std::pair<int, int> paramagnetic_basin(const ModelParams& params) {
  params.validate();
  const int N = params.N;
  const auto f = lattice_free_energy(params);
  int hi = (N + 1) / 2;
  if (hi >= N || !(f[hi + 1] > f[hi])) return {0, N};
  while (hi < N && f[hi + 1] >= f[hi]) ++hi;
  return {N - hi, hi};
}

MagnetizationDistribution initial_distribution(const ModelParams& params) {
  const auto [first, last] = paramagnetic_basin(params);
  const auto f = lattice_free_energy(params);
  const auto w = boltzmann_weights(
      std::span<const double>(f).subspan(first, last - first + 1));
  std::vector<double> p(params.N + 1, 0.0);
  std::copy(w.begin(), w.end(), p.begin() + first);
  return {params.N, std::move(p)};
}

MagnetizationDistribution evolve(const MagnetizationDistribution& dist,
                                 const RateModel& rates, double t_span,
                                 double dt, const EvolveObserver& observer) {
  if (rates.N() != dist.N()) {
    throw ValidationError("evolve: rate model and distribution sizes differ");
  }
  if (!(t_span >= 0.0) || !(dt > 0.0)) {
    throw ValidationError("evolve: need t_span >= 0 and dt > 0");
  }
  const double max_rate = rates.max_total_rate();
  if (dt * max_rate > kStabilityLimit) {
    std::ostringstream os;
    os << "stability guard: dt * max_total_rate = " << dt * max_rate
       << " exceeds " << kStabilityLimit << "; use dt <= "
       << kStabilityLimit / max_rate;
    throw GuardError(os.str());
  }
  if (t_span == 0.0) return dist;

  const auto steps = static_cast<long long>(std::ceil(t_span / dt - 1e-9));
  const double h = t_span / static_cast<double>(steps);
  const std::size_t size = dist.p().size();
  std::vector<double> p(dist.p().begin(), dist.p().end());
  std::vector<double> k1(size), k2(size), k3(size), k4(size), tmp(size);

  for (long long step = 1; step <= steps; ++step) {
    rates.apply(p, k1);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
    rates.apply(tmp, k2);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
    rates.apply(tmp, k3);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = p[i] + h * k3[i];
    rates.apply(tmp, k4);
    for (std::size_t i = 0; i < size; ++i) {
      p[i] += h / 6.0 * ((k1[i] + k4[i]) + 2.0 * (k2[i] + k3[i]));
    }
    if (observer) observer(static_cast<double>(step) * h, p);
  }
  return {dist.N(), std::move(p), dist.sector_weight()};
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Registered:
      return "Registered";
    case Status::Relaxed:
      return "Relaxed";
    case Status::Undecided:
      return "Undecided";
  }
  return "Unknown";
}

Classification classify(const MagnetizationDistribution& dist,
                        double m_threshold) {
  if (!(m_threshold > 0.0 && m_threshold < 1.0)) {
    throw ValidationError("classify: m_threshold must lie in (0, 1)");
  }
  if (dist.mass_above(m_threshold) >= kDecisiveMass) {
    return {Status::Registered, Sector::Up};
  }
  if (dist.mass_below(-m_threshold) >= kDecisiveMass) {
    return {Status::Registered, Sector::Down};
  }
  if (dist.mass_within(0.5 * m_threshold) >= kDecisiveMass) {
    return {Status::Relaxed, std::nullopt};
  }
  return {Status::Undecided, std::nullopt};
}

Classification classify_point(double m, double m_threshold) {
  if (!(m_threshold > 0.0 && m_threshold < 1.0)) {
    throw ValidationError("classify: m_threshold must lie in (0, 1)");
  }
  if (m > m_threshold) return {Status::Registered, Sector::Up};
  if (m < -m_threshold) return {Status::Registered, Sector::Down};
  if (std::abs(m) < 0.5 * m_threshold) return {Status::Relaxed, std::nullopt};
  return {Status::Undecided, std::nullopt};
}

double default_threshold(const ModelParams& params) {
  try {
    return 0.5 * ferromagnetic_magnetization(
                     Landscape{params.T, 0.0, Sector::Up, params.J});
  } catch (const PhaseError&) {
    return 0.5;
  }
}

Schedule Schedule::defaults_for(const ModelParams& params) {
  if (params.N < 1 || !(params.J > 0.0) || !(params.gamma > 0.0)) {
    throw ValidationError("schedule defaults need N >= 1, J > 0, gamma > 0");
  }
  return {20.0 / (params.gamma * params.J), 10.0 / (params.gamma * params.J),
          0.05 / (params.gamma * params.N)};
}

void Schedule::validate() const {
  std::string bad;
  if (!(t_couple > 0.0) || !std::isfinite(t_couple)) bad += " t_couple";
  if (!(t_relax > 0.0) || !std::isfinite(t_relax)) bad += " t_relax";
  if (!(dt > 0.0) || !std::isfinite(dt)) bad += " dt";
  if (!bad.empty()) throw ValidationError("invalid schedule:" + bad);
}

double dissipated_free_energy(const ModelParams& params, double m) {
  const Landscape decoupled{params.T, 0.0, Sector::Up, params.J};
  // F is even at g = 0; folding keeps mirrored outcomes bitwise equal
  const double clamped = std::min(std::abs(m), 1.0);
  return params.N * (decoupled.free_energy(0.0) - decoupled.free_energy(clamped));
}

MeasurementOutcome run_measurement(const SpinDensityMatrix& rho0,
                                   const ModelParams& params,
                                   const Schedule& schedule,
                                   const MeasurementOptions& options) {
  params.validate();
  schedule.validate();
  const double threshold =
      options.m_threshold.value_or(default_threshold(params));
  const auto ready = initial_distribution(params);
  const RateModel relax = build_generator(params, Sector::Up, 0.0);

  const auto run_sector = [&](Sector s, double weight) {
    const RateModel couple = build_generator(params, s, params.g);
    EvolveObserver during, after;
    if (options.observer) {
      during = [&](double t, std::span<const double> p) {
        options.observer(s, t, p);
      };
      after = [&](double t, std::span<const double> p) {
        options.observer(s, schedule.t_couple + t, p);
      };
    }
    SectorOutcome out{s, weight, ready.with_weight(weight), ready, 0.0, {}, 0.0};
    out.at_decoupling = evolve(out.at_decoupling, couple, schedule.t_couple,
                               schedule.dt, during);
    out.final_dist = evolve(out.at_decoupling, relax, schedule.t_relax,
                            schedule.dt, after);
    out.mean_m = out.final_dist.mean();
    out.classification = classify(out.final_dist, threshold);
    out.dissipated_free_energy = dissipated_free_energy(params, out.mean_m);
    return out;
  };

  MeasurementOutcome outcome{run_sector(Sector::Up, rho0.r_uu()),
                             run_sector(Sector::Down, rho0.r_dd()), 0.0,
                             threshold};
  double factor = 1.0;
  if (params.g > 0.0) {
    const DephasingModel dephasing({params.N, params.g, 1,
                                    options.theta.value_or(default_bath_time(
                                        params.gamma, params.T))});
    factor = std::abs(dephasing.damped_truncation_factor(schedule.t_couple));
  }
  outcome.off_diagonal_weight = factor * std::abs(rho0.r_ud());
  return outcome;
}

std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run) {
  return splitmix64(splitmix64(seed) ^ run);
}

SamplingResult sample_trajectories(const SpinDensityMatrix& rho0,
                                   const ModelParams& params,
                                   const Schedule& schedule,
                                   std::uint64_t n_runs, std::uint64_t seed,
                                   const SamplingOptions& options) {
  params.validate();
  schedule.validate();
  if (n_runs < 1) throw ValidationError("sample_trajectories: n_runs >= 1");
  const double threshold =
      options.m_threshold.value_or(default_threshold(params));
  const auto ready = initial_distribution(params);
  const RateModel couple_up = build_generator(params, Sector::Up, params.g);
  const RateModel couple_down = build_generator(params, Sector::Down, params.g);
  const RateModel relax = build_generator(params, Sector::Up, 0.0);
  const double p_up = rho0.r_uu();

  std::vector<MeasurementRecord> records(n_runs);
  const auto simulate = [&](std::uint64_t run) {
    const std::uint64_t sub = run_seed(seed, run);
    Rng rng(sub);
    const Sector s = uniform01(rng) < p_up ? Sector::Up : Sector::Down;
    const std::array<ProtocolStage, 2> stages{
        ProtocolStage{s == Sector::Up ? couple_up : couple_down,
                      schedule.t_couple},
        ProtocolStage{relax, schedule.t_relax}};
    const int start = draw_index(ready, s, rng);
    const int end = simulate_jumps(stages, start, s, rng);
    const double m = lattice_m(params.N, end);
    records[run] = MeasurementRecord{run,
                                     s,
                                     classify_point(m, threshold),
                                     m,
                                     dissipated_free_energy(params, m),
                                     schedule.t_couple,
                                     sub};
  };

  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1 || n_runs < 2) {
    for (std::uint64_t run = 0; run < n_runs; ++run) simulate(run);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned tid = 0; tid < threads; ++tid) {
      pool.emplace_back([&, tid] {
        for (std::uint64_t run = tid; run < n_runs; run += threads) {
          simulate(run);
        }
      });
    }
  }

  SamplingResult result;
  for (const auto& rec : records) {
    switch (rec.outcome.status) {
      case Status::Registered:
        if (rec.outcome.pointer == Sector::Up) {
          ++result.counts.registered_up;
        } else {
          ++result.counts.registered_down;
        }
        break;
      case Status::Relaxed:
        ++result.counts.relaxed;
        break;
      case Status::Undecided:
        ++result.counts.undecided;
        break;
    }
  }
  result.records = std::move(records);
  return result;
}

csv::Table records_table(std::span<const MeasurementRecord> records) {
  csv::Table table(
      {"run", "sector", "pointer", "status", "dissipated_F", "seed"});
  for (const auto& rec : records) {
    table.add_row({static_cast<std::int64_t>(rec.run), to_string(rec.sector),
                   rec.outcome.pointer ? to_string(*rec.outcome.pointer)
                                       : std::string("none"),
                   to_string(rec.outcome.status), rec.dissipated_free_energy,
                   std::to_string(rec.seed)});
  }
  return table;
}

}  // namespace cwmeas
