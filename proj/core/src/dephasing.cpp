#include "cwmeas/dephasing.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cwmeas {

void DephasingParams::validate() const {
  std::string bad;
  if (N < 1) bad += " N";
  if (!(g > 0.0) || !std::isfinite(g)) bad += " g";
  if (n < 1) bad += " n";
  if (theta && !(*theta > 0.0)) bad += " theta";
  if (!bad.empty()) {
    throw ValidationError("invalid dephasing parameters:" + bad);
  }
}

double default_bath_time(double gamma, double T) {
  if (!(gamma > 0.0) || !(T > 0.0)) {
    throw ValidationError("default_bath_time: gamma and T must be positive");
  }
  return 1.0 / (gamma * T);
}

DephasingModel::DephasingModel(DephasingParams params)
    : params_(std::move(params)) {
  params_.validate();
}

void DephasingModel::require_single_spin(const char* op) const {
  if (params_.n != 1) {
    throw ValidationError(std::string(op) + " requires n = 1");
  }
}

double DephasingModel::require_theta(const char* op) const {
  if (!params_.theta) {
    throw ConfigurationError(std::string(op) +
                             ": no bath damping time (theta) configured");
  }
  return *params_.theta;
}

double DephasingModel::truncation_factor(double t) const {
  require_single_spin("truncation_factor");
  return std::pow(std::cos(2.0 * params_.g * t), params_.N);
}

double DephasingModel::gaussian_time() const {
  return 1.0 / (params_.g * std::sqrt(2.0 * params_.N));
}

double DephasingModel::gaussian_envelope(double t) const {
  const double x = t / gaussian_time();
  return std::exp(-x * x);
}

std::vector<double> DephasingModel::recurrence_times(int k_max) const {
  require_single_spin("recurrence_times");
  if (k_max < 1) throw ValidationError("recurrence_times: k_max must be >= 1");
  std::vector<double> out;
  out.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) {
    out.push_back(k * std::numbers::pi / params_.g);
  }
  return out;
}

double DephasingModel::first_recurrence() const {
  return std::numbers::pi / params_.g;
}

double DephasingModel::damped_truncation_factor(double t) const {
  require_single_spin("damped_truncation_factor");
  const double theta = require_theta("damped_truncation_factor");
  return std::pow(std::cos(2.0 * params_.g * t) * std::exp(-t / theta),
                  params_.N);
}

double DephasingModel::bath_onset_time() const {
  return require_theta("bath_onset_time") / params_.N;
}

bool DephasingModel::recurrences_suppressed() const {
  return bath_onset_time() < first_recurrence();
}

double DephasingModel::correlation_cascade(int k, double t) const {
  require_single_spin("correlation_cascade");
  if (k < 1 || k > params_.N) {
    throw DomainError("correlation_cascade: k must lie in [1, N]");
  }
  const double phase = 2.0 * params_.g * t;
  return std::pow(std::abs(std::sin(phase)), k) *
         std::pow(std::abs(std::cos(phase)), params_.N - k);
}

double DephasingModel::correlation_peak_time(int k) const {
  if (k < 1 || k > params_.N) {
    throw DomainError("correlation_peak_time: k must lie in [1, N]");
  }
  if (k == params_.N) return std::numbers::pi / (4.0 * params_.g);
  const double ratio = static_cast<double>(k) / (params_.N - k);
  return std::atan(std::sqrt(ratio)) / (2.0 * params_.g);
}

double DephasingModel::collective_truncation_factor(double s, double s_prime,
                                                    double t) const {
  const int n = params_.n;
  const auto on_lattice = [n](double v) {
    // v = -1 + 2j/n for integer j in [0, n]
    const double j = 0.5 * (v + 1.0) * n;
    const double rounded = std::round(j);
    return rounded >= 0.0 && rounded <= n && std::abs(j - rounded) < 1e-9;
  };
  if (!on_lattice(s) || !on_lattice(s_prime)) {
    throw DomainError("collective_truncation_factor: eigenvalue not in "
                      "{-1, -1 + 2/n, ..., 1}");
  }
  if (std::abs(s - s_prime) < 1e-12) {
    throw DomainError("collective_truncation_factor: s and s' must differ");
  }
  return std::pow(std::cos(params_.g * (s - s_prime) * t), params_.N);
}

double DephasingModel::characteristic_time() const {
  return params_.n / (params_.g * std::sqrt(2.0 * params_.N));
}

csv::Table DephasingModel::trace(const std::vector<double>& times) const {
  std::vector<std::string> cols{"t", "exact", "gaussian"};
  const bool damped = params_.theta.has_value();
  if (damped) cols.emplace_back("damped");
  csv::Table table(std::move(cols));
  for (double t : times) {
    std::vector<csv::Cell> row{t, truncation_factor(t), gaussian_envelope(t)};
    if (damped) row.emplace_back(damped_truncation_factor(t));
    table.add_row(std::move(row));
  }
  return table;
}

std::vector<double> uniform_times(double t_max, int points) {
  if (points < 2 || !(t_max > 0.0)) {
    throw ValidationError("uniform_times: need t_max > 0 and points >= 2");
  }
  std::vector<double> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    out.push_back(t_max * static_cast<double>(i) / (points - 1));
  }
  return out;
}

}  // namespace cwmeas
