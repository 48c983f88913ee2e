#ifndef CWMEAS_DEPHASING_HPP
#define CWMEAS_DEPHASING_HPP

#include <optional>
#include <vector>

#include "cwmeas/csv.hpp"
#include "cwmeas/errors.hpp"

namespace cwmeas {

struct DephasingParams {
  int N = 1000;                  ///< magnet spins
  double g = 0.05;               ///< coupling
  int n = 1;                     ///< tested collective size
  std::optional<double> theta;   ///< bath damping time per magnet spin

  /// Throws ValidationError on N < 1, g <= 0, n < 1 or theta <= 0.
  void validate() const;
};

/// Phenomenological per-spin bath time theta = 1 / (gamma T).
double default_bath_time(double gamma, double T);

/**
 * Off-diagonal (truncation) dynamics of the tested spin coupled through
 * -g s_z M to an unpolarized N-spin magnet. Each magnet spin contributes a
 * factor cos(2 g t) to r_ud(t) / r_ud(0); the bath multiplies each factor
 * by exp(-t / theta).
 */
class DephasingModel {
 public:
  explicit DephasingModel(DephasingParams params);

  [[nodiscard]] const DephasingParams& params() const { return params_; }

  /// cos^N(2 g t). Requires n = 1.
  [[nodiscard]] double truncation_factor(double t) const;

  /// tau = 1 / (g sqrt(2N)).
  [[nodiscard]] double gaussian_time() const;
  /// exp(-t^2 / tau^2).
  [[nodiscard]] double gaussian_envelope(double t) const;

  /// t_k = k pi / g for k = 1..k_max.
  [[nodiscard]] std::vector<double> recurrence_times(int k_max) const;
  [[nodiscard]] double first_recurrence() const;

  /// [cos(2 g t) exp(-t / theta)]^N. Throws ConfigurationError without theta.
  [[nodiscard]] double damped_truncation_factor(double t) const;
  /// t_B = theta / N.
  [[nodiscard]] double bath_onset_time() const;
  /// t_B < t_1: the bath acts before the first recurrence.
  [[nodiscard]] bool recurrences_suppressed() const;

  /// |sin(2gt)|^k |cos(2gt)|^(N-k): envelope of the k-spin S-M correlation
  /// relative to |r_ud(0)|. 1 <= k <= N.
  [[nodiscard]] double correlation_cascade(int k, double t) const;
  /// First maximum of correlation_cascade(k, .): tan^2(2gt*) = k/(N-k).
  [[nodiscard]] double correlation_peak_time(int k) const;

  /// cos^N(g (s - s') t) for eigenvalues s, s' of (1/n) sum s_z^(i).
  [[nodiscard]] double collective_truncation_factor(double s, double s_prime,
                                                    double t) const;
  /// n / (g sqrt(2N)); equals gaussian_time() at n = 1.
  [[nodiscard]] double characteristic_time() const;

  /// Columns t, exact, gaussian[, damped]; damped only when theta is set.
  [[nodiscard]] csv::Table trace(const std::vector<double>& times) const;

 private:
  void require_single_spin(const char* op) const;
  [[nodiscard]] double require_theta(const char* op) const;

  DephasingParams params_;
};

/// 0, dt, ..., up to t_max inclusive (points >= 2).
std::vector<double> uniform_times(double t_max, int points);

}  // namespace cwmeas

#endif  // CWMEAS_DEPHASING_HPP
