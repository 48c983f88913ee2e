#ifndef CWMEAS_QM_CORE_HPP
#define CWMEAS_QM_CORE_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cwmeas/errors.hpp"

namespace cwmeas {

using Complex = std::complex<double>;

/// Tolerance for algebraic identities on 2x2 matrices and weight vectors.
inline constexpr double kAlgebraTolerance = 1e-12;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  [[nodiscard]] double norm() const;
  friend Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

/**
 * Density matrix of the tested spin-1/2,
 *
 *   r = | r_uu  r_ud |
 *       | r_du  r_dd |,   r_dd = 1 - r_uu,  r_du = conj(r_ud).
 *
 * Stored as the Bloch vector b with r = (1 + b.sigma) / 2, so the unit trace
 * and hermiticity hold by construction; only positivity (|b| <= 1) is checked.
 * Values are immutable.
 */
class SpinDensityMatrix {
 public:
  /// Maximally mixed state (identity / 2).
  SpinDensityMatrix() = default;

  /// Throws ValidationError if r_uu is outside [0, 1] or positivity fails.
  static SpinDensityMatrix from_elements(double r_uu, Complex r_ud);
  /// Throws ValidationError if |bloch| > 1 beyond tolerance.
  static SpinDensityMatrix from_bloch(const Vec3& bloch);

  [[nodiscard]] double r_uu() const { return 0.5 * (1.0 + bloch_.z); }
  [[nodiscard]] double r_dd() const { return 0.5 * (1.0 - bloch_.z); }
  // 0.0 - y keeps +0 rather than -0 for real states.
  [[nodiscard]] Complex r_ud() const {
    return {0.5 * bloch_.x, 0.0 - 0.5 * bloch_.y};
  }
  [[nodiscard]] Complex r_du() const { return std::conj(r_ud()); }
  [[nodiscard]] const Vec3& bloch() const { return bloch_; }

  /// r_uu * r_dd - |r_ud|^2, i.e. (1 - |b|^2) / 4.
  [[nodiscard]] double determinant() const;
  [[nodiscard]] double purity() const;

  friend bool operator==(const SpinDensityMatrix&,
                         const SpinDensityMatrix&) = default;

 private:
  explicit SpinDensityMatrix(const Vec3& b) : bloch_(b) {}
  Vec3 bloch_{};
};

/// Largest entrywise difference between two density matrices.
double max_entry_difference(const SpinDensityMatrix& a,
                            const SpinDensityMatrix& b);

/// Rank-1 projector onto the spin state polarized along `direction`.
/// The direction must be a unit vector within 1e-9; it is renormalised.
SpinDensityMatrix pure_state(const Vec3& direction);

SpinDensityMatrix maximally_mixed();

/// lambda * rho1 + (1 - lambda) * rho2.
SpinDensityMatrix mix(const SpinDensityMatrix& rho1,
                      const SpinDensityMatrix& rho2, double lambda);

/// Probability weights q_i over an arbitrary number of outcomes.
class EnsembleWeights {
 public:
  /// Throws ValidationError on negative entries or a sum away from 1.
  explicit EnsembleWeights(std::vector<double> q);

  [[nodiscard]] std::span<const double> values() const { return q_; }
  [[nodiscard]] std::size_t size() const { return q_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return q_[i]; }

 private:
  std::vector<double> q_;
};

/**
 * Frequency combination rule for joining two sub-ensembles with n1 and n2
 * members: q_i = lambda q1_i + (1 - lambda) q2_i, lambda = n1 / (n1 + n2).
 *
 * Generic over the number type so the rule can be checked in exact
 * arithmetic; `Real` needs +, -, *, / and construction from an integer.
 */
template <class Real>
std::vector<Real> combine_frequencies(std::span<const Real> q1,
                                      std::span<const Real> q2,
                                      std::uint64_t n1, std::uint64_t n2) {
  if (q1.size() != q2.size()) {
    throw ValidationError("combine_frequencies: outcome dimensions differ (" +
                          std::to_string(q1.size()) + " vs " +
                          std::to_string(q2.size()) + ")");
  }
  if (n1 + n2 == 0) {
    throw ValidationError("combine_frequencies: n1 + n2 must be positive");
  }
  const Real lambda = Real(static_cast<long long>(n1)) /
                      Real(static_cast<long long>(n1 + n2));
  const Real one = Real(1LL);
  std::vector<Real> out;
  out.reserve(q1.size());
  for (std::size_t i = 0; i < q1.size(); ++i) {
    out.push_back(lambda * q1[i] + (one - lambda) * q2[i]);
  }
  return out;
}

EnsembleWeights merge_frequencies(const EnsembleWeights& q1,
                                  const EnsembleWeights& q2, std::uint64_t n1,
                                  std::uint64_t n2);

/// Four independent entries, for diagnosing matrices that may be invalid.
struct RawSpinMatrix {
  double r_uu = 0.5;
  double r_dd = 0.5;
  Complex r_ud{};
  Complex r_du{};

  static RawSpinMatrix hermitian(double r_uu, double r_dd, Complex r_ud) {
    return {r_uu, r_dd, r_ud, std::conj(r_ud)};
  }
};

enum class InvariantKind { Diagonal, Trace, Hermiticity, Positivity };

std::string to_string(InvariantKind kind);

struct Violation {
  InvariantKind kind;
  double magnitude;
};

/// Every violated invariant with its size; empty iff the matrix is a valid
/// density matrix within kAlgebraTolerance.
std::vector<Violation> validate(const RawSpinMatrix& rho);
std::vector<Violation> validate(const SpinDensityMatrix& rho);

}  // namespace cwmeas

#endif  // CWMEAS_QM_CORE_HPP
