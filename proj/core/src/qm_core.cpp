#include "cwmeas/qm_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cwmeas {

double Vec3::norm() const { return std::hypot(x, y, z); }

SpinDensityMatrix SpinDensityMatrix::from_bloch(const Vec3& bloch) {
  if (!std::isfinite(bloch.x) || !std::isfinite(bloch.y) ||
      !std::isfinite(bloch.z)) {
    throw ValidationError("density matrix: non-finite Bloch component");
  }
  const SpinDensityMatrix rho(bloch);
  if (rho.determinant() < -kAlgebraTolerance) {
    std::ostringstream os;
    os << "density matrix: positivity violated, r_uu*r_dd - |r_ud|^2 = "
       << rho.determinant();
    throw ValidationError(os.str());
  }
  return rho;
}

SpinDensityMatrix SpinDensityMatrix::from_elements(double r_uu, Complex r_ud) {
  if (!(r_uu >= -kAlgebraTolerance && r_uu <= 1.0 + kAlgebraTolerance)) {
    throw ValidationError("density matrix: r_uu must lie in [0, 1]");
  }
  return from_bloch({2.0 * r_ud.real(), -2.0 * r_ud.imag(), 2.0 * r_uu - 1.0});
}

double SpinDensityMatrix::determinant() const {
  return r_uu() * r_dd() - std::norm(r_ud());
}

double SpinDensityMatrix::purity() const {
  const double b2 =
      bloch_.x * bloch_.x + bloch_.y * bloch_.y + bloch_.z * bloch_.z;
  return 0.5 * (1.0 + b2);
}

double max_entry_difference(const SpinDensityMatrix& a,
                            const SpinDensityMatrix& b) {
  return std::max({std::abs(a.r_uu() - b.r_uu()),
                   std::abs(a.r_dd() - b.r_dd()),
                   std::abs(a.r_ud() - b.r_ud())});
}

SpinDensityMatrix pure_state(const Vec3& direction) {
  const double len = direction.norm();
  if (!std::isfinite(len) || std::abs(len - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "pure_state: direction must be a unit vector, |n| = " << len;
    throw ValidationError(os.str());
  }
  return SpinDensityMatrix::from_bloch(
      {direction.x / len, direction.y / len, direction.z / len});
}

SpinDensityMatrix maximally_mixed() { return SpinDensityMatrix{}; }

SpinDensityMatrix mix(const SpinDensityMatrix& rho1,
                      const SpinDensityMatrix& rho2, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("mix: lambda must lie in [0, 1]");
  }
  const double mu = 1.0 - lambda;
  const Vec3& a = rho1.bloch();
  const Vec3& b = rho2.bloch();
  // Convex combinations of valid Bloch vectors stay inside the ball.
  return SpinDensityMatrix::from_bloch({lambda * a.x + mu * b.x,
                                        lambda * a.y + mu * b.y,
                                        lambda * a.z + mu * b.z});
}

EnsembleWeights::EnsembleWeights(std::vector<double> q) : q_(std::move(q)) {
  if (q_.empty()) {
    throw ValidationError("ensemble weights: at least one outcome required");
  }
  for (std::size_t i = 0; i < q_.size(); ++i) {
    if (!(q_[i] >= 0.0) || !std::isfinite(q_[i])) {
      throw ValidationError("ensemble weights: q[" + std::to_string(i) +
                            "] is negative or not finite");
    }
  }
  const double total = std::accumulate(q_.begin(), q_.end(), 0.0);
  if (std::abs(total - 1.0) > kAlgebraTolerance) {
    std::ostringstream os;
    os << "ensemble weights: sum is " << total << ", expected 1";
    throw ValidationError(os.str());
  }
}

EnsembleWeights merge_frequencies(const EnsembleWeights& q1,
                                  const EnsembleWeights& q2, std::uint64_t n1,
                                  std::uint64_t n2) {
  return EnsembleWeights(
      combine_frequencies<double>(q1.values(), q2.values(), n1, n2));
}

std::string to_string(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::Diagonal:
      return "diagonal";
    case InvariantKind::Trace:
      return "trace";
    case InvariantKind::Hermiticity:
      return "hermiticity";
    case InvariantKind::Positivity:
      return "positivity";
  }
  return "unknown";
}

std::vector<Violation> validate(const RawSpinMatrix& rho) {
  std::vector<Violation> out;
  const double neg_diag = std::max(-std::min(rho.r_uu, rho.r_dd), 0.0);
  if (neg_diag > kAlgebraTolerance) {
    out.push_back({InvariantKind::Diagonal, neg_diag});
  }
  const double trace_err = std::abs(rho.r_uu + rho.r_dd - 1.0);
  if (trace_err > kAlgebraTolerance) {
    out.push_back({InvariantKind::Trace, trace_err});
  }
  const double herm_err = std::abs(rho.r_du - std::conj(rho.r_ud));
  if (herm_err > kAlgebraTolerance) {
    out.push_back({InvariantKind::Hermiticity, herm_err});
  }
  // For a non-hermitian input the hermitian part decides positivity.
  const Complex off = 0.5 * (rho.r_ud + std::conj(rho.r_du));
  const double det = rho.r_uu * rho.r_dd - std::norm(off);
  if (det < -kAlgebraTolerance) {
    out.push_back({InvariantKind::Positivity, -det});
  }
  return out;
}

std::vector<Violation> validate(const SpinDensityMatrix& rho) {
  return validate(RawSpinMatrix{rho.r_uu(), rho.r_dd(), rho.r_ud(), rho.r_du()});
}

}  // namespace cwmeas
