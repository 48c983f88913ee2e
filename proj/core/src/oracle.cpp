#include "cwmeas/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

namespace cwmeas::oracle {
namespace {

// Neumaier-compensated complex accumulator; 2^20 terms would otherwise
// lose a few 1e-13 to rounding.
class CompensatedSum {
 public:
  void add(Complex v) {
    add_real(re_, re_c_, v.real());
    add_real(im_, im_c_, v.imag());
  }
  [[nodiscard]] Complex value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_real(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

void require_size(bool ok, const std::string& what) {
  if (!ok) throw SizeError(what);
}

double quartic_energy(int N, int M, double J) {
  const double m = static_cast<double>(M);
  return -J * m * m * m * m / (4.0 * N * static_cast<double>(N) * N);
}

Complex phase(double energy, double t) { return std::polar(1.0, -energy * t); }

}  // namespace

double enumerate_truncation_factor(int N, double g, double t,
                                   bool include_quartic, double J) {
  require_size(N >= 1 && N <= kMaxEnumerationSpins,
               "enumerate_truncation_factor: N must lie in [1, 20], got " +
                   std::to_string(N));
  const std::uint64_t configs = std::uint64_t{1} << N;
  const double weight = 1.0 / static_cast<double>(configs);
  CompensatedSum sum;
  for (std::uint64_t c = 0; c < configs; ++c) {
    const int M = 2 * std::popcount(c) - N;
    const double self = include_quartic ? quartic_energy(N, M, J) : 0.0;
    const double e_up = -g * M + self;
    const double e_down = g * M + self;
    // <up| rho |down> picks up exp(-i E_up t) exp(+i E_down t).
    sum.add(weight * phase(e_up, t) * std::conj(phase(e_down, t)));
  }
  return sum.value().real();
}

double correlation_oracle(int k, int N, double g, double t) {
  require_size(N >= 1 && N <= kMaxCorrelationSpins,
               "correlation_oracle: N must lie in [1, 16]");
  require_size(k >= 0 && k <= kMaxCorrelationOrder && k <= N,
               "correlation_oracle: k must lie in [0, min(3, N)]");
  const std::uint64_t configs = std::uint64_t{1} << N;
  const double weight = 1.0 / static_cast<double>(configs);
  const std::uint64_t tagged = (std::uint64_t{1} << k) - 1;
  CompensatedSum sum;
  for (std::uint64_t c = 0; c < configs; ++c) {
    const int M = 2 * std::popcount(c) - N;
    // product of sigma_z over the first k spins: -1 per down spin
    const int downs = k - std::popcount(c & tagged);
    const double z_product = (downs % 2 == 0) ? 1.0 : -1.0;
    sum.add(weight * z_product * phase(-g * M, t) * std::conj(phase(g * M, t)));
  }
  return std::abs(sum.value());
}

SymmetricSectorState::SymmetricSectorState(int N, std::vector<Complex> amplitudes)
    : N_(N), a_(std::move(amplitudes)) {
  if (N_ < 1 || a_.size() != 2 * (static_cast<std::size_t>(N_) + 1)) {
    throw ValidationError("symmetric sector state: expected 2(N+1) amplitudes");
  }
}

double SymmetricSectorState::norm() const {
  double acc = 0.0;
  for (const auto& a : a_) acc += std::norm(a);
  return std::sqrt(acc);
}

double fastest_precession(const NonidealParams& params) {
  return std::hypot(params.g * params.N, params.b_x);
}

csv::Table NonidealTrajectory::table() const {
  csv::Table table({"t", "r_uu", "re_r_ud", "im_r_ud", "delta"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& r = states[i];
    table.add_row({times[i], r.r_uu(), r.r_ud().real(), r.r_ud().imag(),
                   delta[i]});
  }
  return table;
}

namespace {

struct PureComponent {
  double probability;
  Complex up;
  Complex down;
};

// Spectral decomposition of a 2x2 density matrix: eigenvalues (1 +- |b|)/2
// with eigenvectors polarized along +-b.
std::vector<PureComponent> spectral_components(const SpinDensityMatrix& rho) {
  const Vec3& b = rho.bloch();
  const double r = b.norm();
  const auto spinor = [](const Vec3& n) -> std::pair<Complex, Complex> {
    if (n.z <= -1.0) return {0.0, 1.0};
    const double a = std::sqrt(0.5 * (1.0 + n.z));
    return {a, Complex(n.x, n.y) / (2.0 * a)};
  };
  Vec3 axis{0.0, 0.0, 1.0};
  if (r > 1e-15) axis = {b.x / r, b.y / r, b.z / r};
  const double r_eff = std::min(r, 1.0);
  std::vector<PureComponent> out;
  for (const auto& [p, n] : {std::pair{0.5 * (1.0 + r_eff), axis},
                             std::pair{0.5 * (1.0 - r_eff), -axis}}) {
    if (p <= 0.0) continue;
    const auto [u, d] = spinor(n);
    out.push_back({p, u, d});
  }
  return out;
}

}  // namespace

NonidealTrajectory evolve_nonideal(const NonidealParams& params,
                                   const SpinDensityMatrix& rho0, double t_end,
                                   double dt, int sample_every) {
  const int N = params.N;
  require_size(N >= 1 && N <= kMaxNonidealSpins,
               "evolve_nonideal: N must lie in [1, 12]");
  if (!(dt > 0.0) || !(t_end >= 0.0) || sample_every < 1) {
    throw ValidationError("evolve_nonideal: need dt > 0, t_end >= 0, "
                          "sample_every >= 1");
  }
  const int K = N + 1;

  // Diagonal energies and the up-down splitting per magnet sector.
  std::vector<double> e_up(K), e_down(K), omega(K);
  std::vector<double> magnet_weight(K);
  for (int k = 0; k < K; ++k) {
    const int M = 2 * k - N;
    const double self =
        params.include_quartic ? quartic_energy(N, M, params.J) : 0.0;
    e_up[k] = -params.g * M + self;
    e_down[k] = params.g * M + self;
    omega[k] = e_up[k] - e_down[k];
    magnet_weight[k] =
        std::exp(std::lgamma(N + 1.0) - std::lgamma(k + 1.0) -
                 std::lgamma(N - k + 1.0) - N * std::log(2.0));
  }

  const auto components = spectral_components(rho0);
  std::vector<SymmetricSectorState> states;
  std::vector<double> probabilities;
  for (const auto& comp : components) {
    std::vector<Complex> amps(2 * K);
    for (int k = 0; k < K; ++k) {
      const double s = std::sqrt(magnet_weight[k]);
      amps[k] = s * comp.up;
      amps[K + k] = s * comp.down;
    }
    states.emplace_back(N, std::move(amps));
    probabilities.push_back(comp.probability);
  }

  // dc/dt = -i H_I(t) c, H_I = -b_x (e^{i w t} |u><d| + h.c.) per sector.
  const Complex minus_i(0.0, -1.0);
  const auto derivative = [&](double t, const std::vector<Complex>& c,
                              std::vector<Complex>& out) {
    for (int k = 0; k < K; ++k) {
      const Complex rot = std::polar(1.0, omega[k] * t);
      out[k] = minus_i * (-params.b_x) * rot * c[K + k];
      out[K + k] = minus_i * (-params.b_x) * std::conj(rot) * c[k];
    }
  };

  NonidealTrajectory traj;
  double r_uu0 = 0.0;
  const auto sample = [&](double t,
                          const std::vector<std::vector<Complex>>& coeffs) {
    double r_uu = 0.0, r_dd = 0.0;
    Complex r_ud{};
    for (std::size_t a = 0; a < coeffs.size(); ++a) {
      const auto& c = coeffs[a];
      const double norm = SymmetricSectorState(N, c).norm();
      traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(norm - 1.0));
      double uu = 0.0, dd = 0.0;
      Complex ud{};
      for (int k = 0; k < K; ++k) {
        uu += std::norm(c[k]);
        dd += std::norm(c[K + k]);
        const Complex psi_up = std::polar(1.0, -e_up[k] * t) * c[k];
        const Complex psi_down = std::polar(1.0, -e_down[k] * t) * c[K + k];
        ud += psi_up * std::conj(psi_down);
      }
      r_uu += probabilities[a] * uu;
      r_dd += probabilities[a] * dd;
      r_ud += probabilities[a] * ud;
    }
    const double trace = r_uu + r_dd;
    const auto rho = SpinDensityMatrix::from_elements(r_uu / trace, r_ud / trace);
    if (traj.times.empty()) r_uu0 = rho.r_uu();
    traj.times.push_back(t);
    traj.states.push_back(rho);
    traj.delta.push_back(std::abs(rho.r_uu() - r_uu0));
    if (traj.max_norm_drift > 1e-8) {
      throw GuardError("evolve_nonideal: norm drift " +
                       std::to_string(traj.max_norm_drift) +
                       " exceeds 1e-8; reduce dt");
    }
  };

  std::vector<std::vector<Complex>> coeffs;
  for (const auto& s : states) coeffs.push_back(s.amplitudes());
  sample(0.0, coeffs);
  if (t_end == 0.0) return traj;

  const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);
  const std::size_t size = 2 * static_cast<std::size_t>(K);
  std::vector<Complex> k1(size), k2(size), k3(size), k4(size), tmp(size);
  for (long long step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * h;
    for (auto& c : coeffs) {
      derivative(t, c, k1);
      for (std::size_t i = 0; i < size; ++i) tmp[i] = c[i] + 0.5 * h * k1[i];
      derivative(t + 0.5 * h, tmp, k2);
      for (std::size_t i = 0; i < size; ++i) tmp[i] = c[i] + 0.5 * h * k2[i];
      derivative(t + 0.5 * h, tmp, k3);
      for (std::size_t i = 0; i < size; ++i) tmp[i] = c[i] + h * k3[i];
      derivative(t + h, tmp, k4);
      for (std::size_t i = 0; i < size; ++i) {
        c[i] += h / 6.0 * ((k1[i] + k4[i]) + 2.0 * (k2[i] + k3[i]));
      }
    }
    const long long done = step + 1;
    if (done % sample_every == 0 || done == steps) {
      sample(static_cast<double>(done) * h, coeffs);
    }
  }
  return traj;
}

}  // namespace cwmeas::oracle
