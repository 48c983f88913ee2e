#ifndef CWMEAS_KINETIC_HPP
#define CWMEAS_KINETIC_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "cwmeas/registration.hpp"

namespace cwmeas {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x);

/// One piece of a piecewise-constant protocol.
struct ProtocolStage {
  std::reference_wrapper<const RateModel> rates;
  double duration;
};

/// Lattice index drawn from dist by inverse CDF, mirrored (i -> N - i) when
/// frame is Down so that the two sectors consume random numbers alike.
int draw_index(const MagnetizationDistribution& dist, Sector frame, Rng& rng);

/**
 * Exact-jump (Gillespie) trajectory through consecutive stages starting at
 * lattice index `start`. At each jump the move toward `frame` is tested
 * first, which makes a Down-frame run the exact mirror image of an Up-frame
 * run on mirrored rates. `sample_times` (ascending, absolute) receive the
 * occupied index in `samples`. Returns the final index.
 */
int simulate_jumps(std::span<const ProtocolStage> stages, int start,
                   Sector frame, Rng& rng,
                   std::span<const double> sample_times = {},
                   std::vector<int>* samples = nullptr);

}  // namespace cwmeas

#endif  // CWMEAS_KINETIC_HPP
