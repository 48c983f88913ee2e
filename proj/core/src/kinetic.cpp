#include "cwmeas/kinetic.hpp"

#include <cmath>
#include <limits>

namespace cwmeas {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int draw_index(const MagnetizationDistribution& dist, Sector frame, Rng& rng) {
  const double target = uniform01(rng) * dist.total_mass();
  const int N = dist.N();
  double acc = 0.0;
  int chosen = N;
  for (int i = 0; i <= N; ++i) {
    // Walk the distribution as seen from the frame so both sectors map the
    // same uniform draw to mirrored indices.
    const int j = frame == Sector::Up ? i : N - i;
    acc += dist[j];
    if (target < acc) {
      chosen = i;
      break;
    }
  }
  return frame == Sector::Up ? chosen : N - chosen;
}

int simulate_jumps(std::span<const ProtocolStage> stages, int start,
                   Sector frame, Rng& rng, std::span<const double> sample_times,
                   std::vector<int>* samples) {
  if (samples != nullptr) samples->assign(sample_times.size(), start);
  std::size_t next_sample = 0;
  const auto record_until = [&](double t_limit, int index) {
    while (next_sample < sample_times.size() &&
           sample_times[next_sample] < t_limit) {
      if (samples != nullptr) (*samples)[next_sample] = index;
      ++next_sample;
    }
  };

  double t = 0.0;
  int index = start;
  for (const auto& stage : stages) {
    const RateModel& rates = stage.rates.get();
    const double t_end = t + stage.duration;
    while (true) {
      const double w_up = rates.up[index];
      const double w_down = rates.down[index];
      const double total = w_up + w_down;
      const double wait = total > 0.0
                              ? -std::log1p(-uniform01(rng)) / total
                              : std::numeric_limits<double>::infinity();
      if (t + wait >= t_end) {
        record_until(t_end, index);
        t = t_end;
        break;
      }
      t += wait;
      record_until(t, index);
      const double aligned = frame == Sector::Up ? w_up : w_down;
      const bool toward_frame = uniform01(rng) * total < aligned;
      const int step = (toward_frame ? 1 : -1) * sign(frame);
      index += step;
    }
  }
  record_until(std::numeric_limits<double>::infinity(), index);
  return index;
}

}  // namespace cwmeas
