#pragma once

#include <cstdint>

namespace zgw::sim {

// Link-quality model standing in for the 802.15.4 PHY. All constants live
// here so scenarios can override them in one place.
struct RadioModel {
  double range_m = 100.0;
  double max_lqi = 255.0;
  double wall_penalty = 40.0;
  double noise_amplitude = 5.0;
  // Reported only; bandwidth is not enforced.
  std::uint32_t data_rate_bps = 250'000;
};

// clamp(round(max * (1 - d / range) - penalty * walls + epsilon), 0, max);
// distances at or beyond the range give 0 regardless of epsilon.
int compute_lqi(const RadioModel& model, double distance_m, int walls, double epsilon) noexcept;

}  // namespace zgw::sim
