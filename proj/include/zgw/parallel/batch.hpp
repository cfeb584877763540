#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zgw/install_code/credential.hpp"
#include "zgw/scenario/scenario.hpp"

// Data-parallel kernels (OpenMP) with the serial loops they must agree with.
namespace zgw::parallel {

// One entry per payload: the derived link key, or nullopt when the payload
// does not parse.
using KeyBatch = std::vector<std::optional<install_code::LinkKey>>;

KeyBatch derive_link_keys(std::span<const std::string> payloads);
KeyBatch derive_link_keys_serial(std::span<const std::string> payloads);

struct SweepResult {
  std::uint64_t seed = 0;
  std::size_t devices_joined = 0;
  std::size_t messages = 0;
  double occupancy_ratio = 0;
  double lqi_before_move = 0;
  double lqi_after_move = 0;
  std::string checksum;

  bool operator==(const SweepResult&) const = default;
};

// Runs one independent case study per seed. Results come back in seed order.
std::vector<SweepResult> sweep_seeds(const scenario::ScenarioConfig& base, std::span<const std::uint64_t> seeds,
                                     double hours);
std::vector<SweepResult> sweep_seeds_serial(const scenario::ScenarioConfig& base,
                                            std::span<const std::uint64_t> seeds, double hours);

int max_threads() noexcept;

}  // namespace zgw::parallel
