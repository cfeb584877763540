#include "zgw/parallel/batch.hpp"

#include <exception>

#include <omp.h>

namespace zgw::parallel {

namespace {

std::optional<install_code::LinkKey> derive_one(const std::string& payload) {
  try {
    return install_code::derive_link_key(install_code::parse_qr_payload(payload));
  } catch (const install_code::CredentialError&) {
    return std::nullopt;
  }
}

SweepResult run_one(const scenario::ScenarioConfig& base, std::uint64_t seed, double hours) {
  auto cfg = base;
  cfg.seed = seed;
  scenario::CaseStudy study(std::move(cfg));
  study.run_until(hours * 3600.0);
  const auto r = study.report();
  SweepResult out;
  out.seed = seed;
  out.devices_joined = r["devices_joined"].get<std::size_t>();
  out.messages = r["totals"]["messages"].get<std::size_t>();
  out.occupancy_ratio = r["occupancy"]["ratio"].get<double>();
  if (!r["relocations"].empty()) {
    out.lqi_before_move = r["relocations"][0]["lqi_mean_before"].get<double>();
    out.lqi_after_move = r["relocations"][0]["lqi_mean_after"].get<double>();
  }
  out.checksum = r["checksum"].get<std::string>();
  return out;
}

}  // namespace

KeyBatch derive_link_keys(std::span<const std::string> payloads) {
  KeyBatch out(payloads.size());
  const auto n = static_cast<std::ptrdiff_t>(payloads.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = derive_one(payloads[static_cast<std::size_t>(i)]);
  return out;
}

KeyBatch derive_link_keys_serial(std::span<const std::string> payloads) {
  KeyBatch out;
  out.reserve(payloads.size());
  for (const auto& p : payloads) out.push_back(derive_one(p));
  return out;
}

std::vector<SweepResult> sweep_seeds(const scenario::ScenarioConfig& base, std::span<const std::uint64_t> seeds,
                                     double hours) {
  std::vector<SweepResult> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  const auto n = static_cast<std::ptrdiff_t>(seeds.size());
  // Each case study owns its simulator, broker and store, so runs share nothing.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = run_one(base, seeds[k], hours);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<SweepResult> sweep_seeds_serial(const scenario::ScenarioConfig& base,
                                            std::span<const std::uint64_t> seeds, double hours) {
  std::vector<SweepResult> out;
  out.reserve(seeds.size());
  for (auto seed : seeds) out.push_back(run_one(base, seed, hours));
  return out;
}

int max_threads() noexcept { return omp_get_max_threads(); }

}  // namespace zgw::parallel
