#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "zgw/common/error.hpp"

namespace zgw::telemetry {

enum class TelemetryErrc {
  UnknownSeries,
  NonMonotonic,
  InvalidRange,
  CorruptStore,
  IoError,
};

std::string_view to_string(TelemetryErrc code) noexcept;
using TelemetryError = Error<TelemetryErrc>;

struct MetricSample {
  std::string series;
  double t = 0;
  double value = 0;
  friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

struct HourCount {
  std::int64_t hour = 0;
  std::size_t count = 0;
  friend bool operator==(const HourCount&, const HourCount&) = default;
};

inline std::string lqi_series(std::string_view friendly_name) { return "lqi." + std::string(friendly_name); }
// Numeric and boolean device state, one series per exposed property.
inline std::string state_series(std::string_view friendly_name, std::string_view expose) {
  return "state." + std::string(friendly_name) + "." + std::string(expose);
}
inline constexpr std::string_view kMessagesSeries = "mqtt.messages";

// Append-only sample store. A store opened on a file replays it and appends
// every new record as one NDJSON line. One writer, many readers.
class TelemetryStore {
 public:
  TelemetryStore() = default;
  explicit TelemetryStore(const std::filesystem::path& file);
  ~TelemetryStore();
  TelemetryStore(const TelemetryStore&) = delete;
  TelemetryStore& operator=(const TelemetryStore&) = delete;

  // Throws NonMonotonic when t is earlier than the series' last sample.
  void record(const MetricSample& sample);
  void record(std::string_view series, double t, double value);

  // Samples with t in [t0, t1) in append order.
  std::vector<MetricSample> query(std::string_view series, double t0, double t1) const;
  // One bucket per hour touched by [t0, t1), empty hours included.
  std::vector<HourCount> hourly_count(std::string_view series, double t0, double t1) const;
  std::vector<MetricSample> lqi_trace(std::string_view friendly_name, double t0, double t1) const;

  bool has_series(std::string_view series) const;
  std::vector<std::string> series_names() const;
  std::size_t size(std::string_view series) const;
  std::optional<MetricSample> last(std::string_view series) const;

  // "t,value" rows.
  void export_csv(std::string_view series, std::ostream& out) const;
  void export_csv(std::string_view series, double t0, double t1, std::ostream& out) const;

  void flush();
  const std::optional<std::filesystem::path>& file() const noexcept { return path_; }

 private:
  struct Point {
    double t;
    double value;
  };
  using SeriesMap = std::map<std::string, std::vector<Point>, std::less<>>;

  const std::vector<Point>& series_or_throw(std::string_view series) const;
  static void write_csv(const std::vector<Point>& pts, std::ostream& out);
  void append_locked(std::string_view series, double t, double value);

  mutable std::shared_mutex mu_;
  SeriesMap series_;
  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
};

}  // namespace zgw::telemetry
