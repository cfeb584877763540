#include "zgw/telemetry/store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <ostream>

#include <json.hpp>

namespace zgw::telemetry {

std::string_view to_string(TelemetryErrc code) noexcept {
  switch (code) {
    case TelemetryErrc::UnknownSeries: return "UnknownSeries";
    case TelemetryErrc::NonMonotonic: return "NonMonotonic";
    case TelemetryErrc::InvalidRange: return "InvalidRange";
    case TelemetryErrc::CorruptStore: return "CorruptStore";
    case TelemetryErrc::IoError: return "IoError";
  }
  return "Unknown";
}

TelemetryStore::TelemetryStore(const std::filesystem::path& file) : path_(file) {
  if (std::ifstream in{file}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        append_locked(j.at("series").get<std::string>(), j.at("t").get<double>(), j.at("value").get<double>());
      } catch (const nlohmann::json::exception& e) {
        // A torn final line from an interrupted write is dropped; anything
        // earlier is corruption.
        if (in.peek() == std::char_traits<char>::eof()) break;
        throw TelemetryError(TelemetryErrc::CorruptStore,
                             file.string() + " line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  out_.open(file, std::ios::app);
  if (!out_) throw TelemetryError(TelemetryErrc::IoError, "cannot open " + file.string());
}

TelemetryStore::~TelemetryStore() {
  if (out_.is_open()) out_.flush();
}

void TelemetryStore::append_locked(std::string_view series, double t, double value) {
  auto it = series_.find(series);
  if (it == series_.end()) it = series_.emplace(std::string(series), std::vector<Point>{}).first;
  if (!it->second.empty() && t < it->second.back().t) {
    throw TelemetryError(TelemetryErrc::NonMonotonic, std::string(series) + " at t=" + std::to_string(t));
  }
  it->second.push_back(Point{t, value});
}

void TelemetryStore::record(std::string_view series, double t, double value) {
  std::unique_lock lock(mu_);
  append_locked(series, t, value);
  if (out_.is_open()) {
    nlohmann::json j{{"series", series}, {"t", t}, {"value", value}};
    out_ << j.dump() << '\n';
  }
}

void TelemetryStore::record(const MetricSample& sample) { record(sample.series, sample.t, sample.value); }

const std::vector<TelemetryStore::Point>& TelemetryStore::series_or_throw(std::string_view series) const {
  auto it = series_.find(series);
  if (it == series_.end()) throw TelemetryError(TelemetryErrc::UnknownSeries, series);
  return it->second;
}

std::vector<MetricSample> TelemetryStore::query(std::string_view series, double t0, double t1) const {
  if (t0 > t1) throw TelemetryError(TelemetryErrc::InvalidRange, "t0 > t1");
  std::shared_lock lock(mu_);
  const auto& pts = series_or_throw(series);
  auto lo = std::lower_bound(pts.begin(), pts.end(), t0, [](const Point& p, double t) { return p.t < t; });
  auto hi = std::lower_bound(lo, pts.end(), t1, [](const Point& p, double t) { return p.t < t; });
  std::vector<MetricSample> out;
  out.reserve(static_cast<std::size_t>(hi - lo));
  for (auto it = lo; it != hi; ++it) out.push_back(MetricSample{std::string(series), it->t, it->value});
  return out;
}

std::vector<HourCount> TelemetryStore::hourly_count(std::string_view series, double t0, double t1) const {
  const auto samples = query(series, t0, t1);
  std::vector<HourCount> out;
  if (t1 <= t0) return out;
  const auto first = static_cast<std::int64_t>(std::floor(t0 / 3600.0));
  const auto last = static_cast<std::int64_t>(std::ceil(t1 / 3600.0)) - 1;
  for (std::int64_t h = first; h <= last; ++h) out.push_back(HourCount{h, 0});
  for (const auto& s : samples) {
    const auto h = static_cast<std::int64_t>(std::floor(s.t / 3600.0));
    ++out[static_cast<std::size_t>(h - first)].count;
  }
  return out;
}

std::vector<MetricSample> TelemetryStore::lqi_trace(std::string_view friendly_name, double t0, double t1) const {
  return query(lqi_series(friendly_name), t0, t1);
}

bool TelemetryStore::has_series(std::string_view series) const {
  std::shared_lock lock(mu_);
  return series_.find(series) != series_.end();
}

std::vector<std::string> TelemetryStore::series_names() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, pts] : series_) out.push_back(name);
  return out;
}

std::size_t TelemetryStore::size(std::string_view series) const {
  std::shared_lock lock(mu_);
  auto it = series_.find(series);
  return it == series_.end() ? 0 : it->second.size();
}

std::optional<MetricSample> TelemetryStore::last(std::string_view series) const {
  std::shared_lock lock(mu_);
  auto it = series_.find(series);
  if (it == series_.end() || it->second.empty()) return std::nullopt;
  return MetricSample{it->first, it->second.back().t, it->second.back().value};
}

void TelemetryStore::export_csv(std::string_view series, std::ostream& out) const {
  std::shared_lock lock(mu_);
  const auto& pts = series_or_throw(series);
  write_csv(pts, out);
}

void TelemetryStore::export_csv(std::string_view series, double t0, double t1, std::ostream& out) const {
  const auto samples = query(series, t0, t1);
  std::vector<Point> pts;
  pts.reserve(samples.size());
  for (const auto& s : samples) pts.push_back({s.t, s.value});
  write_csv(pts, out);
}

void TelemetryStore::write_csv(const std::vector<Point>& pts, std::ostream& out) {
  out << "t,value\n";
  char buf[32];
  auto put = [&](double v) { out.write(buf, std::to_chars(buf, buf + sizeof buf, v).ptr - buf); };
  for (const auto& p : pts) {
    put(p.t);
    out << ',';
    put(p.value);
    out << '\n';
  }
}

void TelemetryStore::flush() {
  std::unique_lock lock(mu_);
  if (out_.is_open()) out_.flush();
}

}  // namespace zgw::telemetry
