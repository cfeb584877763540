#include "zgw/mqtt/topic.hpp"

namespace zgw::mqtt {

std::vector<std::string_view> split_levels(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto slash = s.find('/', start);
    if (slash == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, slash - start));
    start = slash + 1;
  }
}

bool is_valid_topic_name(std::string_view topic) noexcept {
  if (topic.empty() || topic.size() > 0xFFFF) return false;
  return topic.find_first_of("+#") == std::string_view::npos && topic.find('\0') == std::string_view::npos;
}

std::optional<TopicFilter> TopicFilter::parse(std::string_view text) {
  if (text.empty() || text.size() > 0xFFFF || text.find('\0') != std::string_view::npos) return std::nullopt;
  TopicFilter f;
  f.text_ = std::string(text);
  const auto levels = split_levels(text);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto level = levels[i];
    if (level.find_first_of("+#") != std::string_view::npos) {
      if (level.size() != 1) return std::nullopt;
      if (level == "#" && i + 1 != levels.size()) return std::nullopt;
    }
    f.levels_.emplace_back(level);
  }
  return f;
}

bool topic_matches(const TopicFilter& filter, std::string_view topic) {
  if (!is_valid_topic_name(topic)) return false;
  const auto t = split_levels(topic);
  const auto& f = filter.levels();
  if (!t.front().empty() && t.front().front() == '$' && (f.front() == "+" || f.front() == "#")) return false;
  std::size_t i = 0;
  for (; i < f.size(); ++i) {
    if (f[i] == "#") return true;
    if (i >= t.size()) return false;
    if (f[i] != "+" && f[i] != t[i]) return false;
  }
  return i == t.size();
}

bool topic_matches(std::string_view filter, std::string_view topic) {
  const auto f = TopicFilter::parse(filter);
  return f && topic_matches(*f, topic);
}

}  // namespace zgw::mqtt
