#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zgw::mqtt {

// Topic names are non-empty and carry no wildcard characters.
bool is_valid_topic_name(std::string_view topic) noexcept;

class TopicFilter {
 public:
  // `#` only as the whole last level, `+` only as a whole level.
  static std::optional<TopicFilter> parse(std::string_view text);

  const std::vector<std::string>& levels() const noexcept { return levels_; }
  const std::string& str() const noexcept { return text_; }

 private:
  std::string text_;
  std::vector<std::string> levels_;
};

std::vector<std::string_view> split_levels(std::string_view s);

// Wildcard-led filters never match topics whose first level starts with `$`.
bool topic_matches(const TopicFilter& filter, std::string_view topic);
// Invalid filters match nothing.
bool topic_matches(std::string_view filter, std::string_view topic);

// Subscription tree keyed by filter level. Each subscriber holds at most one
// entry per filter; matching returns the highest granted QoS per subscriber.
template <typename Subscriber>
class SubscriptionTrie {
 public:
  void insert(const TopicFilter& filter, Subscriber who, std::uint8_t qos) {
    Node* n = &root_;
    for (const auto& level : filter.levels()) {
      auto& child = n->children[level];
      if (!child) child = std::make_unique<Node>();
      n = child.get();
    }
    n->subscribers[who] = qos;
  }

  bool erase(const TopicFilter& filter, Subscriber who) {
    Node* n = &root_;
    for (const auto& level : filter.levels()) {
      auto it = n->children.find(level);
      if (it == n->children.end()) return false;
      n = it->second.get();
    }
    return n->subscribers.erase(who) > 0;
  }

  std::map<Subscriber, std::uint8_t> match(std::string_view topic) const {
    std::map<Subscriber, std::uint8_t> out;
    const auto levels = split_levels(topic);
    const bool dollar = !levels.empty() && !levels.front().empty() && levels.front().front() == '$';
    collect(root_, levels, 0, dollar, out);
    return out;
  }

 private:
  struct Node {
    std::map<std::string, std::unique_ptr<Node>, std::less<>> children;
    std::map<Subscriber, std::uint8_t> subscribers;
  };

  static void add(const Node& n, std::map<Subscriber, std::uint8_t>& out) {
    for (const auto& [who, qos] : n.subscribers) {
      auto [it, inserted] = out.emplace(who, qos);
      if (!inserted && qos > it->second) it->second = qos;
    }
  }

  static void collect(const Node& n, const std::vector<std::string_view>& levels, std::size_t i, bool dollar,
                      std::map<Subscriber, std::uint8_t>& out) {
    const bool wildcards = !(dollar && i == 0);
    if (wildcards) {
      if (auto it = n.children.find("#"); it != n.children.end()) add(*it->second, out);
    }
    if (i == levels.size()) {
      add(n, out);
      return;
    }
    if (auto it = n.children.find(levels[i]); it != n.children.end()) collect(*it->second, levels, i + 1, dollar, out);
    if (wildcards) {
      if (auto it = n.children.find("+"); it != n.children.end()) collect(*it->second, levels, i + 1, dollar, out);
    }
  }

  Node root_;
};

}  // namespace zgw::mqtt
