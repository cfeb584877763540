#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zgw {

// Module errors carry a machine-readable code next to the human message.
// Each module defines an `enum class` of codes and a `to_string` overload
// found by ADL.
template <typename Code>
class Error : public std::runtime_error {
 public:
  Error(Code code, std::string_view detail = {})
      : std::runtime_error(format(code, detail)), code_(code) {}

  Code code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return to_string(code_); }

 private:
  static std::string format(Code code, std::string_view detail) {
    std::string msg(to_string(code));
    if (!detail.empty()) {
      msg += ": ";
      msg += detail;
    }
    return msg;
  }

  Code code_;
};

}  // namespace zgw
